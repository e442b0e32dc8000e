"""Corpus files: event descriptions plus gold coreference, as JSON Lines.

Each line is one JSON object with a ``kind``:

``mention``
    ``id``, ``topic``, ``doc``, ``type``, ``lemma`` (required);
    ``participants`` (list of ``{"role", "entity"[, "surface"]}``),
    ``time`` (ISO-8601 truncated to its granularity, optionally ``a/b``),
    ``place`` (an id string or ``{"id", "ancestry": [...]}``),
    ``subevents`` (list of mention ids) -- all optional.
``gold``
    ``topic`` and ``clusters`` (list of lists of mention ids). Mentions of the
    topic not listed are gold singletons.

Topic and document order follow first appearance in the file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .errors import DuplicateMentionId, GoldUniverseMismatch, SchemaError
from .metrics import Partition
from .model import EntityRef, EventDescription, Participant, PlaceSpec, TimeSpec, normalize_entity
from .ontology import ProfileStore, unknown_roles

_MENTION_FIELDS = {"kind", "id", "topic", "doc", "type", "lemma", "participants", "time",
                   "place", "subevents"}
_GOLD_FIELDS = {"kind", "topic", "clusters"}


@dataclass(frozen=True)
class Document:
    doc_id: str
    mentions: tuple[EventDescription, ...]


@dataclass(frozen=True)
class Topic:
    topic_id: str
    documents: tuple[Document, ...]
    gold: Partition | None = None

    def events(self) -> Iterator[EventDescription]:
        for d in self.documents:
            yield from d.mentions

    @property
    def mention_ids(self) -> frozenset[str]:
        return frozenset(e.id for e in self.events())


@dataclass(frozen=True)
class Corpus:
    topics: tuple[Topic, ...] = ()
    _index: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        index: dict[str, EventDescription] = {}
        for t in self.topics:
            for ev in t.events():
                if ev.id in index:
                    raise DuplicateMentionId(f"mention id {ev.id!r} used twice")
                index[ev.id] = ev
            if t.gold is not None and t.gold.universe != t.mention_ids:
                raise GoldUniverseMismatch(f"topic {t.topic_id}: gold universe differs from "
                                           f"the topic's mentions")
        self._index.update(index)

    def events(self) -> Iterator[EventDescription]:
        for t in self.topics:
            yield from t.events()

    def __getitem__(self, mention_id: str) -> EventDescription:
        return self._index[mention_id]

    def __contains__(self, mention_id: str) -> bool:
        return mention_id in self._index

    def __len__(self):
        return len(self._index)

    def topic(self, topic_id: str) -> Topic:
        for t in self.topics:
            if t.topic_id == topic_id:
                return t
        raise KeyError(topic_id)

    def topic_mentions(self) -> dict[str, frozenset[str]]:
        return {t.topic_id: t.mention_ids for t in self.topics}

    def gold(self) -> dict[str, Partition]:
        return {t.topic_id: t.gold for t in self.topics if t.gold is not None}

    def filter(self, keep) -> "Corpus":
        """Corpus restricted to events for which ``keep(event)`` is true.

        Gold partitions are restricted to the survivors; subevent references
        are kept as they are.
        """
        topics = []
        for t in self.topics:
            docs = tuple(Document(d.doc_id, tuple(e for e in d.mentions if keep(e)))
                         for d in t.documents)
            docs = tuple(d for d in docs if d.mentions)
            if not docs:
                continue
            ids = frozenset(e.id for d in docs for e in d.mentions)
            gold = t.gold.restrict(ids) if t.gold is not None else None
            topics.append(Topic(t.topic_id, docs, gold))
        return Corpus(tuple(topics))


def build_corpus(events: Iterable[EventDescription],
                 gold: Mapping[str, Iterable[Iterable[str]]] | None = None) -> Corpus:
    """Group events by topic and document (first-appearance order)."""
    topics: dict[str, dict[str, list[EventDescription]]] = {}
    for ev in events:
        topics.setdefault(ev.topic_id, {}).setdefault(ev.doc_id, []).append(ev)
    gold = gold or {}
    unknown = set(gold) - set(topics)
    if unknown:
        raise GoldUniverseMismatch(f"gold for unknown topic(s) {sorted(unknown)}")
    out = []
    for tid, docs in topics.items():
        ids = frozenset(e.id for evs in docs.values() for e in evs)
        part = None
        if tid in gold:
            clusters = [list(c) for c in gold[tid]]
            stray = {m for c in clusters for m in c} - ids
            if stray:
                raise GoldUniverseMismatch(
                    f"gold for topic {tid} references unknown mention(s) {sorted(stray)}")
            try:
                part = Partition(clusters, ids)
            except ValueError as exc:
                raise GoldUniverseMismatch(f"gold for topic {tid}: {exc}") from None
        out.append(Topic(tid, tuple(Document(d, tuple(evs)) for d, evs in docs.items()), part))
    return Corpus(tuple(out))


# --- reading -----------------------------------------------------------------

def _require_str(rec: dict, key: str, where: str) -> str:
    val = rec.get(key)
    if not isinstance(val, str) or not val.strip():
        raise SchemaError(where, key, "required non-empty string")
    if any(c.isspace() for c in val.strip()) and key in ("id", "topic", "doc"):
        raise SchemaError(where, key, "must not contain whitespace")
    return val.strip()


def parse_event(rec: dict, where: str = "<record>",
                gazetteer: Mapping[str, tuple[EntityRef, ...]] | None = None) -> EventDescription:
    unknown = set(rec) - _MENTION_FIELDS
    if unknown:
        raise SchemaError(where, sorted(unknown)[0], "unknown field")
    mid = _require_str(rec, "id", where)
    topic = _require_str(rec, "topic", where)
    doc = _require_str(rec, "doc", where)
    etype = _require_str(rec, "type", where)
    lemma = _require_str(rec, "lemma", where)

    parts = []
    raw_parts = rec.get("participants", [])
    if not isinstance(raw_parts, list):
        raise SchemaError(where, "participants", "must be a list")
    for i, p in enumerate(raw_parts):
        fld = f"participants[{i}]"
        if not isinstance(p, dict) or set(p) - {"role", "entity", "surface"}:
            raise SchemaError(where, fld, "expected {role, entity[, surface]}")
        role = p.get("role")
        if not isinstance(role, str) or not role.strip():
            raise SchemaError(where, fld + ".role", "required non-empty string")
        ent = p.get("entity")
        if not isinstance(ent, str) or not ent.strip():
            raise SchemaError(where, fld + ".entity", "required non-empty string")
        parts.append(Participant(role.strip(), normalize_entity(ent, p.get("surface"))))

    time = None
    if rec.get("time") is not None:
        if not isinstance(rec["time"], str):
            raise SchemaError(where, "time", "must be an ISO-8601 string")
        try:
            time = TimeSpec.parse(rec["time"])
        except ValueError as exc:
            raise SchemaError(where, "time", str(exc)) from None

    place = None
    raw_place = rec.get("place")
    if raw_place is not None:
        if isinstance(raw_place, str):
            raw_place = {"id": raw_place}
        if not isinstance(raw_place, dict) or not isinstance(raw_place.get("id"), str) \
                or set(raw_place) - {"id", "ancestry"}:
            raise SchemaError(where, "place", "expected an id string or {id, ancestry}")
        try:
            pid = normalize_entity(raw_place["id"])
            if "ancestry" in raw_place:
                anc = tuple(normalize_entity(a) for a in raw_place["ancestry"])
            else:
                anc = tuple((gazetteer or {}).get(pid.id, ()))
            place = PlaceSpec(pid, anc)
        except Exception as exc:
            raise SchemaError(where, "place", str(exc)) from None

    subs = rec.get("subevents", [])
    if not isinstance(subs, list) or not all(isinstance(s, str) and s for s in subs):
        raise SchemaError(where, "subevents", "must be a list of mention ids")
    try:
        return EventDescription(mid, etype, lemma, doc, topic, frozenset(parts), time, place,
                                frozenset(subs))
    except ValueError as exc:
        raise SchemaError(where, "id", str(exc)) from None


def parse_corpus(text: str, source: str = "<string>", profiles: ProfileStore | None = None,
                 gazetteer: Mapping[str, tuple[EntityRef, ...]] | None = None,
                 strict_subevents: bool = False) -> Corpus:
    """Parse corpus text.

    With ``profiles`` every participant role is checked against its type's
    profile (types without a profile are let through). With
    ``strict_subevents`` every subevent id must name a mention in the file.
    """
    events: list[EventDescription] = []
    where_of: dict[str, str] = {}
    gold: dict[str, list] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        where = f"{source}:{lineno}"
        try:
            rec = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise SchemaError(where, "<json>", exc.msg) from None
        if not isinstance(rec, dict):
            raise SchemaError(where, "<record>", "expected a JSON object")
        kind = rec.get("kind", "mention")
        if kind == "mention":
            ev = parse_event(rec, where, gazetteer)
            if ev.id in where_of:
                raise DuplicateMentionId(f"{where}: mention id {ev.id!r} already defined at "
                                         f"{where_of[ev.id]}")
            if profiles is not None:
                bad = unknown_roles(ev, profiles)
                if bad:
                    raise SchemaError(where, "participants",
                                      f"role {bad[0]!r} is not valid for {ev.event_type}")
            where_of[ev.id] = where
            events.append(ev)
        elif kind == "gold":
            if set(rec) - _GOLD_FIELDS:
                raise SchemaError(where, sorted(set(rec) - _GOLD_FIELDS)[0], "unknown field")
            topic = _require_str(rec, "topic", where)
            clusters = rec.get("clusters")
            if not isinstance(clusters, list) or not all(
                    isinstance(c, list) and c and all(isinstance(m, str) for m in c)
                    for c in clusters):
                raise SchemaError(where, "clusters", "expected a list of non-empty id lists")
            if topic in gold:
                raise SchemaError(where, "topic", f"gold for topic {topic!r} given twice")
            gold[topic] = clusters
        else:
            raise SchemaError(where, "kind", f"unknown record kind {kind!r}")
    if strict_subevents:
        for ev in events:
            for s in sorted(ev.subevents):
                if s not in where_of:
                    raise SchemaError(where_of[ev.id], "subevents", f"unknown mention id {s!r}")
    try:
        return build_corpus(events, gold)
    except GoldUniverseMismatch as exc:
        raise GoldUniverseMismatch(f"{source}: {exc}") from None


def load_corpus(path: str | Path, profiles: ProfileStore | None = None,
                gazetteer: Mapping[str, tuple[EntityRef, ...]] | None = None,
                strict_subevents: bool = False) -> Corpus:
    path = Path(path)
    if not path.is_file():
        raise SchemaError(str(path), "<file>", "no such file")
    return parse_corpus(path.read_text(encoding="utf-8"), str(path), profiles, gazetteer,
                        strict_subevents)


# --- writing -----------------------------------------------------------------

def event_record(ev: EventDescription) -> dict:
    rec: dict = {"kind": "mention", "id": ev.id, "topic": ev.topic_id, "doc": ev.doc_id,
                 "type": ev.event_type, "lemma": ev.lemma}
    if ev.participants:
        rec["participants"] = []
        for p in sorted(ev.participants):
            item = {"role": p.role, "entity": p.entity.id}
            if p.entity.surface is not None:
                item["surface"] = p.entity.surface
            rec["participants"].append(item)
    if ev.time is not None:
        rec["time"] = ev.time.to_iso()
    if ev.place is not None:
        rec["place"] = {"id": ev.place.id.id, "ancestry": [a.id for a in ev.place.ancestry]}
    if ev.subevents:
        rec["subevents"] = sorted(ev.subevents)
    return rec


def dump_corpus(corpus: Corpus) -> str:
    lines = [json.dumps(event_record(ev), ensure_ascii=False) for ev in corpus.events()]
    for t in corpus.topics:
        if t.gold is not None:
            clusters = [b for b in t.gold.sorted_blocks() if len(b) > 1]
            lines.append(json.dumps({"kind": "gold", "topic": t.topic_id, "clusters": clusters},
                                    ensure_ascii=False))
    return "".join(line + "\n" for line in lines)


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    Path(path).write_text(dump_corpus(corpus), encoding="utf-8")


# --- statistics ----------------------------------------------------------------

@dataclass(frozen=True)
class CorpusStats:
    topics: int
    documents: int
    mentions: int
    distinct_lemmas: int
    per_type: tuple[tuple[str, int], ...]
    gold_clusters: int

    def summary_line(self) -> str:
        def plural(n, word):
            return f"{n} {word}" + ("" if n == 1 else "s")
        return ", ".join([plural(self.topics, "topic"), plural(self.documents, "doc"),
                          plural(self.mentions, "mention")])

    def format(self) -> str:
        lines = [self.summary_line(),
                 f"distinct lemmas: {self.distinct_lemmas}",
                 f"gold clusters: {self.gold_clusters}"]
        lines += [f"  {t}: {n}" for t, n in self.per_type]
        return "\n".join(lines) + "\n"


def corpus_stats(corpus: Corpus) -> CorpusStats:
    per_type: dict[str, int] = {}
    lemmas = set()
    n_docs = 0
    for t in corpus.topics:
        n_docs += len(t.documents)
    for ev in corpus.events():
        per_type[ev.event_type] = per_type.get(ev.event_type, 0) + 1
        lemmas.add(ev.lemma)
    gold = sum(len(t.gold.blocks) for t in corpus.topics if t.gold is not None)
    return CorpusStats(len(corpus.topics), n_docs, len(corpus), len(lemmas),
                       tuple(sorted(per_type.items())), gold)


# --- triple-store adapter ------------------------------------------------------
#
# A knowledge-graph export maps onto mention records as follows (predicates
# are matched by local name, so any namespace works):
#
#   <m> rdf:type <Killing>        -> type     (local name of the class)
#   <m> :lemma "kill"             -> lemma
#   <m> :document <d>             -> doc
#   <m> :topic <t>                -> topic
#   <m> :<Role> <entity>          -> participants (any other predicate whose
#                                    local name is a role of the type)
#   <m> :time "1980-12-08"        -> time
#   <m> :place <loc>              -> place
#   <m> :subEvent <m2>            -> subevents

def _local(iri: str) -> str:
    for sep in ("#", "/", ":"):
        if sep in iri:
            iri = iri.rsplit(sep, 1)[1]
    return iri


def records_from_triples(triples: Iterable[tuple[str, str, str]],
                         profiles: ProfileStore) -> list[dict]:
    """Turn (subject, predicate, object) triples into mention records.

    Subjects without an ``rdf:type`` naming a profiled event type are ignored.
    """
    by_subject: dict[str, list[tuple[str, str]]] = {}
    for s, p, o in triples:
        by_subject.setdefault(s, []).append((_local(p), o))
    records = []
    for s in sorted(by_subject):
        props = by_subject[s]
        types = [_local(o) for p, o in props if p == "type" and _local(o) in profiles]
        if not types:
            continue
        etype = types[0]
        roles = profiles[etype].all_roles
        rec: dict = {"kind": "mention", "id": _local(s), "type": etype, "participants": []}
        for p, o in props:
            if p == "lemma":
                rec["lemma"] = o
            elif p == "document":
                rec["doc"] = _local(o)
            elif p == "topic":
                rec["topic"] = _local(o)
            elif p == "time":
                rec["time"] = o
            elif p == "place":
                rec["place"] = o
            elif p == "subEvent":
                rec.setdefault("subevents", []).append(_local(o))
            elif p in roles:
                rec["participants"].append({"role": p, "entity": o})
        rec["participants"].sort(key=lambda x: (x["role"], x["entity"]))
        records.append(rec)
    return records
