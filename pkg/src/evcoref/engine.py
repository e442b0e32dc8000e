"""Fixpoint evaluation of coreference rules over event descriptions.

Rules are applied in rounds. Every round evaluates each candidate
(pair, rule) against the edge set frozen at the end of the previous round,
so the outcome does not depend on the order pairs are visited. Conditions
that do not involve subevents are decided once, up front; only rules with a
``hasCoref`` atom are re-checked in later rounds. Evaluation stops after the
first round that adds no edge.
"""

from __future__ import annotations

import itertools
import logging
import warnings
from dataclasses import dataclass, field
from typing import Callable, Literal

from . import compat
from .errors import NoEdge, UnknownEventTypeWarning
from .model import (CERTAIN, POSSIBLE, STRENGTHS, CorefEdge, CorefMeasureValue,
                    EventDescription, Strength, pair_key)
from .ontology import ProfileStore
from .ruledsl import PLACE, TIME, Condition, CorefRule, RuleSet

log = logging.getLogger(__name__)

Scope = Literal["within_document", "within_topic", "cross_topic"]
SCOPES: tuple[Scope, ...] = ("within_document", "within_topic", "cross_topic")

EdgeKey = tuple[str, str, str]  # (a, b, strength) with a < b


@dataclass(frozen=True)
class EngineConfig:
    """Knobs for :func:`evaluate`.

    ``certain_subevent_sources`` / ``possible_subevent_sources`` name the edge
    strengths a ``hasCoref`` atom may consume when the enclosing rule is
    certain / possible.
    """

    scope: Scope = "within_topic"
    enable_cross_type: bool = False
    certain_subevent_sources: tuple[Strength, ...] = (CERTAIN,)
    possible_subevent_sources: tuple[Strength, ...] = (CERTAIN, POSSIBLE)
    possible_weight: float = 0.5

    def __post_init__(self):
        if self.scope not in SCOPES:
            raise ValueError(f"unknown scope {self.scope!r}")
        for s in self.certain_subevent_sources + self.possible_subevent_sources:
            if s not in STRENGTHS:
                raise ValueError(f"unknown strength {s!r}")
        if not 0.0 <= self.possible_weight <= 1.0:
            raise ValueError("possible_weight must lie in [0, 1]")

    def subevent_sources(self, strength: Strength) -> tuple[Strength, ...]:
        return self.certain_subevent_sources if strength == CERTAIN \
            else self.possible_subevent_sources


@dataclass(frozen=True)
class Binding:
    condition: str
    e1_value: str
    e2_value: str
    witness: EdgeKey | None = None

    def __str__(self):
        out = f"{self.condition} [E1={self.e1_value}; E2={self.e2_value}]"
        if self.witness:
            a, b, s = self.witness
            out += f" via {s} {a}~{b}"
        return out


@dataclass(frozen=True)
class Derivation:
    rule_id: str
    strength: Strength
    e1: str
    e2: str
    iteration: int
    bindings: tuple[Binding, ...]

    @property
    def key(self) -> EdgeKey:
        a, b = pair_key(self.e1, self.e2)
        return (a, b, self.strength)

    def __str__(self):
        conds = "; ".join(str(b) for b in self.bindings)
        return f"round {self.iteration}: {self.rule_id} E1={self.e1} E2={self.e2}: {conds}"


@dataclass
class CorefGraph:
    nodes: tuple[str, ...]
    edges: dict[EdgeKey, CorefEdge] = field(default_factory=dict)
    derivations: dict[EdgeKey, list[Derivation]] = field(default_factory=dict)
    rounds: int = 0
    skipped: tuple[str, ...] = ()
    rule_order: tuple[str, ...] = ()

    def edges_of(self, strength: Strength) -> frozenset[tuple[str, str]]:
        return frozenset((a, b) for (a, b, s) in self.edges if s == strength)

    @property
    def certain_edges(self) -> frozenset[tuple[str, str]]:
        return self.edges_of(CERTAIN)

    @property
    def possible_edges(self) -> frozenset[tuple[str, str]]:
        return self.edges_of(POSSIBLE)

    def has_edge(self, a: str, b: str, strength: Strength | None = None) -> bool:
        if a == b:
            return False
        x, y = pair_key(a, b)
        strengths = STRENGTHS if strength is None else (strength,)
        return any((x, y, s) in self.edges for s in strengths)

    def edge(self, a: str, b: str, strength: Strength) -> CorefEdge:
        x, y = pair_key(a, b)
        try:
            return self.edges[(x, y, strength)]
        except KeyError:
            raise NoEdge(f"no {strength} edge between {a} and {b}") from None

    def counts(self) -> dict[str, int]:
        return {s: len(self.edges_of(s)) for s in STRENGTHS}

    def serialize(self) -> str:
        """``<id_a> <strength> <id_b> <rule_id>`` lines, sorted."""
        return "".join(f"{a} {s} {b} {e.rule_id}\n"
                       for (a, b, s), e in sorted(self.edges.items()))

    def derivation_log(self) -> str:
        order = {r: i for i, r in enumerate(self.rule_order)}
        ds = sorted((d for ds in self.derivations.values() for d in ds),
                    key=lambda d: (d.iteration, order.get(d.rule_id, len(order)), d.key))
        return "".join(f"{d}\n" for d in ds)


def parse_graph(text: str, source: str = "<string>") -> list[CorefEdge]:
    """Read edges back from :meth:`CorefGraph.serialize` output."""
    from .errors import ParseError

    edges = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 4 or parts[1] not in STRENGTHS:
            raise ParseError("expected '<id_a> <strength> <id_b> <rule_id>'", source, lineno)
        a, s, b, rule = parts
        edges.append(CorefEdge(a, b, s, rule, 0))
    return edges


# --- condition evaluation -------------------------------------------------

def _fmt_entities(ents) -> str:
    return ",".join(sorted(e.id for e in ents)) or "-"


def _static_check(cond: Condition, e1: EventDescription, e2: EventDescription
                  ) -> Binding | None:
    """Binding if ``cond`` holds for (E1=e1, E2=e2), else None. Not for hasCoref."""
    left, right = cond.oriented()
    if left.name == TIME:
        fn = compat.time_eq if cond.kind == "Eq" else compat.time_compat
        ok = fn(e1.time, e2.time)
        v1, v2 = (str(e1.time) if e1.time else "-"), (str(e2.time) if e2.time else "-")
    elif left.name == PLACE:
        fn = compat.place_eq if cond.kind == "Eq" else compat.place_compat
        ok = fn(e1.place, e2.place)
        v1 = e1.place.id.id if e1.place else "-"
        v2 = e2.place.id.id if e2.place else "-"
    else:
        r1, r2 = e1.role(left.name), e2.role(right.name)
        ok = compat.role_eq(r1, r2)
        v1, v2 = _fmt_entities(r1), _fmt_entities(r2)
    return Binding(str(cond), v1, v2) if ok else None


def _subevent_witness(e1: EventDescription, e2: EventDescription,
                      edges: set[EdgeKey], sources: tuple[Strength, ...]) -> EdgeKey | None:
    shared = e1.subevents & e2.subevents
    if shared:
        s = min(shared)
        return (s, s, "identity")
    for s1 in sorted(e1.subevents):
        for s2 in sorted(e2.subevents):
            x, y = pair_key(s1, s2)
            for strength in sources:
                if (x, y, strength) in edges:
                    return (x, y, strength)
    return None


@dataclass
class _Candidate:
    order: tuple
    rule: CorefRule
    e1: EventDescription
    e2: EventDescription
    static: tuple[tuple[int, Binding], ...]
    dynamic: tuple[int, ...]
    fired: bool = False


def _orientations(rule: CorefRule, x: EventDescription, y: EventDescription):
    if rule.cross_type:
        if x.event_type == rule.type_guard_e1 and y.event_type == rule.type_guard_e2:
            yield x, y
        if y.event_type == rule.type_guard_e1 and x.event_type == rule.type_guard_e2:
            yield y, x
    else:
        yield x, y
        yield y, x


def scope_key(ev: EventDescription, scope: Scope):
    if scope == "within_document":
        return (ev.topic_id, ev.doc_id)
    if scope == "within_topic":
        return (ev.topic_id,)
    return ()


def events_of(corpus) -> list[EventDescription]:
    if hasattr(corpus, "events"):
        return list(corpus.events())
    return list(corpus)


def evaluate(corpus, rules: RuleSet, profiles: ProfileStore | None = None,
             scope: Scope | None = None, config: EngineConfig | None = None,
             on_round: Callable[[int, frozenset], None] | None = None) -> CorefGraph:
    """Apply ``rules`` to ``corpus`` until no new edge can be derived.

    ``corpus`` is a :class:`~evcoref.corpus.Corpus` or an iterable of event
    descriptions. Events whose type has no profile are skipped with a warning
    (only when ``profiles`` is given). ``on_round`` is called after each round
    with the round number and the set of edge keys derived so far.
    """
    config = config or EngineConfig()
    if scope is not None and scope != config.scope:
        config = EngineConfig(scope, config.enable_cross_type, config.certain_subevent_sources,
                              config.possible_subevent_sources, config.possible_weight)
    events = events_of(corpus)
    nodes = tuple(ev.id for ev in events)
    if len(set(nodes)) != len(nodes):
        raise ValueError("duplicate event ids")

    skipped = []
    usable = []
    for ev in events:
        if profiles is not None and ev.event_type not in profiles:
            warnings.warn(f"{ev.id}: no profile for event type {ev.event_type!r}; skipped",
                          UnknownEventTypeWarning, stacklevel=2)
            skipped.append(ev.id)
            continue
        usable.append(ev)

    active = rules.active(config.enable_cross_type)
    graph = CorefGraph(nodes=nodes, skipped=tuple(skipped),
                       rule_order=tuple(r.rule_id for r in active))
    if not nodes:
        return graph

    candidates = _candidates(usable, active, config.scope)
    log.debug("%d candidate (pair, rule) combinations", len(candidates))

    edges: set[EdgeKey] = set()
    round_no = 0
    while True:
        round_no += 1
        snapshot = frozenset(edges)
        fired: list[tuple[_Candidate, Derivation]] = []
        for cand in candidates:
            if cand.fired:
                continue
            d = _try_fire(cand, snapshot, config, round_no)
            if d is not None:
                fired.append((cand, d))
        new = False
        for cand, d in fired:
            cand.fired = True
            key = d.key
            graph.derivations.setdefault(key, []).append(d)
            if key not in edges:
                edges.add(key)
                graph.edges[key] = CorefEdge(key[0], key[1], d.strength, d.rule_id, round_no)
                new = True
        if on_round is not None:
            on_round(round_no, frozenset(edges))
        if not new:
            break
        # each productive round adds at least one of finitely many edge keys
        assert round_no <= 2 * len(nodes) * len(nodes)
    graph.rounds = round_no
    return graph


def _candidates(events: list[EventDescription], rules: RuleSet, scope: Scope
                ) -> list[_Candidate]:
    groups: dict[tuple, dict[str, list[EventDescription]]] = {}
    for ev in sorted(events, key=lambda e: e.id):
        groups.setdefault(scope_key(ev, scope), {}).setdefault(ev.event_type, []).append(ev)

    out: list[_Candidate] = []
    for ridx, rule in enumerate(rules):
        static_conds = [(i, c) for i, c in enumerate(rule.conditions)
                        if c.kind != "SubeventCoref"]
        dynamic = tuple(i for i, c in enumerate(rule.conditions) if c.kind == "SubeventCoref")
        for gkey in sorted(groups):
            by_type = groups[gkey]
            if rule.cross_type:
                pairs = itertools.product(by_type.get(rule.type_guard_e1, ()),
                                          by_type.get(rule.type_guard_e2, ()))
            else:
                pairs = itertools.combinations(by_type.get(rule.type_guard_e1, ()), 2)
            for x, y in pairs:
                # hasCoref atoms read the same either way round, so the first
                # orientation whose static atoms hold decides
                for e1, e2 in _orientations(rule, x, y):
                    bindings = []
                    for i, c in static_conds:
                        b = _static_check(c, e1, e2)
                        if b is None:
                            break
                        bindings.append((i, b))
                    else:
                        out.append(_Candidate((ridx, pair_key(x.id, y.id)), rule, e1, e2,
                                              tuple(bindings), dynamic))
                        break
    return out


def _try_fire(cand: _Candidate, edges: frozenset, config: EngineConfig,
              round_no: int) -> Derivation | None:
    if cand.dynamic and not (cand.e1.subevents and cand.e2.subevents):
        return None
    bindings = dict(cand.static)
    sources = config.subevent_sources(cand.rule.strength)
    for i in cand.dynamic:
        w = _subevent_witness(cand.e1, cand.e2, edges, sources)
        if w is None:
            return None
        cond = cand.rule.conditions[i]
        bindings[i] = Binding(str(cond), ",".join(sorted(cand.e1.subevents)),
                              ",".join(sorted(cand.e2.subevents)),
                              None if w[2] == "identity" else w)
    return Derivation(cand.rule.rule_id, cand.rule.strength, cand.e1.id, cand.e2.id, round_no,
                      tuple(bindings[i] for i in sorted(bindings)))


def measure(graph: CorefGraph, a: str, b: str, possible_weight: float = 0.5
            ) -> CorefMeasureValue:
    """1 for a certain link, ``possible_weight`` for a possible-only link, else 0."""
    if a == b:
        return CorefMeasureValue(1.0)
    if graph.has_edge(a, b, CERTAIN):
        return CorefMeasureValue(1.0)
    if graph.has_edge(a, b, POSSIBLE):
        return CorefMeasureValue(possible_weight)
    return CorefMeasureValue(0.0)


def explain(graph: CorefGraph, a: str, b: str, strength: Strength | None = None
            ) -> list[Derivation]:
    """Derivations behind the edge(s) between ``a`` and ``b``, supporting steps first.

    For every ``hasCoref`` atom the trace includes the derivation of the
    subevent edge it consumed, recursively.
    """
    x, y = pair_key(a, b)
    strengths = STRENGTHS if strength is None else (strength,)
    roots = [(x, y, s) for s in strengths if (x, y, s) in graph.edges]
    if not roots:
        what = strength or "coreference"
        raise NoEdge(f"no {what} edge between {a} and {b}")

    seen: set[Derivation] = set()
    out: list[Derivation] = []

    def visit(key: EdgeKey, before: int | None):
        for d in graph.derivations.get(key, ()):
            if before is not None and d.iteration >= before:
                continue
            if d in seen:
                continue
            seen.add(d)
            for bnd in d.bindings:
                if bnd.witness is not None:
                    visit(bnd.witness, d.iteration)
            out.append(d)
            if before is not None:
                # a supporting edge needs only its earliest derivation
                break

    for key in roots:
        visit(key, None)
    order = {r: i for i, r in enumerate(graph.rule_order)}
    out.sort(key=lambda d: (d.iteration, order.get(d.rule_id, len(order)), d.key))
    return out
