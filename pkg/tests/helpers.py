"""Random corpora and brute-force oracles shared by the test modules.

The oracles deliberately avoid the package's own comparators and kernels:
times are compared as datetime ranges, metrics are computed from explicit
mention pairs and permutations.
"""

from __future__ import annotations

import itertools
import random
from datetime import datetime, timedelta
from pathlib import Path

from evcoref.model import EventDescription, Participant, PlaceSpec, TimeSpec, normalize_entity

DATA = Path(__file__).resolve().parents[1] / "src" / "evcoref" / "data"


# --- random corpora ---------------------------------------------------------

TIMES = ["2008", "2008-05", "2008-05-03", "2008-05-04", "2008-06-01", "2008-05-03T10",
         "2008-05-03T10:30", "2008-05-01/2008-05-10", "2009", None]
PLACES = {
    "manhattan": ("nyc", "usa"),
    "brooklyn": ("nyc", "usa"),
    "nyc": ("usa",),
    "usa": (),
    "paris": ("france",),
    "france": (),
}
ENTITIES = ["e1", "e2"]


def random_event(rng: random.Random, eid: str, profiles, topic: str, doc: str,
                 ids: list[str], types=None) -> EventDescription:
    etype = rng.choice(types or list(profiles))
    roles = sorted(profiles[etype].all_roles)
    parts = set()
    for _ in range(rng.randint(0, 4)):
        parts.add(Participant(rng.choice(roles), normalize_entity(rng.choice(ENTITIES))))
    t = rng.choice(TIMES)
    place = None
    if rng.random() < 0.6:
        pid = rng.choice(sorted(PLACES))
        place = PlaceSpec(normalize_entity(pid), tuple(normalize_entity(a) for a in PLACES[pid]))
    subs = set()
    others = [i for i in ids if i != eid]
    if others and rng.random() < 0.5:
        subs = set(rng.sample(others, rng.randint(1, min(2, len(others)))))
    return EventDescription(eid, etype, rng.choice(["kill", "die", "shoot", "Shoot"]), doc,
                            topic, frozenset(parts), TimeSpec.parse(t) if t else None, place,
                            frozenset(subs))


def random_events(rng: random.Random, profiles, n_max: int = 12, types=None
                  ) -> list[EventDescription]:
    """Up to ``n_max`` events drawn from a few types, dense enough for rules to fire."""
    n = rng.randint(0, n_max)
    if types is None:
        # few types per corpus, so that same-type pairs (and subevent chains) are common
        types = rng.sample(list(profiles), rng.randint(1, 3))
    topics = ["t1"] if rng.random() < 0.6 else ["t1", "t2"]
    ids = [f"x{i:02d}" for i in range(n)]
    out = []
    for eid in ids:
        topic = rng.choice(topics)
        out.append(random_event(rng, eid, profiles, topic, rng.choice(["d1", "d2"]) + topic,
                                ids, types))
    rng.shuffle(out)
    return out


# --- engine oracle ------------------------------------------------------------

_STEP = ["year", "month", "day", "hour", "minute"]


def _bounds(ts: TimeSpec, level: int) -> tuple[datetime, datetime]:
    """Half-open datetime range covered by ``ts`` viewed at ``level``."""
    def start_of(parts):
        p = list(parts[: level + 1])
        return datetime(*(p + [1, 1, 0, 0][len(p) - 1:]))

    hi = start_of(ts.end)
    if level == 0:
        hi = hi.replace(year=hi.year + 1)
    elif level == 1:
        hi = hi.replace(year=hi.year + hi.month // 12, month=hi.month % 12 + 1)
    else:
        hi += {2: timedelta(days=1), 3: timedelta(hours=1), 4: timedelta(minutes=1)}[level]
    return start_of(ts.start), hi


def oracle_time_compat(a, b) -> bool:
    if a is None or b is None:
        return False
    level = min(_STEP.index(a.granularity), _STEP.index(b.granularity))
    a0, a1 = _bounds(a, level)
    b0, b1 = _bounds(b, level)
    return a0 < b1 and b0 < a1


def oracle_time_eq(a, b) -> bool:
    return a is not None and b is not None and a.to_iso() == b.to_iso() \
        and a.granularity == b.granularity


def oracle_place_compat(a, b) -> bool:
    if a is None or b is None:
        return False
    fa = {a.id.id} | {x.id for x in a.ancestry}
    fb = {b.id.id} | {x.id for x in b.ancestry}
    return a.id.id in fb or b.id.id in fa


def oracle_place_eq(a, b) -> bool:
    return a is not None and b is not None and a.id.id == b.id.id


def _holds(cond, e1, e2, edges, sources) -> bool:
    left, right = (cond.lhs, cond.rhs) if cond.lhs.side == "E1" else (cond.rhs, cond.lhs)
    if cond.kind == "SubeventCoref":
        for s1 in e1.subevents:
            for s2 in e2.subevents:
                if s1 == s2:
                    return True
                if any((min(s1, s2), max(s1, s2), s) in edges for s in sources):
                    return True
        return False
    if left.name == "Time":
        f = oracle_time_eq if cond.kind == "Eq" else oracle_time_compat
        return f(e1.time, e2.time)
    if left.name == "Place":
        f = oracle_place_eq if cond.kind == "Eq" else oracle_place_compat
        return f(e1.place, e2.place)
    v1 = [p.entity.id for p in e1.participants if p.role == left.name]
    v2 = [p.entity.id for p in e2.participants if p.role == right.name]
    return any(x == y for x in v1 for y in v2)


def _same_scope(x, y, scope) -> bool:
    if scope == "within_document":
        return (x.topic_id, x.doc_id) == (y.topic_id, y.doc_id)
    if scope == "within_topic":
        return x.topic_id == y.topic_id
    return True


def oracle_fixpoint(events, rules, scope="within_topic", cross=False,
                    certain_sources=("certain",), possible_sources=("certain", "possible"),
                    on_round=None):
    """Naive least fixpoint: every ordered pair against every rule, every round.

    Returns ({(a, b, strength): (rule_id, round)}, rounds).
    """
    active = [r for r in rules if cross or r.type_guard_e1 == r.type_guard_e2]
    edges: dict = {}
    rounds = 0
    if not events:
        return edges, 0
    while True:
        rounds += 1
        snap = frozenset(edges)
        new = {}
        for r in active:
            sources = certain_sources if r.strength == "certain" else possible_sources
            for x in events:
                for y in events:
                    if x.id == y.id or not _same_scope(x, y, scope):
                        continue
                    if x.event_type != r.type_guard_e1 or y.event_type != r.type_guard_e2:
                        continue
                    if all(_holds(c, x, y, snap, sources) for c in r.conditions):
                        key = (min(x.id, y.id), max(x.id, y.id), r.strength)
                        if key not in edges and key not in new:
                            new[key] = (r.rule_id, rounds)
        edges.update(new)
        if on_round is not None:
            on_round(rounds, frozenset(edges))
        if not new:
            return edges, rounds


# --- partition and metric oracles ---------------------------------------------

def random_partition(rng: random.Random, ids, max_blocks=None):
    ids = list(ids)
    k = rng.randint(1, max_blocks or len(ids)) if ids else 0
    blocks = [[] for _ in range(k)]
    for m in ids:
        blocks[rng.randrange(k)].append(m)
    return [b for b in blocks if b]


def _block_map(blocks):
    return {m: frozenset(b) for b in blocks for m in b}


def _ratio(num, den_p, num_r, den_r):
    if den_p == 0 and den_r == 0:
        return 1.0, 1.0
    return (num / den_p if den_p else 0.0), (num_r / den_r if den_r else 0.0)


def _f(p, r):
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def _components(nodes, links):
    """Number of connected components by breadth-first search."""
    adj = {n: set() for n in nodes}
    for a, b in links:
        adj[a].add(b)
        adj[b].add(a)
    seen, count = set(), 0
    for n in nodes:
        if n in seen:
            continue
        count += 1
        stack = [n]
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            stack.extend(adj[x] - seen)
    return count


def _muc_side(gold_blocks, other_blocks):
    other = _block_map(other_blocks)
    num = den = 0
    for g in gold_blocks:
        links = [(a, b) for a, b in itertools.combinations(sorted(g), 2) if b in other[a]]
        num += len(g) - _components(sorted(g), links)
        den += len(g) - 1
    return num, den


def oracle_muc(resp, key):
    rn, rd = _muc_side(key, resp)
    pn, pd = _muc_side(resp, key)
    if pd == 0 and rd == 0:
        return 1.0, 1.0, 1.0
    p = pn / pd if pd else 0.0
    r = rn / rd if rd else 0.0
    return p, r, _f(p, r)


def oracle_b3(resp, key):
    R, K = _block_map(resp), _block_map(key)
    ms = sorted(K)
    if not ms:
        return 1.0, 1.0, 1.0
    r = sum(len(R[m] & K[m]) / len(K[m]) for m in ms) / len(ms)
    p = sum(len(R[m] & K[m]) / len(R[m]) for m in ms) / len(ms)
    return p, r, _f(p, r)


def oracle_ceaf_total(resp, key):
    """Exhaustive search over all one-to-one alignments."""
    ks = [frozenset(b) for b in key]
    rs = [frozenset(b) for b in resp]
    if len(ks) > len(rs):
        ks, rs = rs, ks
    best = 0
    for perm in itertools.permutations(range(len(rs)), len(ks)):
        best = max(best, sum(len(ks[i] & rs[j]) for i, j in enumerate(perm)))
    return best


def oracle_ceaf_m(resp, key):
    n = sum(len(b) for b in key)
    if n == 0:
        return 1.0, 1.0, 1.0
    t = oracle_ceaf_total(resp, key) / n
    return t, t, _f(t, t)


def oracle_blanc(resp, key):
    R, K = _block_map(resp), _block_map(key)
    ms = sorted(K)
    rc = kc = bc = rn = kn = bn = 0
    for a, b in itertools.combinations(ms, 2):
        in_r, in_k = b in R[a], b in K[a]
        rc += in_r
        kc += in_k
        bc += in_r and in_k
        rn += not in_r
        kn += not in_k
        bn += (not in_r) and (not in_k)
    pc, rcc = _ratio(bc, rc, bc, kc)
    pn, rnn = _ratio(bn, rn, bn, kn)
    return (pc + pn) / 2, (rcc + rnn) / 2, (_f(pc, rcc) + _f(pn, rnn)) / 2


def oracle_lemma_classes(events, scope="within_topic"):
    groups = {}
    for ev in events:
        if scope == "within_document":
            k = (ev.topic_id, ev.doc_id, ev.lemma)
        elif scope == "within_topic":
            k = (ev.topic_id, ev.lemma)
        else:
            k = (ev.lemma,)
        groups.setdefault(k, set()).add(ev.id)
    return sorted(sorted(g) for g in groups.values())
