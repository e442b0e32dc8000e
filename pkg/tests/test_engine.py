import random
import warnings

import pytest

from evcoref.engine import EngineConfig, evaluate, explain, measure, parse_graph
from evcoref.errors import NoEdge, UnknownEventTypeWarning
from evcoref.model import EventDescription, Participant, TimeSpec, normalize_entity

from helpers import oracle_fixpoint, random_events


def ev(eid, etype, roles=(), time=None, subs=(), topic="t", doc="d"):
    parts = frozenset(Participant(r, normalize_entity(e)) for r, e in roles)
    return EventDescription(eid, etype, "x", doc, topic, parts,
                            TimeSpec.parse(time) if time else None, None, frozenset(subs))


def as_oracle(graph):
    return {k: (e.rule_id, e.iteration) for k, e in graph.edges.items()}


def test_shared_victim_gives_certain_edge(rules, profiles):
    a = ev("a", "Killing", [("Victim", "dbpedia:John_Lennon")])
    b = ev("b", "Killing", [("Victim", "dbpedia:John_Lennon")])
    g = evaluate([a, b], rules, profiles)
    assert g.certain_edges == {("a", "b")}
    assert g.edge("b", "a", "certain").rule_id == "Killing.certain.1"
    assert g.possible_edges == frozenset()


def test_single_event(rules, profiles):
    g = evaluate([ev("a", "Killing")], rules, profiles)
    assert g.edges == {} and g.rounds == 1


def test_empty_corpus(rules):
    g = evaluate([], rules)
    assert g.counts() == {"certain": 0, "possible": 0} and g.rounds == 0


def test_subevent_fixture(subevent_corpus, rules, profiles):
    g = evaluate(subevent_corpus, rules, profiles)
    s = g.edge("S1", "S2", "certain")
    k = g.edge("K1", "K2", "certain")
    assert (s.rule_id, s.iteration) == ("Shooting.certain.1", 1)
    assert (k.rule_id, k.iteration) == ("Killing.certain.2", 2)
    assert g.rounds == 3


def test_explain_subevent_trace(subevent_corpus, rules, profiles):
    g = evaluate(subevent_corpus, rules, profiles)
    trace = explain(g, "K1", "K2")
    assert [(d.rule_id, d.iteration) for d in trace] == [("Shooting.certain.1", 1),
                                                         ("Killing.certain.2", 2)]
    sub = trace[1].bindings[0]
    assert sub.witness == ("S1", "S2", "certain")


def test_explain_single_step(rules, profiles):
    a = ev("a", "Killing", [("Victim", "v")])
    b = ev("b", "Killing", [("Victim", "v")])
    g = evaluate([a, b], rules, profiles)
    (d,) = explain(g, "a", "b")
    assert d.rule_id == "Killing.certain.1"
    assert d.bindings[0].e1_value == d.bindings[0].e2_value == "v"


def test_explain_no_edge(rules, profiles):
    g = evaluate([ev("a", "Killing"), ev("b", "Killing")], rules, profiles)
    with pytest.raises(NoEdge):
        explain(g, "a", "b")


def test_certain_subevent_ignores_possible_edges(rules, profiles):
    # S1/S2 only possibly corefer (agent+goal, no time), so the parents stay unlinked
    s1 = ev("S1", "Shooting", [("Agent", "g"), ("Goal", "v")])
    s2 = ev("S2", "Shooting", [("Agent", "g"), ("Goal", "v")])
    k1 = ev("K1", "Killing", subs=["S1"])
    k2 = ev("K2", "Killing", subs=["S2"])
    g = evaluate([s1, s2, k1, k2], rules, profiles)
    assert g.has_edge("S1", "S2", "possible") and not g.has_edge("S1", "S2", "certain")
    assert not g.has_edge("K1", "K2")
    cfg = EngineConfig(certain_subevent_sources=("certain", "possible"))
    g2 = evaluate([s1, s2, k1, k2], rules, profiles, config=cfg)
    assert g2.has_edge("K1", "K2", "certain")


def test_shared_subevent_satisfies_hascoref(rules, profiles):
    k1 = ev("K1", "Killing", subs=["S"])
    k2 = ev("K2", "Killing", subs=["S"])
    g = evaluate([k1, k2, ev("S", "Shooting")], rules, profiles)
    assert g.edge("K1", "K2", "certain").iteration == 1


def test_cross_type_flag(rules, profiles):
    k = ev("k", "Killing", [("Victim", "lennon")])
    d = ev("d", "Dying", [("Protagonist", "lennon")])
    assert not evaluate([k, d], rules, profiles).has_edge("k", "d")
    g = evaluate([d, k], rules, profiles, config=EngineConfig(enable_cross_type=True))
    assert g.edge("k", "d", "certain").rule_id == "Killing/Dying.certain.1"


@pytest.mark.parametrize("scope", ["within_document", "within_topic", "cross_topic"])
def test_scopes(rules, profiles, scope):
    evs = [ev("a", "Killing", [("Victim", "v")], topic="t1", doc="d1"),
           ev("b", "Killing", [("Victim", "v")], topic="t1", doc="d2"),
           ev("c", "Killing", [("Victim", "v")], topic="t2", doc="d3")]
    g = evaluate(evs, rules, profiles, scope=scope)
    expected = {"within_document": set(), "within_topic": {("a", "b")},
                "cross_topic": {("a", "b"), ("a", "c"), ("b", "c")}}[scope]
    assert set(g.certain_edges) == expected


def test_unknown_type_is_skipped(rules, profiles):
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        g = evaluate([ev("a", "Eating"), ev("b", "Eating")], rules, profiles)
    assert g.skipped == ("a", "b") and g.edges == {}
    assert any(issubclass(i.category, UnknownEventTypeWarning) for i in w)


def test_measure(rules, profiles):
    a = ev("a", "Killing", [("Victim", "v"), ("Killer", "k")], time="2001")
    b = ev("b", "Killing", [("Victim", "v"), ("Killer", "k")], time="2001")
    c = ev("c", "Killing", [("Killer", "k")], time="2001")
    d = ev("d", "Killing")
    g = evaluate([a, b, c, d], rules, profiles)
    assert measure(g, "a", "b").value == 1.0
    assert measure(g, "a", "c").value == 0.5
    assert measure(g, "a", "c", possible_weight=0.25).value == 0.25
    assert measure(g, "a", "d").value == 0.0


def test_serialize_round_trip(lennon, rules, profiles):
    g = evaluate(lennon, rules, profiles)
    text = g.serialize()
    assert text == "m1 certain m3 Killing.certain.1\nm2 possible m4 Shooting.possible.3\n"
    assert {(e.a, e.b, e.strength, e.rule_id) for e in parse_graph(text)} == \
        {(e.a, e.b, e.strength, e.rule_id) for e in g.edges.values()}


def test_order_independence(rules, profiles):
    rng = random.Random(7)
    for _ in range(20):
        evs = random_events(rng, profiles)
        g1 = evaluate(evs, rules, profiles)
        g2 = evaluate(list(reversed(evs)), rules, profiles)
        assert g1.serialize() == g2.serialize()
        assert g1.derivation_log() == g2.derivation_log()


@pytest.mark.parametrize("seed", range(40))
def test_matches_oracle(rules, profiles, seed):
    rng = random.Random(seed)
    evs = random_events(rng, profiles)
    scope = rng.choice(["within_document", "within_topic", "cross_topic"])
    cross = rng.random() < 0.3
    g = evaluate(evs, rules, profiles, config=EngineConfig(scope, cross))
    edges, rounds = oracle_fixpoint(evs, rules, scope, cross)
    assert as_oracle(g) == edges
    assert g.rounds == rounds


def test_monotone_rounds(rules, profiles):
    rng = random.Random(99)
    for _ in range(30):
        evs = random_events(rng, profiles)
        seen = []
        evaluate(evs, rules, profiles, on_round=lambda n, e: seen.append(e))
        for before, after in zip(seen, seen[1:]):
            assert before <= after
        if len(seen) >= 2:
            assert seen[-1] == seen[-2]
