"""Rule-based event coreference over structured event descriptions.

Typical use::

    from evcoref import load_profiles, load_rules, load_corpus, evaluate, clusters
    profiles = load_profiles()
    corpus = load_corpus("topic.jsonl", profiles)
    graph = evaluate(corpus, load_rules(store=profiles), profiles)
    response = clusters(graph, "combined")
"""

from .baseline import lemma_baseline, lemma_filter
from .cluster import clusters
from .corpus import Corpus, corpus_stats, load_corpus, save_corpus
from .engine import CorefGraph, EngineConfig, evaluate, explain, measure
from .metrics import Partition, PartitionScore, b_cubed, blanc, ceaf_m, muc, score, score_run
from .model import CorefEdge, EntityRef, EventDescription, Participant, PlaceSpec, TimeSpec
from .ontology import ProfileStore, load_profiles
from .ruledsl import RuleSet, load_rules, rule_count_report

__version__ = "0.1.0"

__all__ = [
    "Corpus", "CorefEdge", "CorefGraph", "EngineConfig", "EntityRef", "EventDescription",
    "Participant", "Partition", "PartitionScore", "PlaceSpec", "ProfileStore", "RuleSet",
    "TimeSpec", "b_cubed", "blanc", "ceaf_m", "clusters", "corpus_stats", "evaluate",
    "explain", "lemma_baseline", "lemma_filter", "load_corpus", "load_profiles", "load_rules",
    "measure", "muc", "rule_count_report", "save_corpus", "score", "score_run",
]
