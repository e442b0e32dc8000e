"""Lemma-match baseline: mentions sharing a predicate lemma corefer."""

from __future__ import annotations

from typing import Iterable

from .engine import SCOPES, Scope, events_of, scope_key
from .errors import MissingLemma
from .metrics import Partition


def lemma_baseline(corpus, scope: Scope = "within_topic") -> Partition:
    """One block per exact (case-sensitive) lemma within each scope group."""
    if scope not in SCOPES:
        raise ValueError(f"unknown scope {scope!r}")
    groups: dict[tuple, list[str]] = {}
    for ev in events_of(corpus):
        if not isinstance(ev.lemma, str) or not ev.lemma:
            raise MissingLemma(f"{ev.id}: no lemma")
        groups.setdefault(scope_key(ev, scope) + (ev.lemma,), []).append(ev.id)
    return Partition(groups.values())


def lemma_filter(corpus, lexicon: Iterable[str]):
    """Keep only mentions whose lemma is in ``lexicon``."""
    lex = frozenset(lexicon)
    if hasattr(corpus, "filter"):
        return corpus.filter(lambda ev: ev.lemma in lex)
    return [ev for ev in corpus if ev.lemma in lex]


def surviving_lemmas(corpus) -> frozenset[str]:
    return frozenset(ev.lemma for ev in events_of(corpus))
