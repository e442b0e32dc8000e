"""Coreference scores: MUC, B-cubed, mention-based CEAF and BLANC.

All four are computed from the contingency matrix between key blocks (rows)
and response blocks (columns). A precision or recall whose denominator is
zero follows one convention throughout: when key and response both have
nothing of the counted kind the side scores 1, otherwise 0.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import TooFewMentions, TopicMismatch, UniverseMismatch

METRICS = ("muc", "b3", "ceafm", "blanc")
METRIC_TITLES = {"muc": "MUC", "b3": "B3", "ceafm": "CEAF (M)", "blanc": "BLANC"}


class Partition:
    """Disjoint non-empty blocks of mention ids covering ``universe``."""

    __slots__ = ("blocks", "universe", "block_of")

    def __init__(self, blocks: Iterable[Iterable[str]], universe: Iterable[str] | None = None):
        canon = []
        block_of: dict[str, int] = {}
        for raw in blocks:
            block = frozenset(raw)
            if not block:
                raise ValueError("empty block")
            canon.append(block)
        canon.sort(key=lambda b: sorted(b))
        for i, block in enumerate(canon):
            for m in block:
                if m in block_of:
                    raise ValueError(f"mention {m!r} appears in two blocks")
                block_of[m] = i
        covered = frozenset(block_of)
        if universe is not None:
            universe = frozenset(universe)
            extra = covered - universe
            if extra:
                raise UniverseMismatch(f"blocks mention ids outside the universe: "
                                       f"{sorted(extra)[:5]}")
            for m in sorted(universe - covered):
                block_of[m] = len(canon)
                canon.append(frozenset((m,)))
        self.blocks: tuple[frozenset[str], ...] = tuple(canon)
        self.universe: frozenset[str] = covered if universe is None else universe
        self.block_of: dict[str, int] = block_of

    @classmethod
    def singletons(cls, ids: Iterable[str]) -> "Partition":
        return cls(([m] for m in ids))

    def __eq__(self, other):
        if isinstance(other, Partition):
            return self.universe == other.universe and set(self.blocks) == set(other.blocks)
        return NotImplemented

    __hash__ = None

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.sorted_blocks())

    def __repr__(self):
        return f"Partition({[sorted(b) for b in self.sorted_blocks()]})"

    def sorted_blocks(self) -> list[list[str]]:
        return sorted(sorted(b) for b in self.blocks)

    def restrict(self, ids: Iterable[str]) -> "Partition":
        keep = frozenset(ids)
        return Partition((b & keep for b in self.blocks if b & keep), keep)

    def links(self) -> int:
        return sum(len(b) * (len(b) - 1) // 2 for b in self.blocks)


@dataclass(frozen=True)
class PartitionScore:
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_pr(cls, p: float, r: float) -> "PartitionScore":
        return cls(p, r, f1(p, r))

    def as_percent(self) -> tuple[float, float, float]:
        return tuple(round(100.0 * x, 2) for x in (self.precision, self.recall, self.f1))

    def to_dict(self) -> dict[str, float]:
        return {"p": self.precision, "r": self.recall, "f1": self.f1}


def f1(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def _ratios(p_num, p_den, r_num, r_den) -> tuple[float, float]:
    if p_den == 0 and r_den == 0:
        return 1.0, 1.0
    p = p_num / p_den if p_den else 0.0
    r = r_num / r_den if r_den else 0.0
    return p, r


def _check_universe(response: Partition, key: Partition) -> None:
    if response.universe != key.universe:
        only_r = sorted(response.universe - key.universe)[:5]
        only_k = sorted(key.universe - response.universe)[:5]
        raise UniverseMismatch(f"response-only mentions {only_r}, key-only mentions {only_k}")


def contingency_matrix(response: Partition, key: Partition) -> np.ndarray:
    """Overlap counts: rows are key blocks, columns response blocks."""
    _check_universe(response, key)
    ids = sorted(key.universe)
    k_lab = np.fromiter((key.block_of[m] for m in ids), dtype=np.int64, count=len(ids))
    r_lab = np.fromiter((response.block_of[m] for m in ids), dtype=np.int64, count=len(ids))
    return _kernels.contingency(k_lab, r_lab, len(key.blocks), len(response.blocks))


# --- counts ---------------------------------------------------------------
# Each *_counts returns numerators/denominators so topics can be pooled.

def _muc_counts(c: np.ndarray) -> tuple[float, float, float, float]:
    nz = c > 0
    key_sizes, resp_sizes = c.sum(axis=1), c.sum(axis=0)
    r_num = float((key_sizes - nz.sum(axis=1)).sum())
    r_den = float((key_sizes - 1).sum())
    p_num = float((resp_sizes - nz.sum(axis=0)).sum())
    p_den = float((resp_sizes - 1).sum())
    return p_num, p_den, r_num, r_den


def _b3_counts(c: np.ndarray) -> tuple[float, float, float, float]:
    sq = c.astype(np.float64) ** 2
    key_sizes, resp_sizes = c.sum(axis=1), c.sum(axis=0)
    n = float(c.sum())
    r_num = float((sq.sum(axis=1) / np.maximum(key_sizes, 1)).sum())
    p_num = float((sq.sum(axis=0) / np.maximum(resp_sizes, 1)).sum())
    return p_num, n, r_num, n


def _ceafm_counts(c: np.ndarray) -> tuple[float, float, float, float]:
    _, total = _kernels.max_weight_assignment(c)
    return total, float(c.sum()), total, float(c.sum())


def _pairs(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    return x * (x - 1) // 2


def _blanc_counts(c: np.ndarray) -> tuple[int, int, int, int, int, int]:
    """(both coref, key coref, response coref, both non-coref, key non-coref, response non-coref)."""
    n = int(c.sum())
    total = n * (n - 1) // 2
    key_c = int(_pairs(c.sum(axis=1)).sum())
    resp_c = int(_pairs(c.sum(axis=0)).sum())
    both_c = int(_pairs(c).sum())
    key_n, resp_n = total - key_c, total - resp_c
    both_n = total - key_c - resp_c + both_c
    return both_c, key_c, resp_c, both_n, key_n, resp_n


def _score_counts(metric: str, counts) -> PartitionScore:
    if metric == "blanc":
        both_c, key_c, resp_c, both_n, key_n, resp_n = counts
        pc, rc = _ratios(both_c, resp_c, both_c, key_c)
        pn, rn = _ratios(both_n, resp_n, both_n, key_n)
        return PartitionScore((pc + pn) / 2, (rc + rn) / 2, (f1(pc, rc) + f1(pn, rn)) / 2)
    return PartitionScore.from_pr(*_ratios(*counts))


_COUNTERS = {"muc": _muc_counts, "b3": _b3_counts, "ceafm": _ceafm_counts,
             "blanc": _blanc_counts}


def muc(response: Partition, key: Partition) -> PartitionScore:
    """Link-based MUC score."""
    return _score_counts("muc", _muc_counts(contingency_matrix(response, key)))


def b_cubed(response: Partition, key: Partition) -> PartitionScore:
    return _score_counts("b3", _b3_counts(contingency_matrix(response, key)))


def ceaf_m(response: Partition, key: Partition) -> PartitionScore:
    """Mention-based CEAF: best one-to-one block alignment by overlap size."""
    return _score_counts("ceafm", _ceafm_counts(contingency_matrix(response, key)))


def blanc(response: Partition, key: Partition) -> PartitionScore:
    """Mean of the coreference-link and non-coreference-link scores."""
    c = contingency_matrix(response, key)
    if c.sum() < 2:
        raise TooFewMentions("BLANC needs at least two mentions")
    return _score_counts("blanc", _blanc_counts(c))


def ceaf_m_alignment(response: Partition, key: Partition
                     ) -> list[tuple[frozenset[str], frozenset[str]]]:
    """The optimal CEAF-M alignment, lexicographically smallest among optima.

    Blocks are ordered by their sorted member lists; the alignment is the
    response-block index chosen for each key block in turn, with an
    unaligned key block ranking after every real response block.
    """
    _check_universe(response, key)
    kb = sorted(key.blocks, key=lambda b: sorted(b))
    rb = sorted(response.blocks, key=lambda b: sorted(b))
    w = np.array([[len(a & b) for b in rb] for a in kb], dtype=np.float64).reshape(len(kb),
                                                                                   len(rb))
    if w.size == 0:
        return []
    n = max(w.shape)
    sq = np.zeros((n, n))
    sq[: w.shape[0], : w.shape[1]] = w
    _, best = _kernels.max_weight_assignment(sq)

    free_rows, free_cols = list(range(n)), list(range(n))
    chosen: dict[int, int] = {}
    gained = 0.0
    for i in range(n):
        free_rows.remove(i)
        for j in free_cols:
            rest_cols = [c for c in free_cols if c != j]
            sub = sq[np.ix_(free_rows, rest_cols)] if free_rows else np.zeros((0, 0))
            rest = _kernels.max_weight_assignment(sub)[1] if sub.size else 0.0
            if gained + sq[i, j] + rest == best:
                chosen[i] = j
                gained += sq[i, j]
                free_cols.remove(j)
                break
    return [(kb[i], rb[j]) for i, j in sorted(chosen.items())
            if i < len(kb) and j < len(rb)]


def score(response: Partition, key: Partition, metrics: Sequence[str] = METRICS
          ) -> dict[str, PartitionScore]:
    c = contingency_matrix(response, key)
    return {m: _score_counts(m, _COUNTERS[m](c)) for m in metrics}


def score_run(responses: Mapping[str, Partition], keys: Mapping[str, Partition],
              metrics: Sequence[str] = METRICS, average: str = "micro"
              ) -> dict[str, PartitionScore]:
    """Score per-topic responses against per-topic keys.

    ``micro`` pools numerators and denominators over topics before dividing;
    ``macro`` averages per-topic precision, recall and F1.
    """
    if set(responses) != set(keys):
        raise TopicMismatch(
            f"response topics {sorted(set(responses) - set(keys))} not in key; key topics "
            f"{sorted(set(keys) - set(responses))} not in response")
    for m in metrics:
        if m not in METRICS:
            raise ValueError(f"unknown metric {m!r}")
    if average not in ("micro", "macro"):
        raise ValueError(f"unknown averaging {average!r}")

    mats = {t: contingency_matrix(responses[t], keys[t]) for t in sorted(keys)}
    out: dict[str, PartitionScore] = {}
    for m in metrics:
        counter = _COUNTERS[m]
        if average == "micro":
            pooled = None
            for c in mats.values():
                cnt = counter(c)
                pooled = cnt if pooled is None else tuple(a + b for a, b in zip(pooled, cnt))
            if pooled is None:
                pooled = (0,) * (6 if m == "blanc" else 4)
            out[m] = _score_counts(m, pooled)
        else:
            per = [_score_counts(m, counter(c)) for c in mats.values()
                   if m != "blanc" or c.sum() >= 2]
            if not per:
                out[m] = PartitionScore(1.0, 1.0, 1.0)
            else:
                out[m] = PartitionScore(*(float(np.mean([getattr(s, f) for s in per]))
                                          for f in ("precision", "recall", "f1")))
    return out


# --- reports ----------------------------------------------------------------

def format_table(rows: Mapping[str, Mapping[str, PartitionScore]],
                 metrics: Sequence[str] = METRICS) -> str:
    """Aligned text table: one row per run, p/r/F1 per metric, in percent."""
    label_w = max([12] + [len(r) for r in rows])
    cell = 7
    group_w = 3 * cell + 2
    head1 = " " * label_w + " |" + "|".join(f"{METRIC_TITLES[m]:^{group_w}}" for m in metrics)
    head2 = " " * label_w + " |" + "|".join(
        f"{'p':>{cell}}{'r':>{cell}}{'F1':>{cell}}  " for _ in metrics)
    lines = [head1.rstrip(), head2.rstrip(), "-" * len(head2.rstrip())]
    for label, res in rows.items():
        cells = []
        for m in metrics:
            p, r, f = res[m].as_percent()
            cells.append(f"{p:>{cell}.2f}{r:>{cell}.2f}{f:>{cell}.2f}  ")
        lines.append((f"{label:<{label_w}} |" + "|".join(cells)).rstrip())
    return "\n".join(lines) + "\n"


def table_to_json(rows: Mapping[str, Mapping[str, PartitionScore]]) -> str:
    data = {label: {m: {k: round(100.0 * v, 2) for k, v in s.to_dict().items()}
                    for m, s in res.items()}
            for label, res in rows.items()}
    return json.dumps(data, indent=2, sort_keys=False) + "\n"


def isclose_score(a: PartitionScore, b: PartitionScore, tol: float = 1e-9) -> bool:
    return all(math.isclose(x, y, abs_tol=tol) for x, y in
               zip((a.precision, a.recall, a.f1), (b.precision, b.recall, b.f1)))
