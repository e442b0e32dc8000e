"""Equality (``==``) and compatibility (``~``) between feature values.

Every comparator is symmetric and treats a missing side as a mismatch.
"""

from __future__ import annotations

from typing import Collection

from .model import GRANULARITIES, EntityRef, PlaceSpec, TimeSpec


def entity_eq(a: EntityRef | None, b: EntityRef | None) -> bool:
    if a is None or b is None:
        return False
    return a.id == b.id


def role_eq(a: Collection[EntityRef], b: Collection[EntityRef]) -> bool:
    """True when some entity filling ``a`` equals some entity filling ``b``."""
    if not a or not b:
        return False
    return not {e.id for e in a}.isdisjoint(e.id for e in b)


# the two names read better at their call sites in the rule tables
tool_eq = role_eq


def time_eq(a: TimeSpec | None, b: TimeSpec | None) -> bool:
    if a is None or b is None:
        return False
    return a.granularity == b.granularity and a.start == b.start and a.end == b.end


def time_compat(a: TimeSpec | None, b: TimeSpec | None) -> bool:
    """Intervals intersect once both are expressed at the coarser granularity."""
    if a is None or b is None:
        return False
    coarse = GRANULARITIES[min(a.level, b.level)]
    a_lo, a_hi = a.truncated(coarse)
    b_lo, b_hi = b.truncated(coarse)
    return a_lo <= b_hi and b_lo <= a_hi


def place_eq(a: PlaceSpec | None, b: PlaceSpec | None) -> bool:
    if a is None or b is None:
        return False
    return entity_eq(a.id, b.id)


def place_compat(a: PlaceSpec | None, b: PlaceSpec | None) -> bool:
    """Same place, or one place lies within the other's ancestry."""
    if a is None or b is None:
        return False
    return a.id == b.id or a.id in b.ancestry or b.id in a.ancestry
