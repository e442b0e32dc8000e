"""Event descriptions and the identifiers shared across the package.

An event description carries the four features of a happening: its type,
its roled participants, its time and its place. Missing time or place is
``None``; there are no sentinel values.
"""

from __future__ import annotations

import datetime as _dt
import re
from dataclasses import dataclass, field
from typing import Literal

from .errors import EmptyIdentifier

Strength = Literal["certain", "possible"]
CERTAIN: Strength = "certain"
POSSIBLE: Strength = "possible"
STRENGTHS: tuple[Strength, ...] = (CERTAIN, POSSIBLE)

# coarse -> fine
GRANULARITIES = ("year", "month", "day", "hour", "minute")

_SCHEME_RE = re.compile(r"^([A-Za-z][A-Za-z0-9+.\-]*):(.+)$", re.DOTALL)


@dataclass(frozen=True, order=True)
class EntityRef:
    id: str
    surface: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.id:
            raise EmptyIdentifier("entity id must be non-empty")

    def __str__(self):
        return self.id


def normalize_entity(raw: str, surface: str | None = None) -> EntityRef:
    """Normalize a raw identifier into an :class:`EntityRef`.

    Surrounding whitespace is trimmed. A prefixed identifier (``prefix:local``)
    gets its prefix lower-cased and its local part kept as is; an identifier
    without a prefix is case-folded as a whole. Percent escapes are left alone.

    >>> normalize_entity("DBPEDIA:Paris").id
    'dbpedia:Paris'
    """
    if isinstance(raw, EntityRef):
        return raw
    text = raw.strip()
    if not text:
        raise EmptyIdentifier(f"empty identifier: {raw!r}")
    m = _SCHEME_RE.match(text)
    if m:
        norm = m.group(1).lower() + ":" + m.group(2)
    else:
        norm = text.casefold()
    return EntityRef(norm, surface)


@dataclass(frozen=True)
class TimeSpec:
    """A calendar interval at a declared granularity.

    ``start`` and ``end`` are integer tuples truncated to the granularity,
    e.g. ``(1980, 12)`` for month granularity.
    """

    start: tuple[int, ...]
    end: tuple[int, ...]
    granularity: str

    def __post_init__(self):
        if self.granularity not in GRANULARITIES:
            raise ValueError(f"unknown granularity {self.granularity!r}")
        n = GRANULARITIES.index(self.granularity) + 1
        for label, inst in (("start", self.start), ("end", self.end)):
            if len(inst) != n:
                raise ValueError(f"{label} {inst!r} does not match granularity {self.granularity}")
            _check_instant(inst)
        if tuple(self.start) > tuple(self.end):
            raise ValueError(f"start {self.start!r} after end {self.end!r}")
        object.__setattr__(self, "start", tuple(self.start))
        object.__setattr__(self, "end", tuple(self.end))

    @property
    def level(self) -> int:
        return GRANULARITIES.index(self.granularity)

    def truncated(self, granularity: str) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Bounds of this interval expressed at a coarser granularity."""
        n = GRANULARITIES.index(granularity) + 1
        if n > len(self.start):
            raise ValueError(f"cannot refine {self.granularity} to {granularity}")
        return self.start[:n], self.end[:n]

    @classmethod
    def parse(cls, text: str) -> "TimeSpec":
        text = text.strip()
        if "/" in text:
            lo, hi = text.split("/", 1)
            a, ga = _parse_instant(lo)
            b, gb = _parse_instant(hi)
            if ga != gb:
                raise ValueError(f"interval bounds at different granularities: {text!r}")
            return cls(a, b, ga)
        a, g = _parse_instant(text)
        return cls(a, a, g)

    def to_iso(self) -> str:
        lo = _format_instant(self.start)
        if self.start == self.end:
            return lo
        return lo + "/" + _format_instant(self.end)

    def __str__(self):
        return self.to_iso()


_INSTANT_RE = re.compile(
    r"^(\d{4})(?:-(\d{2})(?:-(\d{2})(?:T(\d{2})(?::(\d{2}))?)?)?)?$"
)


def _parse_instant(text: str) -> tuple[tuple[int, ...], str]:
    m = _INSTANT_RE.match(text.strip())
    if not m:
        raise ValueError(f"not an ISO-8601 truncated date: {text!r}")
    parts = tuple(int(g) for g in m.groups() if g is not None)
    _check_instant(parts)
    return parts, GRANULARITIES[len(parts) - 1]


def _check_instant(parts: tuple[int, ...]) -> None:
    year = parts[0]
    month = parts[1] if len(parts) > 1 else 1
    day = parts[2] if len(parts) > 2 else 1
    hour = parts[3] if len(parts) > 3 else 0
    minute = parts[4] if len(parts) > 4 else 0
    _dt.datetime(year, month, day, hour, minute)  # raises ValueError


def _format_instant(parts: tuple[int, ...]) -> str:
    out = f"{parts[0]:04d}"
    if len(parts) > 1:
        out += f"-{parts[1]:02d}"
    if len(parts) > 2:
        out += f"-{parts[2]:02d}"
    if len(parts) > 3:
        out += f"T{parts[3]:02d}"
    if len(parts) > 4:
        out += f":{parts[4]:02d}"
    return out


@dataclass(frozen=True)
class PlaceSpec:
    id: EntityRef
    ancestry: tuple[EntityRef, ...] = ()

    def __post_init__(self):
        anc = tuple(self.ancestry)
        if len(set(anc)) != len(anc):
            raise ValueError(f"duplicate entries in ancestry of {self.id}")
        if self.id in anc:
            raise ValueError(f"place {self.id} listed in its own ancestry")
        object.__setattr__(self, "ancestry", anc)

    def contains_or_is(self, other: EntityRef) -> bool:
        return other == self.id or other in self.ancestry


@dataclass(frozen=True, order=True)
class Participant:
    role: str
    entity: EntityRef


@dataclass(frozen=True)
class EventDescription:
    id: str
    event_type: str
    lemma: str
    doc_id: str
    topic_id: str
    participants: frozenset[Participant] = frozenset()
    time: TimeSpec | None = None
    place: PlaceSpec | None = None
    subevents: frozenset[str] = frozenset()

    def __post_init__(self):
        if not self.id or any(c.isspace() for c in self.id):
            raise ValueError(f"mention id must be non-empty without whitespace: {self.id!r}")
        if not self.event_type:
            raise ValueError(f"{self.id}: event_type is required")
        object.__setattr__(self, "participants", frozenset(self.participants))
        object.__setattr__(self, "subevents", frozenset(self.subevents))
        if self.id in self.subevents:
            raise ValueError(f"{self.id}: event listed as its own subevent")

    def role(self, name: str) -> frozenset[EntityRef]:
        """Entities filling role ``name`` (empty when unfilled)."""
        return frozenset(p.entity for p in self.participants if p.role == name)

    @property
    def roles(self) -> frozenset[str]:
        return frozenset(p.role for p in self.participants)


def pair_key(a: str, b: str) -> tuple[str, str]:
    """Canonical unordered pair."""
    if a == b:
        raise ValueError(f"self pair {a!r}")
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class CorefEdge:
    a: str
    b: str
    strength: Strength
    rule_id: str
    iteration: int

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError("coreference edge endpoints must differ")
        if self.strength not in STRENGTHS:
            raise ValueError(f"unknown strength {self.strength!r}")
        if self.a > self.b:
            a, b = self.b, self.a
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "b", b)

    @property
    def pair(self) -> tuple[str, str]:
        return (self.a, self.b)


@dataclass(frozen=True)
class CorefMeasureValue:
    value: float

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"coreference measure outside [0, 1]: {self.value}")

    def __float__(self):
        return float(self.value)
