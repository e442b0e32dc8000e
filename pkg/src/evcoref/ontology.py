"""Event type profiles and the identity constraints they imply.

A profile is the machine-readable form of one ontological analysis table:
classification, participant classes, status conditions, related events and
repeatability. Only repeatability and participant cardinality are enforced;
the remaining rows are kept as tagged strings.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

import yaml

from .compat import place_eq, time_eq
from .errors import DuplicateProfile, ParseError, UnknownEventTypeWarning, UnknownRoleReference
from .model import EventDescription

CLASSIFICATIONS = ("accomplishment", "achievement")
TEMPORAL_REGIONS = ("atomic", "interval")
MODALITIES = ("possible", "necessary", "unspecified")
ROLE_CLASSES = ("active", "passive", "tool")
ANCHORS = ("active", "passive", "spatiotemporal")
MULTIPLICITIES = ("at_most_one", "many")

_REQUIRED = ("type", "classification", "temporal_region")
_KNOWN_KEYS = {
    "type", "classification", "active_participants", "passive_participants",
    "tool_participants", "subevents", "sovraevents", "status_before", "status_during",
    "status_after", "caused_events", "symmetrical_events", "incompatible_events",
    "participant_cardinality", "spatial_rule", "temporal_region", "repeatability",
}


@dataclass(frozen=True)
class RoleSpec:
    role: str
    kind: str = ""


@dataclass(frozen=True)
class RelatedEvent:
    event: str
    modality: str = "unspecified"
    direction: str = "causes"


@dataclass(frozen=True)
class RepeatabilityConstraint:
    anchor: str
    multiplicity: str

    def __post_init__(self):
        if self.anchor not in ANCHORS:
            raise ValueError(f"unknown repeatability anchor {self.anchor!r}")
        if self.multiplicity not in MULTIPLICITIES:
            raise ValueError(f"unknown multiplicity {self.multiplicity!r}")


@dataclass(frozen=True)
class EventTypeProfile:
    type_name: str
    classification: str
    temporal_region: str
    active_roles: tuple[RoleSpec, ...] = ()
    passive_roles: tuple[RoleSpec, ...] = ()
    tool_roles: tuple[RoleSpec, ...] = ()
    subevent_types: tuple[RelatedEvent, ...] = ()
    sovraevent_types: tuple[RelatedEvent, ...] = ()
    status_before: tuple[str, ...] = ()
    status_during: tuple[str, ...] = ()
    status_after: tuple[str, ...] = ()
    caused_events: tuple[RelatedEvent, ...] = ()
    symmetrical_events: tuple[RelatedEvent, ...] = ()
    incompatible_events: tuple[RelatedEvent, ...] = ()
    participant_cardinality: tuple[tuple[str, int], ...] = ()
    spatial_rule: tuple[str, ...] = ()
    repeatability: tuple[RepeatabilityConstraint, ...] = ()

    def roles_of(self, role_class: str) -> tuple[str, ...]:
        specs = {"active": self.active_roles, "passive": self.passive_roles,
                 "tool": self.tool_roles}[role_class]
        return tuple(s.role for s in specs)

    @property
    def all_roles(self) -> frozenset[str]:
        return frozenset(s.role for s in self.active_roles + self.passive_roles + self.tool_roles)

    def role_class(self, role: str) -> str | None:
        for cls in ROLE_CLASSES:
            if role in self.roles_of(cls):
                return cls
        return None

    def multiplicity(self, anchor: str) -> str:
        for c in self.repeatability:
            if c.anchor == anchor:
                return c.multiplicity
        return "many"


class ProfileStore(Mapping[str, EventTypeProfile]):
    """Read-only mapping from type name to profile, in file order."""

    def __init__(self, profiles: Iterable[EventTypeProfile] = ()):
        data: dict[str, EventTypeProfile] = {}
        for p in profiles:
            if p.type_name in data:
                raise DuplicateProfile(f"duplicate profile {p.type_name!r}")
            data[p.type_name] = p
        self._data = MappingProxyType(data)

    def __getitem__(self, key: str) -> EventTypeProfile:
        return self._data[key]

    def __iter__(self) -> Iterator[str]:
        return iter(self._data)

    def __len__(self) -> int:
        return len(self._data)

    def __eq__(self, other):
        if isinstance(other, ProfileStore):
            return list(self._data.items()) == list(other._data.items())
        return NotImplemented

    __hash__ = None

    def __repr__(self):
        return f"ProfileStore({list(self._data)})"


DEFAULT_PROFILES = "profiles.yaml"


def default_profiles_path() -> Path:
    return Path(str(resources.files("evcoref") / "data" / DEFAULT_PROFILES))


def load_profiles(source: str | Path | None = None, *, text: str | None = None) -> ProfileStore:
    """Load a profile file (defaults to the shipped six profiles)."""
    if text is None:
        path = Path(source) if source is not None else default_profiles_path()
        text = path.read_text(encoding="utf-8")
        name = str(path)
    else:
        name = str(source) if source is not None else "<string>"
    return parse_profiles(text, name)


def parse_profiles(text: str, source: str = "<string>") -> ProfileStore:
    loader = yaml.SafeLoader(text)
    profiles: list[EventTypeProfile] = []
    seen: dict[str, int] = {}
    try:
        while loader.check_node():
            node = loader.get_node()
            if node is None:
                continue
            data = loader.construct_document(node)
            if data is None:
                continue
            line = node.start_mark.line + 1
            prof = _build_profile(data, node, source)
            if prof.type_name in seen:
                raise DuplicateProfile(
                    f"{source}:{line}: profile {prof.type_name!r} already defined at line "
                    f"{seen[prof.type_name]}")
            seen[prof.type_name] = line
            profiles.append(prof)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        raise ParseError(exc.problem or str(exc), source,
                         mark.line + 1 if mark else None,
                         mark.column + 1 if mark else None) from exc
    finally:
        loader.dispose()
    return ProfileStore(profiles)


def _key_line(node, key: str) -> int:
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            if getattr(k, "value", None) == key:
                return v.start_mark.line + 1
    return node.start_mark.line + 1


def _build_profile(data, node, source: str) -> EventTypeProfile:
    def fail(key: str, msg: str, exc=ParseError):
        line = _key_line(node, key)
        if exc is ParseError:
            return ParseError(f"{key}: {msg}", source, line)
        return exc(f"{source}:{line}: {key}: {msg}")

    if not isinstance(data, dict):
        raise ParseError("profile document must be a mapping", source, node.start_mark.line + 1)
    for key in _REQUIRED:
        if key not in data:
            raise fail(key, "required field missing")
    unknown = set(data) - _KNOWN_KEYS
    if unknown:
        key = sorted(unknown)[0]
        raise fail(key, "unknown field")
    type_name = data["type"]
    if not isinstance(type_name, str) or not type_name.strip():
        raise fail("type", "must be a non-empty string")
    if data["classification"] not in CLASSIFICATIONS:
        raise fail("classification", f"expected one of {CLASSIFICATIONS}")
    if data["temporal_region"] not in TEMPORAL_REGIONS:
        raise fail("temporal_region", f"expected one of {TEMPORAL_REGIONS}")

    def roles(key):
        out = []
        for item in data.get(key) or ():
            if isinstance(item, str):
                item = {"role": item}
            if not isinstance(item, dict) or not item.get("role"):
                raise fail(key, "entries need a 'role'")
            out.append(RoleSpec(str(item["role"]), str(item.get("kind", ""))))
        return tuple(out)

    def related(key):
        out = []
        for item in data.get(key) or ():
            if isinstance(item, str):
                item = {"event": item}
            if not isinstance(item, dict) or "event" not in item:
                raise fail(key, "entries need an 'event'")
            modality = item.get("modality", "unspecified")
            if modality not in MODALITIES:
                raise fail(key, f"modality must be one of {MODALITIES}")
            direction = item.get("direction", "causes")
            if direction not in ("causes", "caused_by"):
                raise fail(key, "direction must be 'causes' or 'caused_by'")
            out.append(RelatedEvent(str(item["event"]), modality, direction))
        return tuple(out)

    def strings(key):
        val = data.get(key) or ()
        if isinstance(val, str):
            val = [val]
        return tuple(str(v) for v in val)

    active, passive, tool = (roles("active_participants"), roles("passive_participants"),
                             roles("tool_participants"))
    names = [r.role for r in active + passive + tool]
    if len(set(names)) != len(names):
        raise fail("active_participants", "a role may belong to only one participant class")

    populated = {c for c, specs in zip(ROLE_CLASSES, (active, passive, tool)) if specs}

    card = data.get("participant_cardinality") or {}
    if not isinstance(card, dict):
        raise fail("participant_cardinality", "must be a mapping")
    for cls, n in card.items():
        if cls not in ROLE_CLASSES:
            raise fail("participant_cardinality", f"unknown participant class {cls!r}",
                       UnknownRoleReference)
        if cls not in populated and n:
            raise fail("participant_cardinality", f"class {cls!r} has no roles",
                       UnknownRoleReference)
        if not isinstance(n, int) or n < 0:
            raise fail("participant_cardinality", "minimum counts must be non-negative integers")

    spatial = data.get("spatial_rule") or ()
    if isinstance(spatial, str):
        spatial = [spatial]
    for cls in spatial:
        if cls not in populated:
            raise fail("spatial_rule", f"participant class {cls!r} has no roles",
                       UnknownRoleReference)

    rep = []
    for item in data.get("repeatability") or ():
        try:
            c = RepeatabilityConstraint(item["anchor"], item["multiplicity"])
        except (KeyError, TypeError, ValueError) as exc:
            raise fail("repeatability", str(exc)) from None
        if c.anchor in ROLE_CLASSES and c.anchor not in populated:
            raise fail("repeatability", f"anchor class {c.anchor!r} has no roles",
                       UnknownRoleReference)
        rep.append(c)
    if len({c.anchor for c in rep}) != len(rep):
        raise fail("repeatability", "one constraint per anchor")

    return EventTypeProfile(
        type_name=type_name.strip(),
        classification=data["classification"],
        temporal_region=data["temporal_region"],
        active_roles=active,
        passive_roles=passive,
        tool_roles=tool,
        subevent_types=related("subevents"),
        sovraevent_types=related("sovraevents"),
        status_before=strings("status_before"),
        status_during=strings("status_during"),
        status_after=strings("status_after"),
        caused_events=related("caused_events"),
        symmetrical_events=related("symmetrical_events"),
        incompatible_events=related("incompatible_events"),
        participant_cardinality=tuple(sorted(card.items())),
        spatial_rule=tuple(spatial),
        repeatability=tuple(rep),
    )


@dataclass(frozen=True)
class ConstraintViolation:
    """Two non-coreferent descriptions that an identity criterion says are one event."""

    event_type: str
    anchor: str
    a: str
    b: str
    shared: tuple[str, ...] = field(default=())

    def __str__(self):
        what = ", ".join(self.shared) if self.shared else "same time and place"
        return (f"{self.event_type}: {self.a} and {self.b} share {self.anchor} ({what}) "
                f"but are not coreferent")


def _anchor_entities(ev: EventDescription, prof: EventTypeProfile, anchor: str) -> set[str]:
    roles = set(prof.roles_of(anchor))
    return {p.entity.id for p in ev.participants if p.role in roles}


def check_repeatability(clustering, events: Iterable[EventDescription],
                        store: ProfileStore) -> list[ConstraintViolation]:
    """Flag same-type pairs in distinct clusters that break an ``at_most_one`` constraint.

    ``clustering`` is a :class:`~evcoref.metrics.Partition` (or any object with a
    ``block_of`` mapping from mention id to its block). Events whose type has no
    profile are skipped with an :class:`UnknownEventTypeWarning`.
    """
    block_of = clustering.block_of
    by_type: dict[str, list[EventDescription]] = {}
    for ev in events:
        if ev.event_type not in store:
            warnings.warn(f"{ev.id}: no profile for event type {ev.event_type!r}",
                          UnknownEventTypeWarning, stacklevel=2)
            continue
        by_type.setdefault(ev.event_type, []).append(ev)

    out: list[ConstraintViolation] = []
    for etype in sorted(by_type):
        prof = store[etype]
        anchors = [c.anchor for c in prof.repeatability if c.multiplicity == "at_most_one"]
        if not anchors:
            continue
        evs = sorted(by_type[etype], key=lambda e: e.id)
        for e1, e2 in itertools.combinations(evs, 2):
            if block_of.get(e1.id) is not None and block_of.get(e1.id) == block_of.get(e2.id):
                continue
            for anchor in anchors:
                if anchor == "spatiotemporal":
                    if time_eq(e1.time, e2.time) and place_eq(e1.place, e2.place):
                        out.append(ConstraintViolation(etype, anchor, e1.id, e2.id))
                    continue
                shared = _anchor_entities(e1, prof, anchor) & _anchor_entities(e2, prof, anchor)
                if shared:
                    out.append(ConstraintViolation(etype, anchor, e1.id, e2.id,
                                                   tuple(sorted(shared))))
    return out


@dataclass(frozen=True)
class CardinalityViolation:
    event_id: str
    event_type: str
    role_class: str
    required: int
    found: int

    def __str__(self):
        return (f"{self.event_id} ({self.event_type}): {self.found} {self.role_class} "
                f"participant(s), at least {self.required} expected")


def check_cardinality(events: Iterable[EventDescription],
                      store: ProfileStore) -> list[CardinalityViolation]:
    out = []
    for ev in sorted(events, key=lambda e: e.id):
        prof = store.get(ev.event_type)
        if prof is None:
            continue
        for cls, need in prof.participant_cardinality:
            roles = set(prof.roles_of(cls))
            found = sum(1 for p in ev.participants if p.role in roles)
            if found < need:
                out.append(CardinalityViolation(ev.id, ev.event_type, cls, need, found))
    return out


def unknown_roles(ev: EventDescription, store: ProfileStore) -> list[str]:
    """Roles used by ``ev`` that its type's profile does not declare."""
    prof = store.get(ev.event_type)
    if prof is None:
        return []
    return sorted(r for r in ev.roles if r not in prof.all_roles)
