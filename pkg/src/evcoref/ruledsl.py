"""A line-oriented language for coreference rules.

Each non-blank, non-comment line is one rule::

    certain Killing : (E1.Victim == E2.Victim)
    possible Killing : E1.Place ~ E2.Place & E1.Time ~ E2.Time
    certain Killing/Dying : E1.Victim == E2.Protagonist

A rule is a conjunction of conditions; there is no disjunction or negation.
Rule ids are generated as ``<guard>.<strength>.<n>`` with ``n`` counting
rules of the same guard and strength in file order, starting at 1.
"""

from __future__ import annotations

import re
import warnings
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Literal, Sequence

from .errors import EmptyConjunction, LegacyRuleWarning, ParseError, UnknownRole
from .model import STRENGTHS, Strength

TIME, PLACE, SUBEVENT = "Time", "Place", "SubEvent"
FEATURES = (TIME, PLACE, SUBEVENT)

ConditionKind = Literal["Eq", "Compat", "SubeventCoref"]
_OPS = {"==": "Eq", "~": "Compat", "∼": "Compat", "hasCoref": "SubeventCoref"}
_OP_TEXT = {"Eq": "==", "Compat": "~", "SubeventCoref": "hasCoref"}

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<access>E[12]\.[A-Za-z_][A-Za-z0-9_\-]*)
  | (?P<op>==|~|∼|hasCoref\b)
  | (?P<amp>&)
  | (?P<lpar>\()
  | (?P<rpar>\))
  | (?P<flag>![A-Za-z][A-Za-z0-9_\-]*)
""", re.VERBOSE)
_HEAD_RE = re.compile(
    r"^\s*(?P<strength>[A-Za-z]+)\s+(?P<t1>[A-Za-z_][A-Za-z0-9_\-]*)"
    r"(?:\s*/\s*(?P<t2>[A-Za-z_][A-Za-z0-9_\-]*))?\s*:"
)
KNOWN_FLAGS = ("legacy",)


@dataclass(frozen=True, order=True)
class Accessor:
    side: str  # "E1" | "E2"
    name: str

    def __str__(self):
        return f"{self.side}.{self.name}"

    @property
    def is_feature(self) -> bool:
        return self.name in FEATURES


@dataclass(frozen=True)
class Condition:
    kind: ConditionKind
    lhs: Accessor
    rhs: Accessor

    def __post_init__(self):
        names = {self.lhs.name, self.rhs.name}
        if self.lhs.side == self.rhs.side:
            raise ValueError(f"{self}: a condition must compare E1 with E2")
        if self.kind == "SubeventCoref":
            if names != {SUBEVENT}:
                raise ValueError(f"{self}: hasCoref applies to SubEvent on both sides")
        elif SUBEVENT in names:
            raise ValueError(f"{self}: SubEvent can only be compared with hasCoref")
        elif self.kind == "Compat":
            if len(names) != 1 or names - {TIME, PLACE}:
                raise ValueError(f"{self}: ~ is defined on Time~Time and Place~Place only")
        elif (TIME in names or PLACE in names) and len(names) != 1:
            raise ValueError(f"{self}: Time and Place compare only with themselves")

    def oriented(self) -> tuple[Accessor, Accessor]:
        """(E1 accessor, E2 accessor)."""
        return (self.lhs, self.rhs) if self.lhs.side == "E1" else (self.rhs, self.lhs)

    def __str__(self):
        return f"{self.lhs} {_OP_TEXT[self.kind]} {self.rhs}"


@dataclass(frozen=True)
class CorefRule:
    rule_id: str
    strength: Strength
    type_guard_e1: str
    type_guard_e2: str
    conditions: tuple[Condition, ...]
    legacy: bool = False
    line: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.conditions:
            raise EmptyConjunction(f"rule {self.rule_id} has no conditions")
        if self.strength not in STRENGTHS:
            raise ValueError(f"unknown strength {self.strength!r}")

    @property
    def guard(self) -> str:
        if self.type_guard_e1 == self.type_guard_e2:
            return self.type_guard_e1
        return f"{self.type_guard_e1}/{self.type_guard_e2}"

    @property
    def cross_type(self) -> bool:
        return self.type_guard_e1 != self.type_guard_e2

    @property
    def uses_subevents(self) -> bool:
        return any(c.kind == "SubeventCoref" for c in self.conditions)

    def roles_by_side(self) -> Iterator[tuple[str, str]]:
        """Distinct (guarded type, role name) pairs referenced by the rule."""
        seen = set()
        for c in self.conditions:
            for acc in (c.lhs, c.rhs):
                if acc.is_feature:
                    continue
                t = self.type_guard_e1 if acc.side == "E1" else self.type_guard_e2
                if (t, acc.name) not in seen:
                    seen.add((t, acc.name))
                    yield t, acc.name


class RuleSet(Sequence[CorefRule]):
    def __init__(self, rules: Iterable[CorefRule] = ()):
        self._rules = tuple(rules)
        ids = [r.rule_id for r in self._rules]
        dup = [i for i, n in Counter(ids).items() if n > 1]
        if dup:
            raise ValueError(f"duplicate rule ids: {dup}")

    def __getitem__(self, i):
        return self._rules[i]

    def __len__(self):
        return len(self._rules)

    def __eq__(self, other):
        if isinstance(other, RuleSet):
            return self._rules == other._rules
        return NotImplemented

    __hash__ = None

    def __repr__(self):
        return f"RuleSet({len(self._rules)} rules)"

    def active(self, enable_cross_type: bool = False) -> "RuleSet":
        return RuleSet(r for r in self._rules if enable_cross_type or not r.cross_type)

    def get(self, rule_id: str) -> CorefRule:
        for r in self._rules:
            if r.rule_id == rule_id:
                return r
        raise KeyError(rule_id)


DEFAULT_RULES = "rules.txt"


def default_rules_path() -> Path:
    return Path(str(resources.files("evcoref") / "data" / DEFAULT_RULES))


def load_rules(source: str | Path | None = None, store=None, *, legacy_verbatim: bool = True,
               ) -> RuleSet:
    path = Path(source) if source is not None else default_rules_path()
    return parse_rules(path.read_text(encoding="utf-8"), store, source=str(path),
                       legacy_verbatim=legacy_verbatim)


def parse_rules(text: str, store=None, *, source: str = "<string>",
                legacy_verbatim: bool = True) -> RuleSet:
    """Parse rule text, validating roles against ``store`` when given.

    Rules flagged ``!legacy`` may reference roles their profile does not
    declare; with ``legacy_verbatim`` they load with a :class:`LegacyRuleWarning`,
    otherwise they fail like any other unknown role.
    """
    rules: list[CorefRule] = []
    counters: Counter = Counter()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = _strip_comment(raw)
        if not body.strip():
            continue
        strength, t1, t2, conds, flags = _parse_line(body, source, lineno)
        guard = t1 if t1 == t2 else f"{t1}/{t2}"
        counters[(guard, strength)] += 1
        rule_id = f"{guard}.{strength}.{counters[(guard, strength)]}"
        rule = CorefRule(rule_id, strength, t1, t2, tuple(conds), legacy="legacy" in flags,
                         line=lineno)
        if store is not None:
            _validate_roles(rule, store, source, legacy_verbatim)
        rules.append(rule)
    return RuleSet(rules)


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def _parse_line(body: str, source: str, lineno: int):
    head = _HEAD_RE.match(body)
    if not head:
        raise ParseError("expected '<strength> <Type>[/<Type>] :'", source, lineno, 1)
    strength = head.group("strength")
    if strength not in STRENGTHS:
        raise ParseError(f"unknown strength {strength!r}", source, lineno,
                         head.start("strength") + 1)
    t1 = head.group("t1")
    t2 = head.group("t2") or t1

    tokens = []
    pos = head.end()
    while pos < len(body):
        m = _TOKEN_RE.match(body, pos)
        if not m:
            raise ParseError(f"unexpected text {body[pos:pos + 12]!r}", source, lineno, pos + 1)
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), pos + 1))
        pos = m.end()

    flags = []
    while tokens and tokens[-1][0] == "flag":
        kind, val, col = tokens.pop()
        name = val[1:]
        if name not in KNOWN_FLAGS:
            raise ParseError(f"unknown flag {val!r}", source, lineno, col)
        flags.append(name)
    if not tokens:
        raise EmptyConjunction(f"{source}:{lineno}: rule has no conditions")

    conds: list[Condition] = []
    i = 0
    while True:
        cond, i = _parse_condition(tokens, i, source, lineno, len(body))
        conds.append(cond)
        if i == len(tokens):
            break
        kind, val, col = tokens[i]
        if kind != "amp":
            raise ParseError(f"expected '&', got {val!r}", source, lineno, col)
        i += 1
        if i == len(tokens):
            raise ParseError("dangling '&'", source, lineno, col)
    return strength, t1, t2, conds, flags


def _parse_condition(tokens, i, source, lineno, eol):
    def expect(kind):
        nonlocal i
        if i >= len(tokens):
            raise ParseError(f"unexpected end of rule, expected {kind}", source, lineno, eol + 1)
        k, v, c = tokens[i]
        if k != kind:
            raise ParseError(f"expected {kind}, got {v!r}", source, lineno, c)
        i += 1
        return v, c

    paren = i < len(tokens) and tokens[i][0] == "lpar"
    if paren:
        i += 1
    lhs, col = expect("access")
    op, _ = expect("op")
    rhs, _ = expect("access")
    if paren:
        expect("rpar")
    try:
        cond = Condition(_OPS[op], _accessor(lhs), _accessor(rhs))
    except ValueError as exc:
        raise ParseError(str(exc), source, lineno, col) from None
    return cond, i


def _accessor(text: str) -> Accessor:
    side, name = text.split(".", 1)
    return Accessor(side, name)


def _validate_roles(rule: CorefRule, store, source: str, legacy_verbatim: bool) -> None:
    for t in {rule.type_guard_e1, rule.type_guard_e2}:
        if t not in store:
            raise ParseError(f"rule {rule.rule_id}: no profile for event type {t!r}", source,
                             rule.line)
    for t, role in rule.roles_by_side():
        if role in store[t].all_roles:
            continue
        if rule.legacy and legacy_verbatim:
            warnings.warn(f"{source}:{rule.line}: rule {rule.rule_id}: role {role!r} is not "
                          f"a {t} participant; the rule can never fire", LegacyRuleWarning,
                          stacklevel=3)
            continue
        raise UnknownRole(rule.rule_id, role,
                          f"{source}:{rule.line}: rule {rule.rule_id}: {role!r} is not a "
                          f"role of {t}")


def lint_rules(rules: RuleSet, store) -> list[str]:
    """Human-readable warnings: unfireable legacy rows and duplicated rows."""
    out = []
    seen: dict[tuple, str] = {}
    for r in rules:
        for t, role in r.roles_by_side():
            if t in store and role not in store[t].all_roles:
                out.append(f"{r.rule_id}: role {role!r} is not a {t} participant; "
                           f"the rule can never fire")
        key = (r.strength, r.type_guard_e1, r.type_guard_e2,
               frozenset(str(c) for c in r.conditions))
        if key in seen:
            out.append(f"{r.rule_id}: same conditions as {seen[key]}")
        else:
            seen[key] = r.rule_id
    return out


def format_rule(rule: CorefRule) -> str:
    conds = " & ".join(f"({c})" for c in rule.conditions)
    line = f"{rule.strength} {rule.guard} : {conds}"
    if rule.legacy:
        line += "  !legacy"
    return line


def format_rules(rules: Iterable[CorefRule]) -> str:
    return "".join(format_rule(r) + "\n" for r in rules)


def rule_count_report(rules: RuleSet, types: Iterable[str] = ()) -> dict[str, dict[str, int]]:
    """Per-guard counts of certain and possible rules.

    Guards listed in ``types`` appear even when they have no rules.
    """
    report: dict[str, dict[str, int]] = {t: {s: 0 for s in STRENGTHS} for t in types}
    for r in rules:
        report.setdefault(r.guard, {s: 0 for s in STRENGTHS})[r.strength] += 1
    return report


def format_count_report(report: dict[str, dict[str, int]]) -> str:
    width = max([len("type")] + [len(t) for t in report])
    lines = [f"{'type':<{width}}  certain  possible"]
    for t, c in report.items():
        lines.append(f"{t:<{width}}  {c['certain']:>7}  {c['possible']:>8}")
    return "\n".join(lines) + "\n"
