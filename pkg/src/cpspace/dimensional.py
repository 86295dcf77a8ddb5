"""Dimensionally ordered measure families and the representation round trip.

A level family represents a conditional probability space when, for every
conditioning event, exactly one level gives it a finite positive value, every
earlier level gives it infinity, and every later level gives it zero.  The
unique finite-positive level is the event's active level; conditioning is the
ratio of the active-level values.

Levels are stored dominated-first: a later position in the list is higher in
the order, and the active level of the whole space's top event is the last
nonzero one.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping

from .cps import CPS, ProbMeasure
from .errors import InternalOrderError, InvalidCPS, NotMember, VerifyFailed
from .foundations import INFINITY, Event, ExtValue, SetFamily, canonical_order


class ExtMeasure:
    """Exact nonnegative weights plus a set of states carrying ``+infinity``.

    Evaluation on an event is the sum of its state values, with infinity
    absorbing.  A state flagged infinite has value infinity regardless of any
    finite weight supplied for it.
    """

    __slots__ = ("width", "_weights", "infinite_mask")

    def __init__(
        self,
        width: int,
        weights: Mapping[int, Fraction | int],
        infinite_mask: int = 0,
    ) -> None:
        if infinite_mask < 0 or infinite_mask >> width:
            raise ValueError("infinite mask has bits outside the space")
        cleaned: dict[int, Fraction] = {}
        for state, value in weights.items():
            if not 0 <= state < width:
                raise ValueError(f"state index {state} outside 0..{width - 1}")
            if infinite_mask >> state & 1:
                continue
            value = Fraction(value)
            if value < 0:
                raise ValueError("weights must be nonnegative")
            if value:
                cleaned[state] = value
        self.width = width
        self._weights = cleaned
        self.infinite_mask = infinite_mask

    def state_value(self, state: int) -> ExtValue:
        if self.infinite_mask >> state & 1:
            return INFINITY
        return ExtValue(self._weights.get(state, 0))

    def finite_weight(self, state: int) -> Fraction:
        return self._weights.get(state, Fraction(0))

    def value(self, event: Event) -> ExtValue:
        if event.mask & self.infinite_mask:
            return INFINITY
        total = Fraction(0)
        for state, weight in self._weights.items():
            if event.mask >> state & 1:
                total += weight
        return ExtValue(total)

    def finite_items(self) -> tuple[tuple[int, Fraction], ...]:
        return tuple(sorted(self._weights.items()))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, ExtMeasure)
            and self.width == other.width
            and self._weights == other._weights
            and self.infinite_mask == other.infinite_mask
        )

    def __hash__(self) -> int:
        return hash((self.width, frozenset(self._weights.items()), self.infinite_mask))

    def __repr__(self) -> str:
        parts = [f"{i}: {v}" for i, v in self.finite_items()]
        parts += [f"{i}: inf" for i in Event(self.infinite_mask, self.width)]
        return "ExtMeasure{" + ", ".join(parts) + "}"


@dataclass(frozen=True)
class DimOrderedFamily:
    """Totally ordered levels; list position is the order, later is higher."""

    levels: tuple[ExtMeasure, ...]


@dataclass(frozen=True)
class LevelCheck:
    """Outcome of checking the dimensional-ordering conditions.

    On failure, ``member`` is the offending conditioning event and ``reason``
    says which condition broke.
    """

    holds: bool
    member: Event | None
    reason: str | None


class Dominance(Enum):
    """How two conditioning events compare under their joint measure.

    ``FIRST`` means the first argument dominates (the second is null given
    their union); ``EQUIVALENT`` means both are non-null given the union.
    """

    FIRST = "first-dominates"
    SECOND = "second-dominates"
    EQUIVALENT = "equivalent"


def dominance(cps: CPS, first: Event, second: Event) -> Dominance:
    """Classify two members by the measure conditional on their union.

    Totality holds because the two conditional probabilities sum to at least
    one, so they cannot both vanish.
    """
    if first not in cps.family.members:
        raise NotMember("first event is not a conditioning event")
    if second not in cps.family.members:
        raise NotMember("second event is not a conditioning event")
    joint = cps.measure(first | second)
    p_first = joint.prob(first)
    p_second = joint.prob(second)
    if p_first > 0 and p_second > 0:
        return Dominance.EQUIVALENT
    if p_second == 0:
        return Dominance.FIRST
    return Dominance.SECOND


def verify_levels(dof: DimOrderedFamily, family: SetFamily) -> LevelCheck:
    """Check the dimensional-ordering conditions against a family.

    For each member there must be exactly one level with a finite positive
    value, infinity on every earlier level, and zero on every later one.
    """
    for member in family.sorted_members():
        values = [level.value(member) for level in dof.levels]
        active = [
            i for i, v in enumerate(values) if not v.is_infinite and not v.is_zero
        ]
        if len(active) != 1:
            return LevelCheck(
                False, member,
                f"{len(active)} levels give a finite positive value; need exactly 1",
            )
        at = active[0]
        for i, v in enumerate(values):
            if i < at and not v.is_infinite:
                return LevelCheck(
                    False, member, f"level {i} below the active level is not infinite"
                )
            if i > at and not v.is_zero:
                return LevelCheck(
                    False, member, f"level {i} above the active level is not zero"
                )
    return LevelCheck(True, None, None)


def active_level(dof: DimOrderedFamily, event: Event) -> int:
    """Index of the unique level giving ``event`` a finite positive value."""
    found = None
    for i, level in enumerate(dof.levels):
        value = level.value(event)
        if not value.is_infinite and not value.is_zero:
            if found is not None:
                raise VerifyFailed("two levels are active for the same event")
            found = i
    if found is None:
        raise VerifyFailed("no level is active for the event")
    return found


def regenerate(dof: DimOrderedFamily, family: SetFamily) -> CPS:
    """Build the conditional probability space a level family generates.

    Each member's measure is its active level restricted to it and rescaled
    to total one.  Raises ``VerifyFailed`` when the ordering conditions do
    not hold.
    """
    check = verify_levels(dof, family)
    if not check.holds:
        where = "" if check.member is None else f" at {check.member!r}"
        raise VerifyFailed(f"levels are not dimensionally ordered{where}: {check.reason}")
    measures = {}
    for member in family.sorted_members():
        at = active_level(dof, member)
        level = dof.levels[at]
        denom = level.value(member).finite
        assert denom is not None and denom > 0
        weights = {
            state: level.finite_weight(state) / denom
            for state in member
            if level.finite_weight(state)
        }
        measures[member] = ProbMeasure(weights, family.space.size)
    return CPS(family, measures)


def represent(cps: CPS) -> DimOrderedFamily:
    """Construct a dimensionally ordered family generating the given space.

    Members are grouped into dominance-equivalence classes; classes are
    ordered with dominated ones first.  A class's level carries the weights
    of the measure conditional on the class union, plus infinity on the
    supports of every higher class.  Correctness is enforced afterwards by
    :func:`verify_levels` and the round trip rather than trusted.
    """
    report = cps.validate()
    if not report.ok:
        raise InvalidCPS(
            f"cannot represent an invalid space ({len(report.violations)} violations)"
        )
    members = cps.family.sorted_members()
    index = {member: i for i, member in enumerate(members)}

    # dominance-equivalence classes by union-find over equivalent pairs
    parent = list(range(len(members)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, a in enumerate(members):
        for b in members[i + 1 :]:
            if dominance(cps, a, b) is Dominance.EQUIVALENT:
                ra, rb = find(i), find(index[b])
                if ra != rb:
                    parent[rb] = ra

    classes: dict[int, list[Event]] = {}
    for i, member in enumerate(members):
        classes.setdefault(find(i), []).append(member)

    width = cps.space.size
    unions = []
    for group in classes.values():
        mask = 0
        for member in group:
            mask |= member.mask
        union = Event(mask, width)
        if union not in cps.family.members:
            raise InternalOrderError("class union is not a conditioning event")
        unions.append(union)
    unions = canonical_order(unions)

    # strict total order: count how many other classes each one dominates
    wins = [0] * len(unions)
    for i, a in enumerate(unions):
        for j in range(i + 1, len(unions)):
            rel = dominance(cps, a, unions[j])
            if rel is Dominance.EQUIVALENT:
                raise InternalOrderError(
                    "distinct dominance classes compare as equivalent"
                )
            if rel is Dominance.FIRST:
                wins[i] += 1
            else:
                wins[j] += 1
    if len(set(wins)) != len(wins):
        # a tournament with distinct win counts is transitive; ties mean a cycle
        raise InternalOrderError("dominance between classes is not a total order")
    ordered = [union for _, union in sorted(zip(wins, unions), key=lambda t: t[0])]

    supports = [cps.measures[union].support_mask() for union in ordered]
    levels = []
    for rank, union in enumerate(ordered):
        inf_mask = 0
        for higher in supports[rank + 1 :]:
            inf_mask |= higher
        weights = dict(cps.measures[union].items())
        levels.append(ExtMeasure(width, weights, inf_mask))
    return DimOrderedFamily(tuple(levels))


def level_table(dof: DimOrderedFamily) -> list[list[str]]:
    """Levels as rows of per-state value strings, with ``inf`` for infinity."""
    rows = []
    for level in dof.levels:
        rows.append([str(level.state_value(i)) for i in range(level.width)])
    return rows
