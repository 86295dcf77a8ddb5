"""Conditional probability spaces: one exact measure per conditioning event.

A space is valid when every measure is a probability measure concentrated on
its conditioning event and the chain rule holds on nested conditioning
events.  Validity is checked by :meth:`CPS.validate`; the certainty,
knowledge, and belief-fiber operators assume it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping

from .errors import NotMember, StructureError
from .foundations import Event, SetFamily, StateSpace


class ProbMeasure:
    """Exact weights on states; absent states carry weight zero.

    Weights must be nonnegative.  The sum-to-one requirement is not enforced
    here so that malformed instances can be loaded and then reported by
    :meth:`CPS.validate`; use :attr:`is_normalized` to test it.
    """

    __slots__ = ("width", "_weights")

    def __init__(self, weights: Mapping[int, Fraction | int | str], width: int) -> None:
        cleaned: dict[int, Fraction] = {}
        for state, value in weights.items():
            if not 0 <= state < width:
                raise ValueError(f"state index {state} outside 0..{width - 1}")
            value = Fraction(value)
            if value < 0:
                raise ValueError(f"negative weight {value} on state {state}")
            if value:
                cleaned[state] = value
        self.width = width
        self._weights = cleaned

    @classmethod
    def dirac(cls, state: int, width: int) -> ProbMeasure:
        """Point mass on a single state."""
        return cls({state: Fraction(1)}, width)

    @classmethod
    def uniform(cls, event: Event) -> ProbMeasure:
        if not event:
            raise ValueError("cannot spread weight over the empty event")
        share = Fraction(1, len(event))
        return cls({i: share for i in event}, event.width)

    def weight(self, state: int) -> Fraction:
        return self._weights.get(state, Fraction(0))

    def prob(self, event: Event) -> Fraction:
        """Exact probability of ``event``: the sum of its state weights."""
        total = Fraction(0)
        for state, value in self._weights.items():
            if event.mask >> state & 1:
                total += value
        return total

    def total(self) -> Fraction:
        return sum(self._weights.values(), Fraction(0))

    @property
    def is_normalized(self) -> bool:
        return self.total() == 1

    def support(self) -> Event:
        return Event.from_indices(self._weights, self.width)

    def support_mask(self) -> int:
        mask = 0
        for state in self._weights:
            mask |= 1 << state
        return mask

    def items(self) -> tuple[tuple[int, Fraction], ...]:
        return tuple(sorted(self._weights.items()))

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self._weights))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, ProbMeasure)
            and self.width == other.width
            and self._weights == other._weights
        )

    def __hash__(self) -> int:
        return hash((self.width, frozenset(self._weights.items())))

    def __repr__(self) -> str:
        inner = ", ".join(f"{i}: {v}" for i, v in self.items())
        return "ProbMeasure{" + inner + "}"


@dataclass(frozen=True)
class Violation:
    """One failed validity condition, with the witnessing events.

    ``kind`` is one of ``"normalization"``, ``"concentration"``, or
    ``"chain-rule"``.  For chain-rule violations, ``member`` is the outer
    conditioning event, ``inner`` the nested one, and ``event`` the singleton
    where the two sides differ.
    """

    kind: str
    member: Event
    inner: Event | None
    event: Event | None
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


class CPS:
    """A conditioning family plus one measure per member.

    The constructor enforces only that the measure map matches the family
    exactly; the probabilistic conditions live in :meth:`validate`.
    """

    __slots__ = ("family", "measures", "_atom_info", "_certainty", "_knowledge")

    def __init__(self, family: SetFamily, measures: Mapping[Event, ProbMeasure]) -> None:
        missing = [g for g in family.sorted_members() if g not in measures]
        if missing:
            shown = family.space.format_event(missing[0])
            raise StructureError(f"no measure for family member {shown}")
        extra = [e for e in measures if e not in family.members]
        if extra:
            raise StructureError(
                f"measure given for non-member event {extra[0]!r}"
            )
        width = family.space.size
        for measure in measures.values():
            if measure.width != width:
                raise StructureError("measure width does not match the state space")
        self.family = family
        self.measures = dict(measures)
        # per-state cache: (atom, measure, support mask); built lazily
        self._atom_info: list[tuple[Event, ProbMeasure, int]] | None = None
        self._certainty: dict[int, Event] = {}
        self._knowledge: dict[int, Event] = {}

    @property
    def space(self) -> StateSpace:
        return self.family.space

    def measure(self, member: Event) -> ProbMeasure:
        try:
            return self.measures[member]
        except KeyError:
            raise NotMember(
                f"{self.space.format_event(member)} is not a conditioning event"
            ) from None

    def prob(self, member: Event, event: Event) -> Fraction:
        """The probability of ``event`` conditional on ``member``."""
        return self.measure(member).prob(event)

    def _info(self) -> list[tuple[Event, ProbMeasure, int]]:
        if self._atom_info is None:
            info = []
            for state in range(self.space.size):
                atom = self.family.atom_of(state)
                measure = self.measures.get(atom)
                if measure is None:
                    raise StructureError(
                        "family is not closed under nonempty intersections: "
                        f"the atom {self.space.format_event(atom)} of state "
                        f"{self.space.names[state]!r} is not a member"
                    )
                info.append((atom, measure, measure.support_mask()))
            self._atom_info = info
        return self._atom_info

    def atom_measure(self, state: int) -> ProbMeasure:
        """The measure conditional on the atom of ``state``."""
        return self._info()[state][1]

    def certainty_event(self, event: Event) -> Event:
        """States whose atom-conditional probability of ``event`` is one."""
        cached = self._certainty.get(event.mask)
        if cached is None:
            mask = 0
            for state, (_, _, support) in enumerate(self._info()):
                # for a normalized measure, p(E) = 1 iff support(p) is in E
                if support & ~event.mask == 0:
                    mask |= 1 << state
            cached = Event(mask, self.space.size)
            self._certainty[event.mask] = cached
        return cached

    def knowledge_event(self, event: Event) -> Event:
        """States whose atom is contained in ``event``."""
        cached = self._knowledge.get(event.mask)
        if cached is None:
            mask = 0
            for state, (atom, _, _) in enumerate(self._info()):
                if atom.mask & ~event.mask == 0:
                    mask |= 1 << state
            cached = Event(mask, self.space.size)
            self._knowledge[event.mask] = cached
        return cached

    def belief_fiber(self, event: Event, value: Fraction | int | str) -> Event:
        """States whose atom-conditional probability of ``event`` equals
        ``value`` exactly."""
        value = Fraction(value)
        if not 0 <= value <= 1:
            raise ValueError(f"probability value {value} outside [0, 1]")
        mask = 0
        for state, (_, measure, _) in enumerate(self._info()):
            if measure.prob(event) == value:
                mask |= 1 << state
        return Event(mask, self.space.size)

    def validate(self) -> ValidationReport:
        """Check every validity condition and report each failure.

        Structural problems (covering, closure) raise ``StructureError``
        before any measure is examined.  Measure problems are collected into
        the report: normalization, concentration on the conditioning event,
        and the chain rule on nested pairs.  The chain rule is checked on
        singletons only; both sides are additive in the inner event, so
        equality on singletons is equivalent to equality on all subsets.
        """
        family = self.family
        if not family.covers():
            for state in range(self.space.size):
                if not any(m.mask >> state & 1 for m in family.members):
                    raise StructureError(
                        "family does not cover the state space: no member "
                        f"contains state {self.space.names[state]!r}"
                    )
        defect = family.closure_defect()
        if defect is not None:
            kind, a, b = defect
            op = "|" if kind == "union" else "&"
            raise StructureError(
                f"family is not closed under {kind}s: "
                f"{self.space.format_event(a)} {op} {self.space.format_event(b)} "
                "is missing"
            )

        violations: list[Violation] = []
        members = family.sorted_members()
        for g in members:
            pg = self.measures[g]
            total = pg.total()
            if total != 1:
                violations.append(
                    Violation(
                        "normalization", g, None, None,
                        f"weights sum to {total}, not 1",
                    )
                )
            conc = pg.prob(g)
            if conc != 1:
                violations.append(
                    Violation(
                        "concentration", g, None, None,
                        f"probability of the conditioning event is {conc}, not 1",
                    )
                )
        for f in members:
            pf = self.measures[f]
            for g in members:
                if f == g or not f <= g:
                    continue
                pg = self.measures[g]
                scale = pg.prob(f)
                # only states carrying weight on either side can disagree
                check = (pg.support_mask() | pf.support_mask()) & f.mask
                for state in Event(check, f.width):
                    left = pg.weight(state)
                    right = scale * pf.weight(state)
                    if left != right:
                        violations.append(
                            Violation(
                                "chain-rule", g, f,
                                Event(1 << state, f.width),
                                f"direct value {left} but via the nested event "
                                f"{scale} * {pf.weight(state)} = {right}",
                            )
                        )
        return ValidationReport(tuple(violations))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, CPS)
            and self.family == other.family
            and self.measures == other.measures
        )

    def __hash__(self) -> int:
        return hash((self.family, frozenset(self.measures.items())))

    def __repr__(self) -> str:
        return f"CPS(over {self.space.names}, {len(self.family)} conditioning events)"
