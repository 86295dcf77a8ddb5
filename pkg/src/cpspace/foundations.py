"""State spaces, events as bit masks, infinity-extended values, set families.

Everything here is immutable after construction and every operation is a pure
function, so values can be shared freely between concurrent readers.  Events
are plain integer bit masks over a fixed ordering of state labels; the mask is
arbitrary precision, so spaces are not limited to machine-word width.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator

from .errors import NotCovering, NotMember, SpaceMismatch

# All probability values in this library are exact rationals; nothing is ever
# rounded.
Rational = Fraction


class StateSpace:
    """An ordered, finite set of distinct, nonempty state labels.

    The label order is fixed and total: state ``i`` is ``names[i]``.
    """

    __slots__ = ("names", "_index")

    def __init__(self, names: Iterable[str]) -> None:
        names = tuple(names)
        if not names:
            raise ValueError("a state space needs at least one state")
        for name in names:
            if not isinstance(name, str) or not name:
                raise ValueError("state labels must be nonempty strings")
        if len(set(names)) != len(names):
            raise ValueError("state labels must be distinct")
        self.names = names
        self._index = {name: i for i, name in enumerate(names)}

    @property
    def size(self) -> int:
        return len(self.names)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise ValueError(f"unknown state label {label!r}") from None

    def event(self, labels: Iterable[str]) -> Event:
        mask = 0
        for label in labels:
            mask |= 1 << self.index(label)
        return Event(mask, self.size)

    def singleton(self, label: str) -> Event:
        return Event(1 << self.index(label), self.size)

    def empty(self) -> Event:
        return Event(0, self.size)

    def full(self) -> Event:
        return Event((1 << self.size) - 1, self.size)

    def labels(self, event: Event) -> tuple[str, ...]:
        self._check(event)
        return tuple(self.names[i] for i in event)

    def format_event(self, event: Event) -> str:
        return "{" + ",".join(self.labels(event)) + "}"

    def _check(self, event: Event) -> None:
        if event.width != self.size:
            raise SpaceMismatch(
                f"event of width {event.width} used with a space of {self.size} states"
            )

    def __eq__(self, other: object) -> bool:
        return isinstance(other, StateSpace) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"StateSpace({list(self.names)!r})"


class Event:
    """A subset of state indices, stored as a bit mask of ``width`` bits.

    Equality is extensional: two events are equal when they have the same
    mask over the same width.  Set operators (``|``, ``&``, ``-``) and subset
    comparisons (``<=``, ``<``) behave like ``frozenset``.
    """

    __slots__ = ("mask", "width")

    def __init__(self, mask: int, width: int) -> None:
        if width < 1:
            raise ValueError("event width must be at least 1")
        if mask < 0 or mask >> width:
            raise ValueError(f"mask {mask:#b} has bits outside 0..{width - 1}")
        self.mask = mask
        self.width = width

    @classmethod
    def from_indices(cls, indices: Iterable[int], width: int) -> Event:
        mask = 0
        for i in indices:
            if not 0 <= i < width:
                raise ValueError(f"state index {i} outside 0..{width - 1}")
            mask |= 1 << i
        return cls(mask, width)

    def __contains__(self, index: int) -> bool:
        return 0 <= index < self.width and self.mask >> index & 1 == 1

    def __iter__(self) -> Iterator[int]:
        mask = self.mask
        while mask:
            low = mask & -mask
            yield low.bit_length() - 1
            mask ^= low

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __bool__(self) -> bool:
        return self.mask != 0

    def _combine(self, other: Event, mask: int) -> Event:
        if self.width != other.width:
            raise SpaceMismatch("events live over different state spaces")
        return Event(mask, self.width)

    def __or__(self, other: Event) -> Event:
        return self._combine(other, self.mask | other.mask)

    def __and__(self, other: Event) -> Event:
        return self._combine(other, self.mask & other.mask)

    def __sub__(self, other: Event) -> Event:
        return self._combine(other, self.mask & ~other.mask)

    def __le__(self, other: Event) -> bool:
        return self.width == other.width and self.mask & ~other.mask == 0

    def __lt__(self, other: Event) -> bool:
        return self <= other and self.mask != other.mask

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Event)
            and self.mask == other.mask
            and self.width == other.width
        )

    def __hash__(self) -> int:
        return hash((self.mask, self.width))

    def __repr__(self) -> str:
        return "Event{" + ",".join(str(i) for i in self) + "}"


def canonical_order(events: Iterable[Event]) -> tuple[Event, ...]:
    """Sort events by cardinality, ties broken by ascending bit pattern.

    Proper subsets always come before their supersets under this order.
    """
    return tuple(sorted(events, key=lambda e: (len(e), e.mask)))


class ExtValue:
    """A nonnegative exact value extended with ``+infinity``.

    Addition absorbs infinity.  Division is defined only for a finite
    numerator over a finite, strictly positive denominator; everything else
    raises ``ArithmeticError``.
    """

    __slots__ = ("finite",)

    def __init__(self, finite: Fraction | int | None = None) -> None:
        if finite is not None:
            finite = Fraction(finite)
            if finite < 0:
                raise ValueError("finite extended values must be nonnegative")
        self.finite = finite

    @property
    def is_infinite(self) -> bool:
        return self.finite is None

    @property
    def is_zero(self) -> bool:
        return self.finite == 0

    def __add__(self, other: object) -> ExtValue:
        if isinstance(other, ExtValue):
            if self.finite is None or other.finite is None:
                return INFINITY
            return ExtValue(self.finite + other.finite)
        if isinstance(other, (int, Fraction)):
            return self + ExtValue(other)
        return NotImplemented

    __radd__ = __add__

    def divided_by(self, other: ExtValue) -> Fraction:
        if self.finite is None or other.finite is None:
            raise ArithmeticError("cannot divide with an infinite value")
        if other.finite <= 0:
            raise ArithmeticError("denominator must be finite and positive")
        return self.finite / other.finite

    def _key(self) -> tuple[int, Fraction]:
        # infinity sorts above every finite value
        return (1, Fraction(0)) if self.finite is None else (0, self.finite)

    def __lt__(self, other: ExtValue) -> bool:
        return self._key() < other._key()

    def __le__(self, other: ExtValue) -> bool:
        return self._key() <= other._key()

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ExtValue) and self.finite == other.finite

    def __hash__(self) -> int:
        return hash(self.finite)

    def __repr__(self) -> str:
        return "inf" if self.finite is None else str(self.finite)


INFINITY = ExtValue(None)


class SetFamily:
    """A finite family of nonempty events over one state space.

    The constructor rejects the empty event.  Atom queries assume the family
    covers the space and is closed under nonempty intersections; use
    :func:`close_family` to establish closure and :meth:`covers` to check
    covering.
    """

    __slots__ = ("space", "members", "_sorted", "_atoms")

    def __init__(self, space: StateSpace, members: Iterable[Event]) -> None:
        members = frozenset(members)
        for event in members:
            space._check(event)
            if not event:
                raise ValueError("the empty event cannot be a family member")
        self.space = space
        self.members = members
        self._sorted: tuple[Event, ...] | None = None
        self._atoms: dict[int, Event] = {}

    @classmethod
    def from_labels(cls, space: StateSpace, groups: Iterable[Iterable[str]]) -> SetFamily:
        return cls(space, (space.event(g) for g in groups))

    def sorted_members(self) -> tuple[Event, ...]:
        if self._sorted is None:
            self._sorted = canonical_order(self.members)
        return self._sorted

    def __contains__(self, event: Event) -> bool:
        return event in self.members

    def __iter__(self) -> Iterator[Event]:
        return iter(self.sorted_members())

    def __len__(self) -> int:
        return len(self.members)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, SetFamily)
            and self.space == other.space
            and self.members == other.members
        )

    def __hash__(self) -> int:
        return hash((self.space, self.members))

    def __repr__(self) -> str:
        shown = ", ".join(self.space.format_event(e) for e in self.sorted_members())
        return f"SetFamily[{shown}]"

    def union_all(self) -> Event:
        mask = 0
        for event in self.members:
            mask |= event.mask
        return Event(mask, self.space.size)

    def covers(self) -> bool:
        """True iff every state lies in some member."""
        return self.union_all() == self.space.full()

    def closure_defect(self) -> tuple[str, Event, Event] | None:
        """First missing pairwise union or nonempty intersection, or None."""
        members = self.sorted_members()
        masks = {e.mask for e in members}
        for i, a in enumerate(members):
            for b in members[i + 1 :]:
                if a.mask | b.mask not in masks:
                    return ("union", a, b)
                inter = a.mask & b.mask
                if inter and inter not in masks:
                    return ("intersection", a, b)
        return None

    def atom_of(self, state: int) -> Event:
        """Intersection of every member containing ``state``.

        Under covering and intersection closure this is the smallest member
        containing the state.  Raises :class:`NotCovering` when no member
        contains it.
        """
        cached = self._atoms.get(state)
        if cached is not None:
            return cached
        mask = None
        for event in self.members:
            if event.mask >> state & 1:
                mask = event.mask if mask is None else mask & event.mask
        if mask is None:
            raise NotCovering(
                f"no family member contains state {self.space.names[state]!r}"
            )
        atom = Event(mask, self.space.size)
        self._atoms[state] = atom
        return atom

    def meet(self, other: SetFamily) -> SetFamily:
        """Events appearing in both families (literal set intersection)."""
        if self.space != other.space:
            raise SpaceMismatch("cannot meet families over different spaces")
        return SetFamily(self.space, self.members & other.members)

    def algebra_atoms(self) -> tuple[Event, ...]:
        """Partition of the space by membership signature.

        States land in the same block exactly when every member either
        contains both or neither; each member is a union of blocks.
        """
        members = self.sorted_members()
        blocks: dict[tuple[int, ...], int] = {}
        for i in range(self.space.size):
            signature = tuple(e.mask >> i & 1 for e in members)
            blocks[signature] = blocks.get(signature, 0) | 1 << i
        return canonical_order(
            Event(mask, self.space.size) for mask in blocks.values()
        )

    def atoms_in(self, member: Event) -> tuple[Event, ...]:
        """Distinct atoms of the states of ``member``, subsets-first.

        Sorted by (cardinality, bit pattern), so an atom that is a proper
        subset of another always appears earlier.  Their union is ``member``
        when the standing closure and covering assumptions hold.
        """
        if member not in self.members:
            raise NotMember(
                f"{self.space.format_event(member)} is not a family member"
            )
        return canonical_order({self.atom_of(i) for i in member})

    def is_saturated(self, event: Event) -> bool:
        """True iff the atom of every state of ``event`` stays inside it.

        Vacuously true for the empty event.
        """
        return all(self.atom_of(i) <= event for i in event)


def close_family(generators: SetFamily) -> SetFamily:
    """Smallest superfamily closed under pairwise unions and nonempty
    pairwise intersections.

    Idempotent, monotone, and never introduces the empty event.  Runs a
    worklist over pairs of masks; the result size is bounded by ``2^n - 1``.
    """
    if not generators.members:
        raise ValueError("cannot close an empty family")
    masks = {e.mask for e in generators.members}
    work = list(masks)
    while work:
        m = work.pop()
        for x in list(masks):
            union = m | x
            if union not in masks:
                masks.add(union)
                work.append(union)
            inter = m & x
            if inter and inter not in masks:
                masks.add(inter)
                work.append(inter)
    width = generators.space.size
    return SetFamily(generators.space, (Event(m, width) for m in masks))
