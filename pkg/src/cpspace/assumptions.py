"""Hypothesis checkers: certainty reflection, 1-closedness, local consistency.

Every checker returns a report carrying a concrete witness when it fails, so
callers can explain verdicts instead of echoing bare booleans.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cps import CPS, ProbMeasure
from .errors import NotOneClosed, SpaceMismatch, TooLarge
from .foundations import Event, SetFamily, canonical_order

# the direct reflection check enumerates all 2^n events
DIRECT_CHECK_CAP = 16


@dataclass(frozen=True)
class OneClosedReport:
    """``witness`` is a certain event missing from the family, if any."""

    holds: bool
    witness: Event | None


@dataclass(frozen=True)
class ReflectionReport:
    """``witness`` is a failing (event, state) pair; ``checker`` records
    whether the direct definition or the atom characterization ran."""

    holds: bool
    witness: tuple[Event, int] | None
    checker: str


@dataclass(frozen=True)
class LocalConsistencyReport:
    """Agreement of the two measures on the meet atom at one state.

    ``witness_state`` is the first state where the weights differ.
    """

    holds: bool
    meet_atom: Event
    witness_state: int | None


@dataclass(frozen=True)
class SharedDisagreement:
    """A conditioning event both agents share but measure differently."""

    member: Event
    state: int
    measure_a: ProbMeasure
    measure_b: ProbMeasure


@dataclass(frozen=True)
class AssumptionReport:
    one_closed: OneClosedReport
    reflection: ReflectionReport


def certain_events(cps: CPS) -> SetFamily:
    """Every event some conditioning event makes the agent certain of.

    An event qualifies when it sits between the support of a member's
    measure and the member itself, which is exactly the probability-one
    condition; this avoids scanning all events per member.  The family of
    conditioning events is always contained in the result (concentration).
    """
    masks: set[int] = set()
    for member in cps.family.sorted_members():
        support = cps.measures[member].support_mask()
        free = member.mask & ~support
        sub = free
        while True:
            masks.add(support | sub)
            if sub == 0:
                break
            sub = (sub - 1) & free
    width = cps.space.size
    return SetFamily(cps.space, (Event(m, width) for m in masks))


def check_one_closed(cps: CPS) -> OneClosedReport:
    """True iff every certain event is already a conditioning event."""
    extra = certain_events(cps).members - cps.family.members
    if not extra:
        return OneClosedReport(True, None)
    return OneClosedReport(False, canonical_order(extra)[0])


def check_reflection_direct(cps: CPS, *, force: bool = False) -> ReflectionReport:
    """Scan every event and state against the reflection definition.

    At each state the agent assigns some value to the event; reflection
    requires certainty of the set of states where the same value is
    assigned.  Cost is ``2^n`` events, so spaces beyond ``DIRECT_CHECK_CAP``
    states are refused unless ``force`` is given.
    """
    n = cps.space.size
    if n > DIRECT_CHECK_CAP and not force:
        raise TooLarge(
            f"direct reflection check over {n} states scans 2^{n} events; "
            "pass force=True to run it anyway"
        )
    measures = [cps.atom_measure(i) for i in range(n)]
    supports = [m.support_mask() for m in measures]
    for emask in range(1 << n):
        event = Event(emask, n)
        values = [measures[i].prob(event) for i in range(n)]
        fibers: dict = {}
        for i, value in enumerate(values):
            fibers[value] = fibers.get(value, 0) | 1 << i
        for i, value in enumerate(values):
            # certainty of the fiber: support inside the fiber set
            if supports[i] & ~fibers[value]:
                return ReflectionReport(False, (event, i), "direct")
    return ReflectionReport(True, None, "direct")


def check_reflection_atoms(cps: CPS) -> ReflectionReport:
    """Characterization of reflection through nested atoms.

    On a 1-closed space, reflection holds exactly when the measure at every
    atom concentrates on each strictly smaller atom.  Polynomial in the
    number of states; refuses to judge spaces that are not 1-closed.
    """
    if not check_one_closed(cps).holds:
        raise NotOneClosed(
            "the atom characterization of reflection is only conclusive on "
            "1-closed spaces; use the direct check instead"
        )
    representative: dict[Event, int] = {}
    for state in range(cps.space.size):
        representative.setdefault(cps.family.atom_of(state), state)
    for outer, state in representative.items():
        support = cps.atom_measure(state).support_mask()
        for inner in representative:
            if inner < outer and support & ~inner.mask:
                return ReflectionReport(False, (inner, state), "atoms")
    return ReflectionReport(True, None, "atoms")


def check_reflection(cps: CPS) -> ReflectionReport:
    """Atom characterization when 1-closedness holds, direct scan otherwise."""
    if check_one_closed(cps).holds:
        return check_reflection_atoms(cps)
    return check_reflection_direct(cps)


def assumption_report(cps: CPS) -> AssumptionReport:
    return AssumptionReport(check_one_closed(cps), check_reflection(cps))


def _first_difference(a: ProbMeasure, b: ProbMeasure) -> int | None:
    for state in range(a.width):
        if a.weight(state) != b.weight(state):
            return state
    return None


def check_local_consistency(cps_a: CPS, cps_b: CPS, state: int) -> LocalConsistencyReport:
    """Do the two agents agree on the meet atom at ``state``?

    The meet atom is the smallest event of the shared conditioning family
    containing the state; consistency at the state means the two measures
    conditional on it are identical.
    """
    if cps_a.space != cps_b.space:
        raise SpaceMismatch("the two spaces are over different state sets")
    meet = cps_a.family.meet(cps_b.family)
    atom = meet.atom_of(state)
    pa = cps_a.measure(atom)
    pb = cps_b.measure(atom)
    if pa == pb:
        return LocalConsistencyReport(True, atom, None)
    return LocalConsistencyReport(False, atom, _first_difference(pa, pb))


def local_consistency_map(cps_a: CPS, cps_b: CPS) -> dict[int, LocalConsistencyReport]:
    return {
        state: check_local_consistency(cps_a, cps_b, state)
        for state in range(cps_a.space.size)
    }


def shared_event_disagreements(cps_a: CPS, cps_b: CPS) -> tuple[SharedDisagreement, ...]:
    """Every shared conditioning event the two agents measure differently.

    This is a family-level diagnostic, strictly stronger than per-state local
    consistency: augmenting both agents can surface disagreements on shared
    events that are not meet atoms at any state.  One entry per differing
    shared event, with the first state where the weights differ.
    """
    if cps_a.space != cps_b.space:
        raise SpaceMismatch("the two spaces are over different state sets")
    out = []
    for member in cps_a.family.meet(cps_b.family).sorted_members():
        pa = cps_a.measure(member)
        pb = cps_b.measure(member)
        if pa != pb:
            state = _first_difference(pa, pb)
            assert state is not None
            out.append(SharedDisagreement(member, state, pa, pb))
    return tuple(out)
