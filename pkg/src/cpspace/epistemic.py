"""Iterated mutual-certainty and mutual-knowledge recursions and their limits.

Both recursions start from the same belief fibers and shrink monotonically,
so they stabilize after at most ``2 * size`` steps.  The full level sequence
is recorded for display and golden testing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .cps import CPS
from .errors import SpaceMismatch
from .foundations import Event


@dataclass(frozen=True)
class RecursionTrace:
    """The recorded levels of one run, ending with the first repeated pair.

    ``levels[0]`` is the pair of starting fibers; the last two entries are
    equal, and ``stabilized_at`` is the index of that repeated entry.  The
    limit is the intersection of the final pair.
    """

    levels: tuple[tuple[Event, Event], ...]
    limit: Event
    stabilized_at: int


def _iterate(
    cps_a: CPS,
    cps_b: CPS,
    event: Event,
    q_a: Fraction | int | str,
    q_b: Fraction | int | str,
    step_a: Callable[[Event], Event],
    step_b: Callable[[Event], Event],
) -> RecursionTrace:
    if cps_a.space != cps_b.space:
        raise SpaceMismatch("the two spaces are over different state sets")
    level_a = cps_a.belief_fiber(event, q_a)
    level_b = cps_b.belief_fiber(event, q_b)
    levels = [(level_a, level_b)]
    while True:
        next_a = level_a & step_a(level_b)
        next_b = level_b & step_b(level_a)
        levels.append((next_a, next_b))
        if next_a == level_a and next_b == level_b:
            break
        level_a, level_b = next_a, next_b
    return RecursionTrace(tuple(levels), level_a & level_b, len(levels) - 1)


def common_certainty(
    cps_a: CPS,
    cps_b: CPS,
    event: Event,
    q_a: Fraction | int | str,
    q_b: Fraction | int | str,
) -> RecursionTrace:
    """Run the mutual-certainty recursion for the two posited values.

    Level 0 is the pair of belief fibers (states where each agent assigns
    exactly its posited probability to the event); each later level
    intersects with certainty of the other agent's previous level.  A state
    in the limit is one where the value pair is commonly certain.
    """
    return _iterate(
        cps_a, cps_b, event, q_a, q_b,
        cps_a.certainty_event, cps_b.certainty_event,
    )


def common_knowledge(
    cps_a: CPS,
    cps_b: CPS,
    event: Event,
    q_a: Fraction | int | str,
    q_b: Fraction | int | str,
) -> RecursionTrace:
    """As :func:`common_certainty`, with the knowledge operator as the step.

    The starting fibers are identical to the certainty recursion; only the
    iteration step changes.
    """
    return _iterate(
        cps_a, cps_b, event, q_a, q_b,
        cps_a.knowledge_event, cps_b.knowledge_event,
    )


def member_of_limit(trace: RecursionTrace, state: int) -> bool:
    return state in trace.limit
