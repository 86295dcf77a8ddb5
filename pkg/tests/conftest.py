"""Shared fixtures: the two worked four-state pairs, small-space corpus
enumeration, and deterministic lexicographic measure construction."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import settings

from cpspace import (
    CPS,
    Event,
    ProbMeasure,
    SetFamily,
    StateSpace,
    close_family,
    lexicographic_cps,
)

settings.register_profile("suite", max_examples=60, deadline=None, derandomize=True)
settings.load_profile("suite")

INSTANCES_DIR = Path(__file__).resolve().parent.parent / "instances"

HALF = Fraction(1, 2)


def build_disagreement_pair() -> tuple[CPS, CPS]:
    """Four states; both agents hold point masses finer than their
    information, producing common certainty of disagreement at b and c."""
    space = StateSpace("abcd")
    full = space.full()

    def dirac(label: str) -> ProbMeasure:
        return ProbMeasure.dirac(space.index(label), 4)

    fam_a = SetFamily(space, [space.event("ad"), space.event("bc"), full])
    cps_a = CPS(
        fam_a,
        {
            full: dirac("d"),
            space.event("ad"): dirac("d"),
            space.event("bc"): dirac("b"),
        },
    )
    fam_b = SetFamily(space, [space.event("abc"), space.event("d"), full])
    cps_b = CPS(
        fam_b,
        {
            full: dirac("d"),
            space.event("d"): dirac("d"),
            space.event("abc"): dirac("c"),
        },
    )
    return cps_a, cps_b


def build_agreement_pair() -> tuple[CPS, CPS]:
    """Four states, no common prior, families strictly inside the power set;
    the agents commonly assign 1/2 to {a} at states a and b."""
    space = StateSpace("abcd")
    full = space.full()

    def pm(weights: dict[str, Fraction | int]) -> ProbMeasure:
        return ProbMeasure({space.index(k): v for k, v in weights.items()}, 4)

    fam_a = SetFamily(
        space,
        [
            space.event("ab"),
            space.event("c"),
            space.event("d"),
            space.event("cd"),
            space.event("abc"),
            space.event("abd"),
            full,
        ],
    )
    uniform_ab = pm({"a": HALF, "b": HALF})
    cps_a = CPS(
        fam_a,
        {
            full: uniform_ab,
            space.event("ab"): uniform_ab,
            space.event("c"): pm({"c": 1}),
            space.event("d"): pm({"d": 1}),
            space.event("cd"): pm({"c": HALF, "d": HALF}),
            space.event("abc"): uniform_ab,
            space.event("abd"): uniform_ab,
        },
    )
    fam_b = SetFamily(space, [space.event("ab"), space.event("cd"), full])
    cps_b = CPS(
        fam_b,
        {
            full: pm({"c": HALF, "d": HALF}),
            space.event("ab"): uniform_ab,
            space.event("cd"): pm({"c": HALF, "d": HALF}),
        },
    )
    return cps_a, cps_b


def build_certain_not_knowing() -> CPS:
    """Two states: certain of {a} everywhere, but at b the agent's atom is
    the whole space, so it does not know {a}."""
    space = StateSpace("ab")
    family = SetFamily(space, [space.event("a"), space.full()])
    return CPS(
        family,
        {
            space.event("a"): ProbMeasure.dirac(0, 2),
            space.full(): ProbMeasure.dirac(0, 2),
        },
    )


@pytest.fixture(scope="session")
def space4() -> StateSpace:
    return StateSpace("abcd")


@pytest.fixture(scope="session")
def disagreement_pair() -> tuple[CPS, CPS]:
    return build_disagreement_pair()


@pytest.fixture(scope="session")
def agreement_pair() -> tuple[CPS, CPS]:
    return build_agreement_pair()


@pytest.fixture(scope="session")
def certain_not_knowing() -> CPS:
    return build_certain_not_knowing()


@pytest.fixture(scope="session")
def instances_dir() -> Path:
    return INSTANCES_DIR


# ---------------------------------------------------------------------------
# corpus construction


def enumerate_closed_families(
    space: StateSpace, max_generators: int = 2, budget: int | None = None
) -> list[SetFamily]:
    """Distinct closed covering families from small generator sets.

    Every generator set is padded with the full event, which forces covering;
    results are deduplicated and returned in enumeration order.
    """
    n = space.size
    events = [Event(mask, n) for mask in range(1, 1 << n)]
    full = space.full()
    seen: set[frozenset] = set()
    out: list[SetFamily] = []
    for count in range(1, max_generators + 1):
        for combo in itertools.combinations(events, count):
            family = close_family(SetFamily(space, set(combo) | {full}))
            if family.members in seen:
                continue
            seen.add(family.members)
            out.append(family)
            if budget is not None and len(out) >= budget:
                return out
    return out


def random_level_spec(
    space: StateSpace, rng: random.Random, flavor: int
) -> list[tuple[Event, dict[int, int]]]:
    """One of three deterministic sequence flavors.

    0: a single full-support uniform-ish block (always certainty-closed);
    1: singleton blocks in random order (pure point masses);
    2: random blocks with random positive weights.
    """
    n = space.size
    if flavor == 0:
        return [(space.full(), {i: rng.randint(1, 6) for i in range(n)})]
    states = list(range(n))
    rng.shuffle(states)
    if flavor == 1:
        return [(Event(1 << i, n), {i: 1}) for i in states]
    cut_count = rng.randint(0, n - 1)
    cuts = sorted(rng.sample(range(1, n), cut_count)) if cut_count else []
    bounds = [0, *cuts, n]
    spec = []
    for lo, hi in zip(bounds, bounds[1:]):
        block = Event.from_indices(states[lo:hi], n)
        spec.append((block, {i: rng.randint(1, 6) for i in block}))
    return spec


def corpus_for(
    space: StateSpace,
    *,
    max_generators: int = 2,
    budget: int | None = None,
    flavors: int = 3,
) -> list[CPS]:
    """Valid spaces over the given state set: enumerated families crossed
    with deterministic lexicographic measure flavors."""
    out = []
    for k, family in enumerate(enumerate_closed_families(space, max_generators, budget)):
        for flavor in range(flavors):
            rng = random.Random(f"corpus:{space.size}:{k}:{flavor}")
            out.append(lexicographic_cps(family, random_level_spec(space, rng, flavor)))
    return out


@pytest.fixture(scope="session")
def corpus_small(disagreement_pair, agreement_pair, certain_not_knowing) -> list[CPS]:
    """A few hundred valid spaces over 1..4 states, plus the fixed examples."""
    out = []
    for n in range(1, 5):
        space = StateSpace("abcd"[:n])
        budget = 40 if n == 4 else None
        out.extend(corpus_for(space, budget=budget))
    out.extend(disagreement_pair)
    out.extend(agreement_pair)
    out.append(certain_not_knowing)
    return out
