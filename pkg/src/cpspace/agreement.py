"""Agreement harness: classify posited-value pairs under common certainty or
common knowledge, generate valid instances, and search for counterexamples.

The central invariant: when both agents' spaces are certainty-closed and
reflective and they agree on the meet atom at a state inside the
common-certainty limit, the two posited values must coincide.  A
``DISAGREEMENT_UNDER_HYPOTHESES`` verdict therefore never occurs on a correct
build; the search harness exists to hammer on that.
"""

from __future__ import annotations

import random
import string
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping, Sequence

from .assumptions import (
    LocalConsistencyReport,
    OneClosedReport,
    ReflectionReport,
    SharedDisagreement,
    check_one_closed,
    check_reflection,
    local_consistency_map,
    shared_event_disagreements,
)
from .augmentation import extend
from .cps import CPS, ProbMeasure
from .epistemic import RecursionTrace, common_certainty, common_knowledge
from .errors import ConfigError, SpaceMismatch
from .foundations import Event, SetFamily, StateSpace, close_family

DROP_CHOICES = ("reflection", "one_closed", "consistency")


class Verdict(Enum):
    AGREEMENT_CONFIRMED = "agreement-confirmed"
    HYPOTHESIS_FAILED = "hypothesis-failed"
    NOT_COMMON_CERTAINTY = "not-common-certainty"
    DISAGREEMENT_UNDER_HYPOTHESES = "disagreement-under-hypotheses"


@dataclass(frozen=True)
class HypothesisReport:
    """Hypothesis diagnostics for one run.

    Certainty-mode runs carry all three hypotheses; knowledge-mode runs test
    local consistency only, leaving the per-agent fields as None.
    ``shared_disagreements`` lists shared conditioning events the agents
    measure differently; it is informational and not itself a hypothesis.
    """

    one_closed_a: OneClosedReport | None
    one_closed_b: OneClosedReport | None
    reflection_a: ReflectionReport | None
    reflection_b: ReflectionReport | None
    consistency: LocalConsistencyReport
    shared_disagreements: tuple[SharedDisagreement, ...]

    @property
    def failed(self) -> tuple[str, ...]:
        out = []
        if (self.one_closed_a is not None and not self.one_closed_a.holds) or (
            self.one_closed_b is not None and not self.one_closed_b.holds
        ):
            out.append("one_closed")
        if (self.reflection_a is not None and not self.reflection_a.holds) or (
            self.reflection_b is not None and not self.reflection_b.holds
        ):
            out.append("reflection")
        if not self.consistency.holds:
            out.append("consistency")
        return tuple(out)

    @property
    def all_hold(self) -> bool:
        return not self.failed


@dataclass(frozen=True)
class AgreementReport:
    mode: str  # "certainty" or "knowledge"
    event: Event
    omega: int
    q_a: Fraction
    q_b: Fraction
    hypotheses: HypothesisReport
    trace: RecursionTrace
    omega_in_limit: bool
    verdict: Verdict

    @property
    def failed_hypotheses(self) -> tuple[str, ...]:
        return self.hypotheses.failed


def classify(
    failed: Sequence[str], in_limit: bool, q_a: Fraction, q_b: Fraction
) -> Verdict:
    """Verdict table shared by both modes.

    Membership of the state in the limit is decided first: without common
    certainty (or knowledge) there is nothing to conclude, whatever the
    hypotheses.  With membership, equal values confirm agreement (the
    hypotheses are sufficient conditions, not necessary ones), a failed
    hypothesis explains any disagreement, and disagreement with intact
    hypotheses is the build-breaking verdict.
    """
    if not in_limit:
        return Verdict.NOT_COMMON_CERTAINTY
    if q_a == q_b:
        return Verdict.AGREEMENT_CONFIRMED
    if failed:
        return Verdict.HYPOTHESIS_FAILED
    return Verdict.DISAGREEMENT_UNDER_HYPOTHESES


class AgreementChecker:
    """Precomputed hypothesis context for one pair of spaces.

    Closure and reflection verdicts, per-state consistency, and shared-event
    diagnostics depend only on the pair, so computing them once lets many
    (event, state, value, value) tuples be classified cheaply.
    """

    def __init__(self, cps_a: CPS, cps_b: CPS, *, knowledge: bool = False) -> None:
        if cps_a.space != cps_b.space:
            raise SpaceMismatch("the two spaces are over different state sets")
        self.cps_a = cps_a
        self.cps_b = cps_b
        self.knowledge = knowledge
        if knowledge:
            self._one_closed_a = self._one_closed_b = None
            self._reflection_a = self._reflection_b = None
        else:
            self._one_closed_a = check_one_closed(cps_a)
            self._one_closed_b = check_one_closed(cps_b)
            self._reflection_a = check_reflection(cps_a)
            self._reflection_b = check_reflection(cps_b)
        self._consistency = local_consistency_map(cps_a, cps_b)
        self._shared = shared_event_disagreements(cps_a, cps_b)

    def check(
        self,
        event: Event,
        omega: int,
        q_a: Fraction | int | str,
        q_b: Fraction | int | str,
    ) -> AgreementReport:
        if not 0 <= omega < self.cps_a.space.size:
            raise ValueError(f"state index {omega} outside the space")
        q_a = Fraction(q_a)
        q_b = Fraction(q_b)
        if self.knowledge:
            trace = common_knowledge(self.cps_a, self.cps_b, event, q_a, q_b)
        else:
            trace = common_certainty(self.cps_a, self.cps_b, event, q_a, q_b)
        hypotheses = HypothesisReport(
            one_closed_a=self._one_closed_a,
            one_closed_b=self._one_closed_b,
            reflection_a=self._reflection_a,
            reflection_b=self._reflection_b,
            consistency=self._consistency[omega],
            shared_disagreements=self._shared,
        )
        in_limit = omega in trace.limit
        return AgreementReport(
            mode="knowledge" if self.knowledge else "certainty",
            event=event,
            omega=omega,
            q_a=q_a,
            q_b=q_b,
            hypotheses=hypotheses,
            trace=trace,
            omega_in_limit=in_limit,
            verdict=classify(hypotheses.failed, in_limit, q_a, q_b),
        )


def check_agreement(
    cps_a: CPS,
    cps_b: CPS,
    event: Event,
    omega: int,
    q_a: Fraction | int | str,
    q_b: Fraction | int | str,
) -> AgreementReport:
    """Classify one common-certainty run against all three hypotheses."""
    return AgreementChecker(cps_a, cps_b).check(event, omega, q_a, q_b)


def check_knowledge_agreement(
    cps_a: CPS,
    cps_b: CPS,
    event: Event,
    omega: int,
    q_a: Fraction | int | str,
    q_b: Fraction | int | str,
) -> AgreementReport:
    """Classify one common-knowledge run; local consistency is the only
    hypothesis in this mode."""
    return AgreementChecker(cps_a, cps_b, knowledge=True).check(event, omega, q_a, q_b)


def check_averaging(cps: CPS, member: Event, event: Event) -> bool:
    """If every atom inside ``member`` gives ``event`` one common value, the
    member itself must give that value.

    Returns True vacuously when the atom values differ; the caller supplies
    the common-value premise.
    """
    atoms = cps.family.atoms_in(member)
    values = {cps.measures[atom].prob(event) for atom in atoms}
    if len(values) != 1:
        return True
    return cps.prob(member, event) == values.pop()


# ---------------------------------------------------------------------------
# instance generation


@dataclass(frozen=True)
class GeneratorConfig:
    """Deterministic generation parameters.

    ``shared_lexicographic`` forces both agents onto one level sequence,
    which makes every shared conditioning event carry identical measures and
    hence local consistency hold everywhere.  ``drop`` targets the named
    hypothesis with a construction that violates it while preserving the
    others (best effort; the harness re-checks every hypothesis anyway).
    """

    state_count: int
    seed: int
    trials: int = 1
    shared_lexicographic: bool = True
    drop: str | None = None

    def __post_init__(self) -> None:
        if self.state_count < 1:
            raise ConfigError("state_count must be at least 1")
        if self.trials < 0:
            raise ConfigError("trials must be nonnegative")
        if self.drop is not None and self.drop not in DROP_CHOICES:
            raise ConfigError(f"drop must be one of {DROP_CHOICES}")


def lexicographic_cps(
    family: SetFamily,
    levels: Sequence[tuple[Event, Mapping[int, int | Fraction]]],
) -> CPS:
    """Condition every member on the first level block it meets.

    ``levels`` is an ordered sequence of (block, positive weights on the
    block's states); blocks must be pairwise disjoint and cover the space.
    The chain rule holds by construction, so the result is always valid.
    """
    space = family.space
    seen = 0
    for block, weights in levels:
        if block.mask & seen:
            raise ValueError("level blocks must be pairwise disjoint")
        seen |= block.mask
        for state, weight in weights.items():
            if state not in block:
                raise ValueError("weights must live on the block's states")
            if Fraction(weight) <= 0:
                raise ValueError("block weights must be strictly positive")
        if set(weights) != set(block):
            raise ValueError("every state of a block needs a weight")
    if seen != space.full().mask:
        raise ValueError("level blocks must cover the space")

    measures = {}
    for member in family.sorted_members():
        for block, weights in levels:
            hit = block.mask & member.mask
            if hit:
                total = sum(
                    Fraction(weights[i]) for i in Event(hit, space.size)
                )
                measures[member] = ProbMeasure(
                    {
                        i: Fraction(weights[i]) / total
                        for i in Event(hit, space.size)
                    },
                    space.size,
                )
                break
    return CPS(family, measures)


def _labels(count: int) -> tuple[str, ...]:
    if count <= 26:
        return tuple(string.ascii_lowercase[:count])
    return tuple(f"s{i}" for i in range(count))


def _random_blocks(rng: random.Random, size: int, count: int) -> list[int]:
    """Random ordered partition of the states into ``count`` nonempty blocks."""
    states = list(range(size))
    rng.shuffle(states)
    cuts = sorted(rng.sample(range(1, size), count - 1)) if count > 1 else []
    bounds = [0, *cuts, size]
    blocks = []
    for lo, hi in zip(bounds, bounds[1:]):
        mask = 0
        for state in states[lo:hi]:
            mask |= 1 << state
        blocks.append(mask)
    return blocks


def _random_level_sequence(
    rng: random.Random, space: StateSpace, *, min_blocks: int = 1
) -> list[tuple[Event, dict[int, int]]]:
    n = space.size
    count = rng.randint(min(min_blocks, n), n)
    out = []
    for mask in _random_blocks(rng, n, count):
        block = Event(mask, n)
        out.append((block, {i: rng.randint(1, 6) for i in block}))
    return out


def _single_level_sequence(
    rng: random.Random, space: StateSpace
) -> list[tuple[Event, dict[int, int]]]:
    full = space.full()
    return [(full, {i: rng.randint(1, 6) for i in full})]


def _random_partition_family(
    rng: random.Random, space: StateSpace, *, max_blocks: int | None = None
) -> SetFamily:
    """Closure of a random partition plus a few random unions of its blocks.

    Atoms of the result are exactly the partition blocks, so reflection holds
    for any measures.
    """
    n = space.size
    count = rng.randint(1, max_blocks or n)
    blocks = _random_blocks(rng, n, count)
    members = {mask for mask in blocks}
    for _ in range(rng.randint(0, 2)):
        picked = rng.sample(blocks, rng.randint(1, len(blocks)))
        mask = 0
        for b in picked:
            mask |= b
        members.add(mask)
    members.add(space.full().mask)
    family = SetFamily(space, (Event(m, n) for m in members))
    return close_family(family)


def _random_general_family(rng: random.Random, space: StateSpace) -> SetFamily:
    n = space.size
    members = {space.full().mask}
    for _ in range(rng.randint(1, 3)):
        members.add(rng.randint(1, (1 << n) - 1))
    family = SetFamily(space, (Event(m, n) for m in members))
    return close_family(family)


def generate_instance(config: GeneratorConfig, trial: int = 0) -> tuple[CPS, CPS]:
    """Deterministically generate one pair of valid spaces.

    Measures come from level sequences with disjoint full-support blocks, so
    validity holds by construction.  With ``drop`` unset and
    ``shared_lexicographic`` on, one sequence serves both agents and local
    consistency holds at every state.  Drop modes:

    * ``one_closed``: shared multi-block sequence over partition-style
      families; supports are proper subsets, so certain events typically
      escape the family, while reflection and consistency are preserved.
    * ``reflection``: a single full-support level (which makes any family
      certainty-closed) over a family with a forced nested atom; the nested
      atom cannot carry probability one, so reflection fails.
    * ``consistency``: independent single full-support levels per agent over
      partition-style families; falls back to the trivial family when the
      meet accidentally hides the difference.
    """
    rng = random.Random(f"{config.seed}:{trial}")
    space = StateSpace(_labels(config.state_count))
    n = space.size

    if config.drop is None:
        seq_a = _random_level_sequence(rng, space)
        seq_b = seq_a if config.shared_lexicographic else _random_level_sequence(rng, space)
        fams = []
        for _ in range(2):
            if rng.random() < 0.5:
                fams.append(_random_partition_family(rng, space))
            else:
                fams.append(_random_general_family(rng, space))
        return (
            lexicographic_cps(fams[0], seq_a),
            lexicographic_cps(fams[1], seq_b),
        )

    if config.drop == "one_closed":
        seq = _random_level_sequence(rng, space, min_blocks=min(2, n))
        fam_a = _random_partition_family(rng, space)
        fam_b = _random_partition_family(rng, space)
        return lexicographic_cps(fam_a, seq), lexicographic_cps(fam_b, seq)

    if config.drop == "reflection":
        seq = _single_level_sequence(rng, space)
        fam_a = _nested_atom_family(rng, space)
        fam_b = _nested_atom_family(rng, space)
        return lexicographic_cps(fam_a, seq), lexicographic_cps(fam_b, seq)

    # drop == "consistency"
    seq_a = _single_level_sequence(rng, space)
    seq_b = _single_level_sequence(rng, space)
    for _ in range(8):
        if n == 1 or seq_a[0][1] != seq_b[0][1]:
            break
        seq_b = _single_level_sequence(rng, space)
    fam_a = _random_partition_family(rng, space)
    fam_b = _random_partition_family(rng, space)
    cps_a = lexicographic_cps(fam_a, seq_a)
    cps_b = lexicographic_cps(fam_b, seq_b)
    if n > 1 and all(r.holds for r in local_consistency_map(cps_a, cps_b).values()):
        # meet atoms hid the difference; the trivial family cannot
        trivial = SetFamily(space, [space.full()])
        cps_a = lexicographic_cps(trivial, seq_a)
        cps_b = lexicographic_cps(trivial, seq_b)
    return cps_a, cps_b


def _nested_atom_family(rng: random.Random, space: StateSpace) -> SetFamily:
    """Partition-style family plus one singleton inside a larger block, so
    one atom is strictly contained in another."""
    n = space.size
    if n == 1:
        return SetFamily(space, [space.full()])
    base = _random_partition_family(rng, space, max_blocks=n - 1)
    blocks = base.algebra_atoms()
    big = next(b for b in blocks if len(b) >= 2)
    inner = min(big)
    members = set(base.members)
    members.add(Event(1 << inner, n))
    return close_family(SetFamily(space, members))


# ---------------------------------------------------------------------------
# counterexample search


@dataclass(frozen=True)
class Finding:
    """One disagreement surfaced by the search.

    ``kind`` is ``"disagreement-under-hypotheses"`` (a build-breaking defect)
    or ``"certainty-disagreement"`` (drop mode: common certainty of unequal
    values with the dropped hypothesis broken).
    """

    trial: int
    kind: str
    event: Event
    omega: int
    q_a: Fraction
    q_b: Fraction
    failed_hypotheses: tuple[str, ...]
    cps_a: CPS
    cps_b: CPS


@dataclass(frozen=True)
class SearchReport:
    config: GeneratorConfig
    trials_run: int
    tuples_checked: int
    findings: tuple[Finding, ...]

    @property
    def bug_findings(self) -> tuple[Finding, ...]:
        return tuple(
            f for f in self.findings if f.kind == "disagreement-under-hypotheses"
        )


def _disagreement_canary() -> tuple[CPS, CPS]:
    """Fixed four-state pair whose certainty judgments are strictly finer
    than their information; without certainty closure it exhibits common
    certainty of disagreement, so the closure-drop search must rediscover it."""
    space = StateSpace("abcd")
    full = space.full()
    fam_a = SetFamily(space, [space.event("ad"), space.event("bc"), full])
    fam_b = SetFamily(space, [space.event("abc"), space.event("d"), full])
    d = space.index("d")
    delta_d = ProbMeasure.dirac(d, 4)
    cps_a = CPS(
        fam_a,
        {
            full: delta_d,
            space.event("ad"): delta_d,
            space.event("bc"): ProbMeasure.dirac(space.index("b"), 4),
        },
    )
    cps_b = CPS(
        fam_b,
        {
            full: delta_d,
            space.event("d"): delta_d,
            space.event("abc"): ProbMeasure.dirac(space.index("c"), 4),
        },
    )
    return cps_a, cps_b


def _trial_pair(config: GeneratorConfig, trial: int) -> tuple[CPS, CPS]:
    if config.drop == "one_closed" and trial == 0:
        return _disagreement_canary()
    pair = generate_instance(config, trial)
    if config.drop is None:
        # full-hypotheses mode: enforce certainty closure on both agents
        return extend(pair[0]).extended_cps, extend(pair[1]).extended_cps
    return pair


def search_counterexamples(config: GeneratorConfig) -> SearchReport:
    """Run the configured trials and collect every disagreement.

    Candidate tuples come from achieved fiber values: for each event and
    state, the pair of atom-conditional probabilities the two agents actually
    assign there.  Only achieved values can give nonempty starting fibers.
    Trials are independent and results are merged in trial order, so the
    report is deterministic for a given config.
    """
    findings: list[Finding] = []
    tuples_checked = 0
    for trial in range(config.trials):
        cps_a, cps_b = _trial_pair(config, trial)
        checker = AgreementChecker(cps_a, cps_b)
        n = cps_a.space.size
        for emask in range(1 << n):
            event = Event(emask, n)
            achieved: dict[tuple[Fraction, Fraction], list[int]] = {}
            for omega in range(n):
                pair = (
                    cps_a.atom_measure(omega).prob(event),
                    cps_b.atom_measure(omega).prob(event),
                )
                achieved.setdefault(pair, []).append(omega)
            for (q_a, q_b), omegas in sorted(achieved.items()):
                for omega in omegas:
                    report = checker.check(event, omega, q_a, q_b)
                    tuples_checked += 1
                    if report.verdict is Verdict.DISAGREEMENT_UNDER_HYPOTHESES:
                        findings.append(
                            Finding(
                                trial, "disagreement-under-hypotheses",
                                event, omega, q_a, q_b,
                                report.failed_hypotheses, cps_a, cps_b,
                            )
                        )
                    elif (
                        config.drop is not None
                        and report.omega_in_limit
                        and q_a != q_b
                    ):
                        findings.append(
                            Finding(
                                trial, "certainty-disagreement",
                                event, omega, q_a, q_b,
                                report.failed_hypotheses, cps_a, cps_b,
                            )
                        )
    return SearchReport(config, config.trials, tuples_checked, tuple(findings))
