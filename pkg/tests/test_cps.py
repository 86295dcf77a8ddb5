"""Measures, space validity, and the certainty/knowledge/fiber operators."""

import itertools
import random
from fractions import Fraction

import pytest

from cpspace import (
    CPS,
    Event,
    NotMember,
    ProbMeasure,
    SetFamily,
    StateSpace,
    StructureError,
)

from conftest import enumerate_closed_families

HALF = Fraction(1, 2)


class TestProbMeasure:
    def test_basics(self):
        pm = ProbMeasure({0: HALF, 2: HALF, 3: 0}, 4)
        assert pm.weight(0) == HALF
        assert pm.weight(1) == 0
        assert pm.prob(Event(0b0101, 4)) == 1
        assert pm.prob(Event(0b0010, 4)) == 0
        assert pm.support().mask == 0b0101
        assert pm.is_normalized
        # zero weights are dropped, so equality is extensional
        assert pm == ProbMeasure({0: HALF, 2: HALF}, 4)

    def test_dirac_and_uniform(self):
        assert ProbMeasure.dirac(1, 3).items() == ((1, Fraction(1)),)
        uniform = ProbMeasure.uniform(Event(0b110, 3))
        assert uniform.weight(1) == uniform.weight(2) == HALF

    def test_rejects_bad_weights(self):
        with pytest.raises(ValueError):
            ProbMeasure({0: Fraction(-1, 2)}, 2)
        with pytest.raises(ValueError):
            ProbMeasure({5: 1}, 2)
        with pytest.raises(ValueError):
            ProbMeasure.uniform(Event(0, 2))

    def test_unnormalized_is_representable(self):
        pm = ProbMeasure({0: Fraction(5, 6)}, 2)
        assert not pm.is_normalized
        assert pm.total() == Fraction(5, 6)


class TestConstruction:
    def test_measure_map_must_match_family(self, space4):
        family = SetFamily(space4, [space4.full(), space4.event("ab")])
        full_measure = ProbMeasure.dirac(0, 4)
        with pytest.raises(StructureError):
            CPS(family, {space4.full(): full_measure})
        with pytest.raises(StructureError):
            CPS(
                family,
                {
                    space4.full(): full_measure,
                    space4.event("ab"): full_measure,
                    space4.event("cd"): full_measure,
                },
            )

    def test_prob_requires_membership(self, disagreement_pair, space4):
        cps_a, _ = disagreement_pair
        assert cps_a.prob(space4.full(), space4.event("d")) == 1
        with pytest.raises(NotMember):
            cps_a.prob(space4.event("ab"), space4.event("a"))


class TestValidate:
    def test_worked_examples_are_valid(
        self, disagreement_pair, agreement_pair, certain_not_knowing
    ):
        for cps in (*disagreement_pair, *agreement_pair, certain_not_knowing):
            assert cps.validate().ok

    def test_chain_rule_witness_triple(self, space4):
        # moving the nested point mass breaks the only non-vacuous constraint
        full = space4.full()
        fam = SetFamily(space4, [space4.event("ad"), space4.event("bc"), full])
        cps = CPS(
            fam,
            {
                full: ProbMeasure.dirac(space4.index("d"), 4),
                space4.event("ad"): ProbMeasure.dirac(space4.index("a"), 4),
                space4.event("bc"): ProbMeasure.dirac(space4.index("b"), 4),
            },
        )
        report = cps.validate()
        assert not report.ok
        kinds = {v.kind for v in report.violations}
        assert kinds == {"chain-rule"}
        witness = report.violations[0]
        assert witness.member == full
        assert witness.inner == space4.event("ad")
        assert witness.event in (space4.event("a"), space4.event("d"))

    def test_trivial_family_is_valid(self):
        space = StateSpace("ab")
        family = SetFamily(space, [space.full()])
        cps = CPS(family, {space.full(): ProbMeasure({0: HALF, 1: HALF}, 2)})
        assert cps.validate().ok

    def test_normalization_violation(self):
        space = StateSpace("ab")
        family = SetFamily(space, [space.full()])
        cps = CPS(family, {space.full(): ProbMeasure({0: Fraction(5, 6)}, 2)})
        report = cps.validate()
        kinds = [v.kind for v in report.violations]
        assert "normalization" in kinds
        assert "concentration" in kinds

    def test_structure_errors_precede_measure_checks(self, space4):
        uncovering = SetFamily(space4, [space4.event("ab")])
        cps = CPS(uncovering, {space4.event("ab"): ProbMeasure.dirac(0, 4)})
        with pytest.raises(StructureError):
            cps.validate()

        unclosed = SetFamily(space4, [space4.event("ab"), space4.event("cd")])
        cps = CPS(
            unclosed,
            {
                space4.event("ab"): ProbMeasure.dirac(0, 4),
                space4.event("cd"): ProbMeasure.dirac(2, 4),
            },
        )
        with pytest.raises(StructureError):
            cps.validate()

    def test_singleton_check_equals_brute_force(self):
        # random dyadic measures, valid or not: the singleton chain-rule scan
        # and the all-subsets oracle must find violations together
        space = StateSpace("abc")
        rng = random.Random("chain-oracle")
        families = enumerate_closed_families(space, max_generators=2)
        for family in families:
            for _ in range(6):
                measures = {}
                for member in family.sorted_members():
                    weights = {i: Fraction(rng.randint(0, 4), 4) for i in member}
                    measures[member] = ProbMeasure(weights, 3)
                cps = CPS(family, measures)
                report = cps.validate()
                singleton_found = any(
                    v.kind == "chain-rule" for v in report.violations
                )
                brute_found = False
                members = family.sorted_members()
                for inner in members:
                    for outer in members:
                        if inner == outer or not inner <= outer:
                            continue
                        for emask in range(1 << 3):
                            event = Event(emask & inner.mask, 3)
                            left = cps.prob(outer, event)
                            right = cps.prob(outer, inner) * cps.prob(inner, event)
                            if left != right:
                                brute_found = True
                assert singleton_found == brute_found


class TestOperators:
    def test_certainty_examples(self, disagreement_pair, space4):
        cps_a, cps_b = disagreement_pair
        assert cps_a.certainty_event(space4.event("bc")) == space4.event("bc")
        assert cps_b.certainty_event(space4.event("bc")) == space4.event("abc")
        assert cps_a.certainty_event(space4.full()) == space4.full()

    def test_knowledge_examples(self, disagreement_pair, certain_not_knowing, space4):
        cps_a, _ = disagreement_pair
        assert cps_a.knowledge_event(space4.event("bc")) == space4.event("bc")
        assert cps_a.knowledge_event(space4.full()) == space4.full()

        space = certain_not_knowing.space
        target = space.event("a")
        assert certain_not_knowing.certainty_event(target) == space.full()
        assert certain_not_knowing.knowledge_event(target) == space.event("a")

    def test_fiber_examples(self, disagreement_pair, agreement_pair, space4):
        cps_a, cps_b = disagreement_pair
        b = space4.event("b")
        assert cps_a.belief_fiber(b, 1) == space4.event("bc")
        assert cps_b.belief_fiber(b, 0) == space4.full()
        ag_a, _ = agreement_pair
        assert ag_a.belief_fiber(space4.event("a"), HALF) == space4.event("ab")

    def test_fiber_rejects_out_of_range(self, disagreement_pair, space4):
        with pytest.raises(ValueError):
            disagreement_pair[0].belief_fiber(space4.event("b"), Fraction(3, 2))

    def test_knowledge_within_certainty_all_events(
        self, disagreement_pair, agreement_pair, certain_not_knowing
    ):
        for cps in (*disagreement_pair, *agreement_pair, certain_not_knowing):
            n = cps.space.size
            for emask in range(1 << n):
                event = Event(emask, n)
                assert cps.knowledge_event(event) <= cps.certainty_event(event)

    def test_fibers_partition_the_space(self, corpus_small):
        for cps in corpus_small[::7]:
            n = cps.space.size
            for emask in range(1 << n):
                event = Event(emask, n)
                values = {cps.atom_measure(i).prob(event) for i in range(n)}
                union = 0
                for value in values:
                    fiber = cps.belief_fiber(event, value)
                    assert fiber
                    assert union & fiber.mask == 0
                    union |= fiber.mask
                assert union == cps.space.full().mask
                assert cps.certainty_event(event) == cps.belief_fiber(event, 1)

    def test_corpus_is_valid(self, corpus_small):
        for cps in corpus_small:
            assert cps.validate().ok
