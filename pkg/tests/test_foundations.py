"""Spaces, events, extended values, families, closure, atoms, partitions."""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cpspace import (
    INFINITY,
    Event,
    ExtValue,
    NotCovering,
    NotMember,
    SetFamily,
    SpaceMismatch,
    StateSpace,
    canonical_order,
    close_family,
)

from conftest import enumerate_closed_families


def masks(family: SetFamily) -> set[int]:
    return {e.mask for e in family.members}


class TestStateSpace:
    def test_basics(self):
        space = StateSpace("abcd")
        assert space.size == 4
        assert space.index("c") == 2
        assert space.labels(space.event("db")) == ("b", "d")
        assert space.format_event(space.event("ad")) == "{a,d}"

    def test_rejects_bad_labels(self):
        with pytest.raises(ValueError):
            StateSpace([])
        with pytest.raises(ValueError):
            StateSpace(["a", "a"])
        with pytest.raises(ValueError):
            StateSpace(["a", ""])
        with pytest.raises(ValueError):
            StateSpace("ab").index("z")


class TestEvent:
    def test_set_operations(self):
        a = Event(0b0110, 4)
        b = Event(0b0011, 4)
        assert (a | b).mask == 0b0111
        assert (a & b).mask == 0b0010
        assert (a - b).mask == 0b0100
        assert Event(0b0010, 4) <= a
        assert Event(0b0010, 4) < a
        assert not a < a
        assert list(a) == [1, 2]
        assert len(a) == 2
        assert 1 in a and 0 not in a
        assert not Event(0, 4)

    def test_width_checks(self):
        with pytest.raises(ValueError):
            Event(0b100, 2)
        with pytest.raises(ValueError):
            Event.from_indices([5], 3)
        with pytest.raises(SpaceMismatch):
            Event(1, 2) | Event(1, 3)

    def test_canonical_order_puts_subsets_first(self):
        events = [Event(m, 3) for m in (0b111, 0b011, 0b100, 0b010)]
        ordered = canonical_order(events)
        assert [e.mask for e in ordered] == [0b010, 0b100, 0b011, 0b111]
        for i, small in enumerate(ordered):
            for large in ordered[i + 1 :]:
                assert not large < small


class TestExtValue:
    def test_absorption(self):
        assert ExtValue(3) + INFINITY == INFINITY
        assert INFINITY + INFINITY == INFINITY
        assert ExtValue(Fraction(1, 3)) + ExtValue(Fraction(2, 3)) == ExtValue(1)
        assert sum([ExtValue(1), ExtValue(2)], ExtValue(0)) == ExtValue(3)

    def test_division(self):
        assert ExtValue(Fraction(1, 2)).divided_by(ExtValue(2)) == Fraction(1, 4)
        with pytest.raises(ArithmeticError):
            ExtValue(1).divided_by(ExtValue(0))
        with pytest.raises(ArithmeticError):
            ExtValue(1).divided_by(INFINITY)
        with pytest.raises(ArithmeticError):
            INFINITY.divided_by(ExtValue(1))

    def test_ordering_and_predicates(self):
        assert ExtValue(5) < INFINITY
        assert ExtValue(0).is_zero and not INFINITY.is_zero
        assert INFINITY.is_infinite and not ExtValue(7).is_infinite
        with pytest.raises(ValueError):
            ExtValue(-1)

    @given(
        st.one_of(st.none(), st.fractions(min_value=0, max_value=100)),
        st.one_of(st.none(), st.fractions(min_value=0, max_value=100)),
    )
    def test_addition_commutes(self, x, y):
        a, b = ExtValue(x), ExtValue(y)
        assert a + b == b + a


def naive_closure(members: set[int]) -> set[int]:
    out = set(members)
    changed = True
    while changed:
        changed = False
        for a, b in itertools.product(list(out), repeat=2):
            for c in (a | b, a & b):
                if c and c not in out:
                    out.add(c)
                    changed = True
    return out


class TestCloseFamily:
    def test_examples(self, space4):
        generators = SetFamily(space4, [space4.event("ad"), space4.event("bc")])
        closed = close_family(generators)
        assert masks(closed) == {
            space4.event("ad").mask,
            space4.event("bc").mask,
            space4.full().mask,
        }

        already = SetFamily(
            space4, [space4.event("ad"), space4.event("bc"), space4.full()]
        )
        assert close_family(already) == already

        trivial = SetFamily(space4, [space4.full()])
        assert close_family(trivial) == trivial

    def test_rejects_empty_generators(self, space4):
        with pytest.raises(ValueError):
            close_family(SetFamily(space4, []))

    def test_matches_naive_fixpoint_exhaustively(self):
        space = StateSpace("abc")
        events = [Event(m, 3) for m in range(1, 8)]
        for count in (1, 2, 3):
            for combo in itertools.combinations(events, count):
                family = SetFamily(space, combo)
                assert masks(close_family(family)) == naive_closure(
                    {e.mask for e in combo}
                )

    @given(st.sets(st.integers(min_value=1, max_value=31), min_size=1, max_size=5))
    def test_matches_naive_fixpoint_random(self, generator_masks):
        space = StateSpace("abcde")
        family = SetFamily(space, [Event(m, 5) for m in generator_masks])
        assert masks(close_family(family)) == naive_closure(generator_masks)

    @given(st.sets(st.integers(min_value=1, max_value=15), min_size=1, max_size=4))
    def test_idempotent_and_monotone(self, generator_masks):
        space = StateSpace("abcd")
        family = SetFamily(space, [Event(m, 4) for m in generator_masks])
        closed = close_family(family)
        assert family.members <= closed.members
        assert close_family(closed) == closed


class TestCovers:
    def test_examples(self, space4, disagreement_pair):
        assert disagreement_pair[0].family.covers()
        space = StateSpace("abc")
        assert not SetFamily(space, [space.event("ab")]).covers()
        assert not SetFamily(space, []).covers()


class TestAtomOf:
    def test_examples(self, space4, disagreement_pair):
        fam_a = disagreement_pair[0].family
        assert fam_a.atom_of(space4.index("b")) == space4.event("bc")
        trivial = SetFamily(space4, [space4.full()])
        assert trivial.atom_of(0) == space4.full()

    def test_not_covering(self):
        space = StateSpace("abc")
        family = SetFamily(space, [space.event("ab")])
        with pytest.raises(NotCovering):
            family.atom_of(space.index("c"))

    def test_atom_is_minimum_member(self):
        space = StateSpace("abcd")
        for family in enumerate_closed_families(space, budget=60):
            for state in range(space.size):
                atom = family.atom_of(state)
                assert atom in family.members
                assert state in atom
                for member in family.members:
                    if state in member:
                        assert atom <= member


class TestMeet:
    def test_examples(self, space4, disagreement_pair, agreement_pair):
        meet1 = disagreement_pair[0].family.meet(disagreement_pair[1].family)
        assert masks(meet1) == {space4.full().mask}

        meet2 = agreement_pair[0].family.meet(agreement_pair[1].family)
        assert masks(meet2) == {
            space4.event("ab").mask,
            space4.event("cd").mask,
            space4.full().mask,
        }

    def test_idempotent(self, disagreement_pair):
        family = disagreement_pair[0].family
        assert family.meet(family) == family

    def test_space_mismatch(self, space4):
        other = SetFamily(StateSpace("xy"), [StateSpace("xy").full()])
        with pytest.raises(SpaceMismatch):
            SetFamily(space4, [space4.full()]).meet(other)


class TestAlgebraAtoms:
    def test_examples(self, space4, disagreement_pair):
        fam_a = disagreement_pair[0].family
        assert [e.mask for e in fam_a.algebra_atoms()] == [
            space4.event("bc").mask,
            space4.event("ad").mask,
        ]
        trivial = SetFamily(space4, [space4.full()])
        assert trivial.algebra_atoms() == (space4.full(),)

    def test_augmented_family_splits_to_singletons(self, space4):
        members = [
            space4.event(x)
            for x in ("b", "c", "d", "ad", "bc", "bd", "cd", "abd", "acd", "bcd", "abcd")
        ]
        family = SetFamily(space4, members)
        assert [e.mask for e in family.algebra_atoms()] == [1, 2, 4, 8]

    def test_partition_property(self):
        space = StateSpace("abcd")
        for family in enumerate_closed_families(space, budget=60):
            blocks = family.algebra_atoms()
            union = 0
            for block in blocks:
                assert block
                assert union & block.mask == 0
                union |= block.mask
            assert union == space.full().mask
            for member in family.members:
                covered = 0
                for block in blocks:
                    if block <= member:
                        covered |= block.mask
                assert covered == member.mask


class TestAtomsIn:
    def test_examples(self, space4, disagreement_pair, agreement_pair):
        fam_a = disagreement_pair[0].family
        # equal cardinality, numeric bit pattern breaks the tie
        assert fam_a.atoms_in(space4.full()) == (
            space4.event("bc"),
            space4.event("ad"),
        )
        fam2 = agreement_pair[0].family
        assert fam2.atoms_in(space4.full()) == (
            space4.event("c"),
            space4.event("d"),
            space4.event("ab"),
        )
        atom = fam_a.atom_of(space4.index("b"))
        assert fam_a.atoms_in(atom) == (atom,)

    def test_not_member(self, space4, disagreement_pair):
        with pytest.raises(NotMember):
            disagreement_pair[0].family.atoms_in(space4.event("ab"))

    def test_ordered_decomposition(self):
        # union recovers the member; the running-union overlap with each atom
        # is the union of its strictly smaller predecessors
        space = StateSpace("abcd")
        for family in enumerate_closed_families(space, budget=80):
            for member in family.members:
                atoms = family.atoms_in(member)
                union = 0
                for atom in atoms:
                    union |= atom.mask
                assert union == member.mask
                for j in range(1, len(atoms)):
                    running = 0
                    for earlier in atoms[:j]:
                        running |= earlier.mask
                    expected = 0
                    for r in range(j):
                        if atoms[r] < atoms[j]:
                            expected |= atoms[r].mask
                    assert running & atoms[j].mask == expected
                for r in range(len(atoms)):
                    for s in range(len(atoms)):
                        if atoms[r] < atoms[s]:
                            assert r < s


class TestIsSaturated:
    def test_examples(self, space4, disagreement_pair):
        fam_a = disagreement_pair[0].family
        assert fam_a.is_saturated(space4.event("bc"))
        assert not fam_a.is_saturated(space4.event("b"))
        assert fam_a.is_saturated(space4.empty())

    def test_nonempty_saturated_events_are_members(self):
        space = StateSpace("abc")
        for family in enumerate_closed_families(space, max_generators=3):
            for mask in range(1, 8):
                event = Event(mask, 3)
                if family.is_saturated(event):
                    assert event in family.members
