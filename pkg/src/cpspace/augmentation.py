"""Certainty closure: promote every certain event to a conditioning event and
extend the measures to the enlarged family.

The extension pipeline works through the dimensionally ordered
representation: each block of the enlarged family's algebra is assigned the
level of a conditioning event witnessing it (or a fresh bottom level when no
witness exists), finite weights are taken from that level (uniform on bottom
blocks), and infinity is stacked below higher blocks.  The resulting levels
regenerate the extended space.

The extension adds no further certain events, so applying it twice changes
nothing, and a space is exactly closed when the enlarged family equals the
original one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping

from .assumptions import OneClosedReport, certain_events, check_one_closed
from .cps import CPS
from .dimensional import (
    DimOrderedFamily,
    ExtMeasure,
    active_level,
    regenerate,
    represent,
)
from .errors import InternalInvariantError, InvalidCPS
from .foundations import Event, SetFamily, close_family

# dimension index of the added bottom level, below every representation level
GAMMA_0 = -1


@dataclass(frozen=True)
class AugmentationResult:
    """Everything the extension pipeline produced.

    ``dimensions`` maps each algebra block to the index of its level in the
    input representation, or ``GAMMA_0`` for blocks no conditioning event
    witnesses; ``witness_map`` records the witnessing event when one exists.
    ``levels`` is the extended level family (bottom level first), which
    regenerates ``extended_cps`` over ``augmented_family``.
    """

    augmented_family: SetFamily
    extended_cps: CPS
    atoms: tuple[Event, ...]
    dimensions: Mapping[Event, int]
    witness_map: Mapping[Event, Event | None]
    levels: DimOrderedFamily


def _require_valid(cps: CPS) -> None:
    report = cps.validate()
    if not report.ok:
        raise InvalidCPS(
            f"operation requires a valid space ({len(report.violations)} violations)"
        )


def augment_family(cps: CPS) -> SetFamily:
    """Smallest closed covering family containing every certain event.

    Covering is automatic because the certain events contain the original
    family, which covers.
    """
    _require_valid(cps)
    return close_family(certain_events(cps))


def extend(cps: CPS) -> AugmentationResult:
    """Extend a valid space to its certainty closure.

    The restriction of the result to the original family equals the input
    measure-for-measure; this and the validity of the output are re-checked
    mechanically before returning.
    """
    _require_valid(cps)
    dof = represent(cps)
    enlarged = close_family(certain_events(cps))
    blocks = enlarged.algebra_atoms()
    width = cps.space.size

    gamma = {member: active_level(dof, member) for member in cps.family.sorted_members()}

    dimensions: dict[Event, int] = {}
    witnesses: dict[Event, Event | None] = {}
    for block in blocks:
        level = None
        witness = None
        for member in cps.family.sorted_members():
            if not block <= member:
                continue
            at = gamma[member]
            value = dof.levels[at].value(block)
            if value.is_infinite or value.is_zero:
                continue
            if level is None:
                level, witness = at, member
            elif level != at:
                raise InternalInvariantError(
                    "two witnesses of one algebra block have different active levels"
                )
        dimensions[block] = GAMMA_0 if level is None else level
        witnesses[block] = witness

    extended_levels = []
    for eta in [GAMMA_0] + list(range(len(dof.levels))):
        weights: dict[int, Fraction] = {}
        inf_mask = 0
        for block in blocks:
            dim = dimensions[block]
            if dim == eta:
                if eta == GAMMA_0:
                    # no witness: any full-support choice works; uniform is
                    # the canonical deterministic one
                    share = Fraction(1, len(block))
                    for state in block:
                        weights[state] = share
                else:
                    base = dof.levels[eta]
                    for state in block:
                        w = base.finite_weight(state)
                        if w:
                            weights[state] = w
            elif dim > eta:
                inf_mask |= block.mask
        extended_levels.append(ExtMeasure(width, weights, inf_mask))
    levels = DimOrderedFamily(tuple(extended_levels))

    extended = regenerate(levels, enlarged)

    # the active level of an original member must be unchanged (shifted by
    # the added bottom level), and its measure must be preserved exactly
    for member in cps.family.sorted_members():
        if active_level(levels, member) != gamma[member] + 1:
            raise InternalInvariantError(
                "extension moved the active level of a conditioning event"
            )
        if extended.measures[member] != cps.measures[member]:
            raise InternalInvariantError(
                "extension changed the measure of a conditioning event"
            )
    report = extended.validate()
    if not report.ok:
        raise InternalInvariantError("extension produced an invalid space")

    return AugmentationResult(
        augmented_family=enlarged,
        extended_cps=extended,
        atoms=blocks,
        dimensions=MappingProxyType(dimensions),
        witness_map=MappingProxyType(witnesses),
        levels=levels,
    )


def verify_no_new_ones(result: AugmentationResult) -> OneClosedReport:
    """Check that the extension introduced no further certain events."""
    return check_one_closed(result.extended_cps)


def verify_idempotent(cps: CPS) -> bool:
    """Augmenting the extended space must reproduce the same family."""
    result = extend(cps)
    return augment_family(result.extended_cps) == result.augmented_family


def is_fixed_point(cps: CPS) -> bool:
    """True iff augmentation leaves the conditioning family unchanged."""
    return augment_family(cps) == cps.family
