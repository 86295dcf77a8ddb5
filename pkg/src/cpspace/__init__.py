"""Exact-arithmetic toolkit for finite conditional probability spaces.

Core objects: bit-mask events over a labeled state space, closed covering
families of conditioning events, and one exact rational measure per
conditioning event.  On top of these live the certainty and knowledge
operators, the mutual-certainty and mutual-knowledge fixed points, hypothesis
checkers (certainty closure, reflection, local consistency), the
dimensionally ordered level representation with its round trip, the
certainty-closure augmentation, and an agreement harness with deterministic
instance generation and counterexample search.
"""

from .agreement import (
    AgreementChecker,
    AgreementReport,
    Finding,
    GeneratorConfig,
    HypothesisReport,
    SearchReport,
    Verdict,
    check_agreement,
    check_averaging,
    check_knowledge_agreement,
    classify,
    generate_instance,
    lexicographic_cps,
    search_counterexamples,
)
from .assumptions import (
    AssumptionReport,
    LocalConsistencyReport,
    OneClosedReport,
    ReflectionReport,
    SharedDisagreement,
    assumption_report,
    certain_events,
    check_local_consistency,
    check_one_closed,
    check_reflection,
    check_reflection_atoms,
    check_reflection_direct,
    local_consistency_map,
    shared_event_disagreements,
)
from .augmentation import (
    GAMMA_0,
    AugmentationResult,
    augment_family,
    extend,
    is_fixed_point,
    verify_idempotent,
    verify_no_new_ones,
)
from .cps import CPS, ProbMeasure, ValidationReport, Violation
from .dimensional import (
    DimOrderedFamily,
    Dominance,
    ExtMeasure,
    LevelCheck,
    dominance,
    regenerate,
    represent,
    verify_levels,
)
from .epistemic import (
    RecursionTrace,
    common_certainty,
    common_knowledge,
    member_of_limit,
)
from .errors import (
    ConfigError,
    CpspaceError,
    DuplicateMemberError,
    InstanceError,
    InternalInvariantError,
    InternalOrderError,
    InvalidCPS,
    NotCovering,
    NotMember,
    NotOneClosed,
    ParseError,
    SpaceMismatch,
    StructureError,
    TooLarge,
    UnknownLabelError,
    UsageError,
    VerifyFailed,
)
from .foundations import (
    INFINITY,
    Event,
    ExtValue,
    Rational,
    SetFamily,
    StateSpace,
    canonical_order,
    close_family,
)
from .instances import (
    Instance,
    Query,
    format_rational,
    instance_to_obj,
    parse_instance,
    parse_rational,
    serialize_instance,
)

__version__ = "0.1.0"
