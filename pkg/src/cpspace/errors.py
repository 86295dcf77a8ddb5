"""Exception hierarchy shared across the library."""


class CpspaceError(Exception):
    """Base class for all library errors."""


class SpaceMismatch(CpspaceError):
    """Two objects that must live over the same state space do not."""


class NotCovering(CpspaceError):
    """No family member contains the requested state."""


class NotMember(CpspaceError):
    """The given event is not a member of the family."""


class StructureError(CpspaceError):
    """A family fails the standing closure or covering requirements, or a
    space and its measures are misaligned."""


class InvalidCPS(CpspaceError):
    """An operation requires a valid conditional probability space."""


class NotOneClosed(CpspaceError):
    """The atom-based reflection checker was asked to judge a space whose
    certain events are not all conditioning events; its verdict would be
    unreliable, so it refuses."""


class TooLarge(CpspaceError):
    """A brute-force check over all events was requested beyond its size cap
    without the explicit override."""


class VerifyFailed(CpspaceError):
    """A level family does not satisfy the dimensional-ordering conditions."""


class InternalInvariantError(CpspaceError):
    """A structural fact that holds for every valid input was contradicted at
    runtime; this signals an implementation defect, not bad input."""


class InternalOrderError(InternalInvariantError):
    """The dominance relation computed for a valid space failed to be a
    strict total order on its equivalence classes."""


class ConfigError(CpspaceError):
    """A generator or search configuration is out of range."""


class InstanceError(CpspaceError):
    """Base class for instance-file problems."""


class ParseError(InstanceError):
    """The instance document is malformed."""


class UnknownLabelError(InstanceError):
    """A label in the instance document does not name a state."""


class DuplicateMemberError(InstanceError):
    """A family lists the same event twice, or an event has two measures."""


class UsageError(CpspaceError):
    """Bad command-line arguments."""
