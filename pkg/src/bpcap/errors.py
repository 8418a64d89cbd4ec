"""Exception hierarchy shared by all bpcap modules.

Every failure mode that callers are expected to handle gets its own class;
the CLI maps them onto exit codes (schema=2, precision=3, domain=4).
"""


class BPCapError(Exception):
    """Base class for all library errors."""


class InvalidOperand(BPCapError):
    """Operands belong to incompatible structures (e.g. different primes)."""


class NotInvertible(BPCapError):
    """Inversion of a non-unit was requested."""


class DomainError(BPCapError):
    """Input lies outside the mathematical domain of the operation."""


class HenselFailure(BPCapError):
    """Newton/Hensel lifting criterion is not satisfied."""


class PrecisionExhausted(BPCapError):
    """The working precision does not suffice to decide the question."""


class NotAField(BPCapError):
    """A defining polynomial is reducible (or degenerate)."""


class NotKummer(BPCapError):
    """Galois action requested on a tower whose base lacks the p-th roots of unity."""


class NotMonogenicAtQ(BPCapError):
    """The power order Z[theta] cannot be certified maximal at q; analysis aborted."""


class IncompleteFactorization(BPCapError):
    """Trial division left a cofactor; the ideal factorization is not complete."""


class InsufficientClassData(BPCapError):
    """An ideal class is not representable with the supplied class-group data."""


class NotASublattice(BPCapError):
    """Lattice index requested for a pair that is not nested (beyond noise)."""


class LeopoldtRankWarning(BPCapError):
    """The unit-log matrix is rank deficient at working precision."""


class SchemaError(BPCapError):
    """A job file violates the frozen input schema."""

    def __init__(self, messages):
        if isinstance(messages, str):
            messages = [messages]
        self.messages = list(messages)
        super().__init__("; ".join(self.messages))
