"""Exception types shared across the package."""


class TriprimeError(Exception):
    """Base class for every error raised by this package."""


class ResourceError(TriprimeError):
    """A configured cap (memory, term count, search range) would be exceeded."""


class PrincipalCharacterError(TriprimeError, ValueError):
    """An analytic operation was handed the principal character."""


class PreconditionError(TriprimeError, ValueError):
    """Inputs fall outside the regime in which a check is meaningful."""


class ModulusMismatchError(TriprimeError, ValueError):
    pass


class HypothesisFailure(TriprimeError):
    """A hypothesis the proof relies on does not hold for the given data."""


class NotCoveredError(TriprimeError):
    """Requested residue class is not a product of three primes below the threshold."""

    def __init__(self, q, P, a, missing):
        self.q, self.P, self.a, self.missing = q, P, a, tuple(missing)
        super().__init__(
            f"class {a} mod {q} is not covered with primes <= {P} "
            f"({len(self.missing)} classes missing)"
        )


class TheoremViolation(TriprimeError):
    """A computed quantity contradicts a proved statement. Should never fire."""
