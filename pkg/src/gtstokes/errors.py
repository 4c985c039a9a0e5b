"""Exception hierarchy shared by all modules."""


class GTStokesError(Exception):
    """Base class for every error raised by the package."""


class NotHermitianError(GTStokesError, ValueError):
    pass


class ConeViolationError(GTStokesError, ValueError):
    """Input lies on (or too close to) the boundary of the open GT cone.

    Parameters
    ----------
    level : int
        Smallest level k at which an interlacing gap falls below tolerance.
    gap : float
        The offending gap.
    """

    def __init__(self, level, gap, tol):
        self.level = level
        self.gap = gap
        self.tol = tol
        super().__init__(
            f"interlacing gap {gap:.3e} at level {level} is below tolerance {tol:.3e}")


class AngleUndefinedError(GTStokesError, ValueError):
    def __init__(self, level, index, modulus):
        self.level = level
        self.index = index
        self.modulus = modulus
        super().__init__(
            f"|a^({level})_{index}| = {modulus:.3e} is below the modulus floor; angle undefined")


class FormulaDomainError(GTStokesError, ArithmeticError):
    """A closed formula left its domain (negative radicand, Gamma pole, ...)."""


class FactorizationError(GTStokesError, ArithmeticError):
    def __init__(self, pivot, value=None):
        self.pivot = pivot
        self.value = value
        msg = f"Cholesky factorization failed at pivot {pivot}"
        if value is not None:
            msg += f" (leading minor {value:.3e})"
        super().__init__(msg)


class ChamberError(GTStokesError, ValueError):
    """Deformation parameter u outside the chamber u_1 < ... < u_n."""


class OracleError(GTStokesError, RuntimeError):
    pass


class ParseError(GTStokesError, ValueError):
    """Malformed JSON input; ``field`` locates the problem."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
