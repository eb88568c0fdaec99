"""Typed errors.

Every failure mode of the library is a subclass of ToprecError, so callers
(and the CLI) can distinguish "the mathematics rejected your input" from
ordinary programming errors.  Nothing here is ever silently downgraded:
exactness is the product, so a computation either succeeds exactly or raises.
"""


class ToprecError(Exception):
    """Base class for all library errors."""


# -- exact algebra ----------------------------------------------------------

class TruncationExhausted(ToprecError):
    """A series coefficient beyond the guaranteed truncation was requested."""


class ZeroDivisionPoly(ToprecError):
    """Division by the zero polynomial (or zero monomial)."""


# -- spectral curves --------------------------------------------------------

class NotRegular(ToprecError):
    """X' and Y' share a zero: the plane curve is not regular."""


class RamificationNotRational(ToprecError):
    """Some zero of X' is irrational; the engine only handles rational ones."""


class RamificationNotSimple(ToprecError):
    """X'' vanishes at a ramification point (higher-order branching)."""


class DegenerateKernel(ToprecError):
    """The recursion-kernel denominator failed to have an exact double zero."""


class DegenerateCurve(ToprecError):
    """The parametrization identifies sheets globally; recursion refused."""


class EvalAtPole(ToprecError):
    """A tensor form was evaluated at one of its poles."""


# -- (p,q) layer ------------------------------------------------------------

class NotHomogeneousPair(ToprecError):
    """q*f*g' - p*g*f' is not a nonzero constant."""


class UnsupportedModel(ToprecError):
    """The requested (p,q) family is outside the supported set."""


class CompatibilityViolation(ToprecError):
    """[M,L] != hbar dL/dt - hbar dM/dx after substituting the string series."""


class TauMismatch(ToprecError):
    """u^{g} != d^2/dt^2 F^(g) for some g."""


class CurveMismatch(ToprecError):
    """det(y - L[0](x)) is not proportional to the parametrization resultant."""


# -- determinantal laboratory ----------------------------------------------

class SingularPsiAt(ToprecError):
    """det Psi vanishes at a requested evaluation point."""


class IdentityViolation(ToprecError):
    """An algebraic identity that is a theorem failed: implementation defect."""


class UnexpectedPole(ToprecError):
    """A rational function acquired a pole outside its allowed pole set."""


# -- CLI / config -----------------------------------------------------------

class ConfigError(ToprecError):
    """Unparseable or inconsistent run configuration."""
