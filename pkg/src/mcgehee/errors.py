"""Exception types shared across the package.

Everything numeric that can fail in a *reportable* way gets its own class so
callers (and the CLI exit-code mapping) can distinguish bad input from a
genuinely singular computation.
"""


class McGeheeError(Exception):
    """Base class for all package-specific errors."""


class DomainError(McGeheeError, ValueError):
    """Evaluation at a point where the expression is singular or undefined
    (sqrt/log of a non-positive value, tan at a pole, |x| at 0, ...)."""


class ParseError(McGeheeError, ValueError):
    """Syntax error in a potential expression.  Carries the 0-based offset
    of the offending token."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


class UnknownFunctionError(ParseError):
    """Call to a function name outside the supported table."""


class UnboundParameterError(McGeheeError, ValueError):
    """Expression references a parameter with no bound value."""


class UnknownBuiltinError(McGeheeError, ValueError):
    """Requested builtin potential does not exist."""


class SpecError(McGeheeError, ValueError):
    """Potential spec file violates the schema.  Message names the field."""


class DegeneratePotentialError(McGeheeError):
    """V' vanishes identically (up to tolerance) on the sampling grid, so
    critical points are not isolated and certification is meaningless."""


class PoleEncounteredError(McGeheeError):
    """Evaluation failed at an interior grid point while scanning for
    critical points (a pole or branch cut off the guard band)."""

    def __init__(self, theta: float, reason: str = ""):
        msg = f"potential evaluation failed at theta={theta!r}"
        super().__init__(msg + (f": {reason}" if reason else ""))
        self.theta = theta


class StepUnderflowError(McGeheeError):
    """The adaptive integrator could not accept even a first step before the
    step size underflowed (after any progress, underflow is reported as a
    trajectory termination reason instead)."""


class LeftDomainError(McGeheeError):
    """Integration could not start because the state sits outside the
    potential's angular domain (mid-orbit exits are reported as a
    trajectory termination reason instead)."""


class NotCriticalPointError(McGeheeError, ValueError):
    """An angle handed to the certifier or equilibrium analysis is not a
    critical point of V."""


class DomainViolationError(McGeheeError, ValueError):
    """Angles handed to the certifier fall outside the potential's domain
    or do not form an admissible ordered triple."""


class OriginSingularityError(McGeheeError, ValueError):
    """Cartesian state with q = 0: the blow-up chart is undefined there."""


class NotSaddleError(McGeheeError, ValueError):
    """Separatrix tracing requested at an equilibrium whose restriction to
    the collision manifold is not a saddle."""


class ZeroPotentialValueError(McGeheeError, ValueError):
    """V(theta_c) = 0: the Yoshida coefficient is undefined on this ray."""


class ZeroBetaError(McGeheeError, ValueError):
    """beta = 0: the potential is constant-homogeneous and the coefficient
    formulas degenerate."""


class BetaTwoScaleDegenerateError(McGeheeError, ValueError):
    """beta = 2: the Darboux-point scaling equation has no unique solution."""
