"""Exception hierarchy shared across the package.

Every error that a caller may reasonably want to catch (and that the CLI
maps to a distinct exit code) lives here.  Plain ``ValueError`` is reserved
for programming mistakes such as malformed arguments.
"""

from __future__ import annotations

__all__ = [
    "PhaseprintError",
    "InputError",
    "PolynomialParseError",
    "DegreeCapExceeded",
    "MathError",
    "NotInNormalForm",
    "ZeroF",
    "JacobianNotNilpotent",
    "UnknownIndex",
    "InfeasibleInequalities",
    "UnderDetermined",
    "NumericalError",
    "ZeroOnContour",
    "NoConvergence",
    "NonIsolatedZeroSet",
    "StepUnderflow",
    "TooManyNearMisses",
]


class PhaseprintError(Exception):
    """Base class for all package-specific errors."""


class InputError(PhaseprintError):
    """Malformed user input (polynomial text, constraint file, config)."""


class PolynomialParseError(InputError):
    """Polynomial text does not conform to the accepted grammar."""


class DegreeCapExceeded(InputError):
    """Parsed polynomial exceeds the supported total degree."""


class MathError(PhaseprintError):
    """A mathematically well-posed request with a provably negative answer."""


class NotInNormalForm(MathError):
    """Recentered field is not of the shape (y, Q(x, y)) required by the
    nilpotent classifier."""


class ZeroF(MathError):
    """The pure-x part of the second component vanishes identically, which
    is outside the hypotheses of the nilpotent classification theorem."""


class JacobianNotNilpotent(MathError):
    """The recentered Jacobian does not have two zero eigenvalues."""


class UnknownIndex(MathError):
    """A singularity label without a table index and no explicit index."""


class InfeasibleInequalities(MathError):
    """Sign constraints contradict the equality-determined interpolant."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__(
            "inequality constraints violated: "
            + "; ".join(str(v) for v in self.violations)
        )


class UnderDetermined(MathError):
    """No equality constraint or normalization pins the interpolant."""


class NumericalError(PhaseprintError):
    """A numerical procedure failed to reach its contract."""


class ZeroOnContour(NumericalError):
    """The field vanishes on (or numerically too close to) the contour."""


class NoConvergence(NumericalError):
    """An iterative refinement hit its cap without converging."""


class NonIsolatedZeroSet(NumericalError):
    """Root finding keeps producing new zeros, indicating a curve of zeros
    (for example a common polynomial factor of both components)."""


class StepUnderflow(NumericalError):
    """The adaptive integrator's step size collapsed below machine scale."""


class TooManyNearMisses(NumericalError):
    """Sector classification stayed ambiguous for too many test orbits;
    the caller should shrink the probe radius."""
