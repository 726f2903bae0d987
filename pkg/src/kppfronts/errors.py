"""Exception types shared across the package."""

from __future__ import annotations


class KppFrontsError(Exception):
    """Base class for all package errors."""


class ConstraintViolation(KppFrontsError):
    """A sequence pair violates one of its structural inequalities."""

    def __init__(self, index: int, which: str):
        self.index = index
        self.which = which
        super().__init__(f"sequence constraint failed at n={index}: {which}")


class KppViolation(KppFrontsError):
    """The sampled reaction term fails the KPP monotonicity property."""

    def __init__(self, x: float, s1: float, s2: float, value: float):
        self.x = x
        self.s1 = s1
        self.s2 = s2
        self.value = value
        super().__init__(
            f"KPP property violated at x={x:.6g} for (s1,s2)=({s1:.6g},{s2:.6g}): inf={value:.6g}"
        )


class DomainError(KppFrontsError):
    """Argument outside the mathematical domain of an operation."""


class GridError(KppFrontsError):
    """Requested grid exceeds the configured memory cap."""


class MaximumPrincipleViolation(KppFrontsError):
    """A solver step produced a value outside [0, 1] beyond tolerance."""

    def __init__(self, t: float, x: float, value: float):
        self.t = t
        self.x = x
        self.value = value
        super().__init__(f"u(t={t:.6g}, x={x:.6g}) = {value!r} outside [0,1]")


class TridiagonalSingular(KppFrontsError):
    """The implicit diffusion system failed to solve (indicates a bug)."""


class DomainOverrun(KppFrontsError):
    """The front approached the right wall and the grid cannot be extended."""


class LevelNotBracketed(KppFrontsError):
    """The field does not cross the requested level on the window."""


class NeverCrossed(KppFrontsError):
    """The probe point never reached the requested level during the run."""


class EmptyWindow(KppFrontsError):
    """No samples fall inside the requested time window."""


class RegimeError(KppFrontsError):
    """Growth rates outside the regime required by the operation."""


class OutsideValidity(KppFrontsError):
    """A closed-form bound was evaluated outside its validity region."""


class CalibrationTimeout(KppFrontsError):
    """The calibration run ended before the probe condition stabilized."""


class GateFailed(KppFrontsError):
    """A 'for all n large enough' condition fails at this index."""

    def __init__(self, index: int, reason: str):
        self.index = index
        self.reason = reason
        super().__init__(f"gate failed at n={index}: {reason}")


class AlphaTooLarge(KppFrontsError):
    """The bump seed amplitude is not below the target level."""


class ParseError(KppFrontsError):
    """Configuration file is not well-formed."""


class ValidationError(KppFrontsError):
    """Configuration violates a declared invariant."""
