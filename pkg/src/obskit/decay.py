"""Positive non-increasing rate functions on [0, ∞).

These model coercivity strengths ψ(λ) and cluster widths ε(λ): strictly
positive, continuous, non-increasing functions of the frequency.  Three
closed-form families are provided, plus the composite width produced by
turning a weak certificate into a full spectral one (kept as an exact
composite rather than re-fitted, so no conservatism is introduced).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericError

# Default frequency grid on which membership in the admissible class
# (positive, non-increasing) is verified.
CLASS_CHECK_GRID = (0.0, 1.0, 10.0, 1.0e3, 1.0e6)


class DecayFunction:
    """A strictly positive, non-increasing function of frequency λ ≥ 0."""

    def __call__(self, lam):
        raise NotImplementedError

    def scaled(self, factor: float) -> "DecayFunction":
        """The pointwise product ``factor * self`` (factor > 0)."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        """JSON-friendly description of the function."""
        raise NotImplementedError

    def describe(self) -> str:
        import json

        return json.dumps(self.to_dict(), sort_keys=True)


def _check_positive(name: str, value: float) -> None:
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be positive and finite, got {value!r}")


def _check_nonnegative(name: str, value: float) -> None:
    if not (value >= 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be non-negative and finite, got {value!r}")


@dataclass(frozen=True)
class Constant(DecayFunction):
    """ε(λ) = c."""

    c: float

    def __post_init__(self):
        _check_positive("c", self.c)

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        out = np.full(lam.shape, self.c)
        return float(out) if out.ndim == 0 else out

    def scaled(self, factor: float) -> "Constant":
        _check_positive("factor", factor)
        return Constant(self.c * factor)

    def to_dict(self) -> dict:
        return {"form": "constant", "c": self.c}


@dataclass(frozen=True)
class PowerLaw(DecayFunction):
    """ψ(λ) = c / (1 + λ)^p."""

    c: float
    p: float

    def __post_init__(self):
        _check_positive("c", self.c)
        _check_nonnegative("p", self.p)

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        out = self.c / (1.0 + lam) ** self.p
        return float(out) if out.ndim == 0 else out

    def scaled(self, factor: float) -> "PowerLaw":
        _check_positive("factor", factor)
        return PowerLaw(self.c * factor, self.p)

    @property
    def is_constant(self) -> bool:
        return self.p == 0

    def to_dict(self) -> dict:
        return {"form": "power_law", "c": self.c, "p": self.p}


@dataclass(frozen=True)
class Exponential(DecayFunction):
    """ψ(λ) = c · e^{−aλ}."""

    c: float
    a: float

    def __post_init__(self):
        _check_positive("c", self.c)
        _check_nonnegative("a", self.a)

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        out = self.c * np.exp(-self.a * lam)
        return float(out) if out.ndim == 0 else out

    def scaled(self, factor: float) -> "Exponential":
        _check_positive("factor", factor)
        return Exponential(self.c * factor, self.a)

    def to_dict(self) -> dict:
        return {"form": "exponential", "c": self.c, "a": self.a}


@dataclass(frozen=True)
class TransformedWidth(DecayFunction):
    """ε(λ) = ½ · (2M/ψ(λ) + 1/ε₀)⁻¹.

    The cluster width admissible for a full spectral certificate built from
    a weak one with strength ``psi``, admissibility constant ``admissibility``
    (M) and constant weak width ``base_width`` (ε₀).  Evaluated exactly as a
    composite; positive and non-increasing whenever ψ is.
    """

    psi: DecayFunction
    admissibility: float
    base_width: float

    def __post_init__(self):
        _check_positive("admissibility", self.admissibility)
        _check_positive("base_width", self.base_width)

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        psi_val = np.asarray(self.psi(lam), dtype=float)
        out = 0.5 / (2.0 * self.admissibility / psi_val + 1.0 / self.base_width)
        return float(out) if out.ndim == 0 else out

    def scaled(self, factor: float) -> "DecayFunction":
        raise NotImplementedError("composite widths are not rescaled; rebuild instead")

    def to_dict(self) -> dict:
        return {
            "form": "transformed_width",
            "psi": self.psi.to_dict(),
            "admissibility": self.admissibility,
            "base_width": self.base_width,
        }


def is_positive_nonincreasing(f: DecayFunction, grid=CLASS_CHECK_GRID) -> bool:
    """Check strict positivity and monotone non-increase on a frequency grid."""
    values = [float(f(g)) for g in grid]
    if any(not (v > 0 and math.isfinite(v)) for v in values):
        return False
    for lo, hi in zip(values, values[1:]):
        if hi > lo * (1.0 + 1e-12):
            return False
    return True


def require_positive_nonincreasing(f: DecayFunction, what: str, grid=CLASS_CHECK_GRID) -> None:
    """Raise NumericError unless ``f`` passes the admissible-class check."""
    if not is_positive_nonincreasing(f, grid):
        raise NumericError(f"{what} is not positive and non-increasing on the check grid")
