"""Smooth multiplicative scaling functions g(x)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

__all__ = [
    "ScalingFunction",
    "DisallowedScalingError",
    "gaussian",
    "polynomial",
    "constant",
    "HYDROGEN_GAUSSIANS",
    "OSCILLATOR_GAUSSIANS",
    "gaussian_family",
]


class DisallowedScalingError(ValueError):
    pass


@dataclass(frozen=True)
class ScalingFunction:
    """g(x) of one of three kinds.

    ``gaussian``:   amplitude * exp(-2 d (x - x0)^2)
    ``polynomial``: sum_k coefficients[k] x^k
    ``constant``:   amplitude
    """

    kind: str
    d: float = 0.0
    x0: float = 0.0
    coefficients: tuple[float, ...] = ()
    amplitude: float = 1.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "polynomial", "constant"):
            raise ValueError(f"unknown scaling kind {self.kind!r}")
        if self.kind == "gaussian" and not self.d > 0:
            raise ValueError("gaussian width parameter d must be positive")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "gaussian":
            return self.amplitude * np.exp(-2.0 * self.d * (x - self.x0) ** 2)
        if self.kind == "polynomial":
            return P.polyval(x, np.asarray(self.coefficients, dtype=float))
        return np.full_like(x, self.amplitude)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "gaussian":
            return -4.0 * self.d * (x - self.x0) * self(x)
        if self.kind == "polynomial":
            return P.polyval(x, P.polyder(np.asarray(self.coefficients, dtype=float)))
        return np.zeros_like(x)

    def log(self, x):
        """log g(x); avoids underflow of narrow Gaussians far from their centre."""
        x = np.asarray(x, dtype=float)
        if self.kind == "gaussian":
            return math.log(self.amplitude) - 2.0 * self.d * (x - self.x0) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(self(x))

    @property
    def anchor(self) -> float | None:
        """Centre of a Gaussian; None for kinds without a natural location."""
        return self.x0 if self.kind == "gaussian" else None

    def scaled(self, c: float) -> "ScalingFunction":
        if self.kind == "polynomial":
            return ScalingFunction("polynomial", coefficients=tuple(c * k for k in self.coefficients))
        return ScalingFunction(self.kind, self.d, self.x0, self.coefficients, self.amplitude * c)

    def is_positive_on(self, a: float, b: float) -> bool:
        """True if g > 0 on the closed interval [a, b]."""
        if self.kind in ("gaussian", "constant"):
            return self.amplitude > 0
        coeffs = np.trim_zeros(np.asarray(self.coefficients, dtype=float), "b")
        if coeffs.size == 0:
            return False
        if P.polyval(0.5 * (a + b), coeffs) <= 0:
            return False
        if P.polyval(a, coeffs) <= 0 or P.polyval(b, coeffs) <= 0:
            return False
        if coeffs.size > 1:
            roots = P.polyroots(coeffs)
            real = roots[np.abs(roots.imag) < 1e-12].real
            if np.any((real >= a) & (real <= b)):
                return False
        return True

    def describe(self) -> str:
        if self.kind == "gaussian":
            return f"gaussian(d={self.d:g},x0={self.x0:g})"
        if self.kind == "polynomial":
            return "polynomial(" + ",".join(f"{c:g}" for c in self.coefficients) + ")"
        return f"constant({self.amplitude:g})"


def gaussian(d: float, x0: float, amplitude: float = 1.0) -> ScalingFunction:
    return ScalingFunction("gaussian", d=float(d), x0=float(x0), amplitude=float(amplitude))


def polynomial(*coefficients: float) -> ScalingFunction:
    return ScalingFunction("polynomial", coefficients=tuple(float(c) for c in coefficients))


def constant(c: float = 1.0) -> ScalingFunction:
    return ScalingFunction("constant", amplitude=float(c))


def gaussian_family(pairs) -> tuple[ScalingFunction, ...]:
    return tuple(gaussian(d, x0) for d, x0 in pairs)


# (d, x0) families, one Gaussian centred in each nodal region of the target state
HYDROGEN_GAUSSIANS = gaussian_family([
    (12.3251, 0.9358),
    (1.9222, 4.2412),
    (0.3527, 11.0644),
    (0.0104, 47.7590),
])
OSCILLATOR_GAUSSIANS = gaussian_family([
    (46.9440, 0.4795),
    (38.3518, 1.4895),
    (1.7408, 4.510),
])
