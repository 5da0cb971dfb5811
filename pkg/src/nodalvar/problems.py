"""Benchmark model systems and their analytic eigenstates.

Two one-dimensional problems are supported:

* ``HYDROGEN_RADIAL`` -- the l = 0 radial equation for u(r) = r R(r) with
  V(r) = -1/r in Hartree atomic units, on (0, x_max].
* ``HARMONIC_HALF_LINE`` -- the oscillator V(x) = x^2/2 in unitless form,
  restricted to x > 0 with a Dirichlet wall at the origin. Odd states of the
  full-line problem are recovered by odd reflection.

Both carry u(x_min) = u(x_max) = 0.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import hermite as H
from numpy.polynomial import polynomial as P
from scipy.special import genlaguerre

__all__ = [
    "ProblemKind",
    "Problem1D",
    "ExactState",
    "ConfigurationError",
    "UnsupportedStateError",
    "DegenerateFunctionError",
    "make_problem",
    "exact_state",
    "find_nodes",
    "SUPPORTED_STATES",
]


class ConfigurationError(ValueError):
    """Invalid problem or run configuration."""


class UnsupportedStateError(ValueError):
    pass


class DegenerateFunctionError(ValueError):
    pass


class ProblemKind(str, enum.Enum):
    HYDROGEN_RADIAL = "hydrogen"
    HARMONIC_HALF_LINE = "oscillator"

    @classmethod
    def parse(cls, value) -> "ProblemKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {
            "hydrogen": cls.HYDROGEN_RADIAL,
            "hydrogenradial": cls.HYDROGEN_RADIAL,
            "hydrogen_radial": cls.HYDROGEN_RADIAL,
            "oscillator": cls.HARMONIC_HALF_LINE,
            "harmonic": cls.HARMONIC_HALF_LINE,
            "harmonichalfline": cls.HARMONIC_HALF_LINE,
            "harmonic_half_line": cls.HARMONIC_HALF_LINE,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ConfigurationError(f"unknown problem kind {value!r}") from None


DEFAULT_GRIDS = {
    ProblemKind.HYDROGEN_RADIAL: (120.0, 24001),
    ProblemKind.HARMONIC_HALF_LINE: (8.0, 8001),
}

MIN_POINTS = 1000


@dataclass(frozen=True)
class Problem1D:
    """Domain, uniform grid and potential of one benchmark system."""

    kind: ProblemKind
    x_min: float
    x_max: float
    n_points: int

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_points)

    def potential(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind is ProblemKind.HYDROGEN_RADIAL:
            return -1.0 / x
        return 0.5 * x * x

    def refined(self, factor: int) -> "Problem1D":
        """Same domain with the grid spacing divided by ``factor``."""
        n = (self.n_points - 1) * int(factor) + 1
        return Problem1D(self.kind, self.x_min, self.x_max, n)


def make_problem(kind, x_max: float | None = None, n_points: int | None = None) -> Problem1D:
    kind = ProblemKind.parse(kind)
    default_xmax, default_n = DEFAULT_GRIDS[kind]
    x_max = default_xmax if x_max is None else float(x_max)
    n_points = default_n if n_points is None else n_points
    if not math.isfinite(x_max) or x_max <= 0:
        raise ConfigurationError(f"x_max must be positive, got {x_max}")
    if int(n_points) != n_points or n_points < MIN_POINTS:
        raise ConfigurationError(f"n_points must be an integer >= {MIN_POINTS}, got {n_points}")
    return Problem1D(kind, 0.0, x_max, int(n_points))


@dataclass(frozen=True)
class ExactState:
    """Analytic eigenstate sampled on its problem grid.

    ``coefficients`` holds the polynomial prefactor (increasing powers) and
    ``decay`` the Gaussian/exponential envelope, so that
    u(x) = norm * poly(x) * envelope(x). The state has unit norm on the
    problem's domain.
    """

    problem: Problem1D
    label: str
    energy: float
    interior_nodes: tuple[float, ...]
    samples: np.ndarray = field(repr=False)
    coefficients: np.ndarray = field(repr=False)
    norm: float = field(repr=False)

    def _envelope(self, x):
        if self.problem.kind is ProblemKind.HYDROGEN_RADIAL:
            return np.exp(-x / 4.0)
        return np.exp(-0.5 * x * x)

    def _envelope_log_derivative(self, x):
        if self.problem.kind is ProblemKind.HYDROGEN_RADIAL:
            return np.full_like(x, -0.25)
        return -x

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.norm * P.polyval(x, self.coefficients) * self._envelope(x)

    def derivative(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        poly = P.polyval(x, self.coefficients)
        dpoly = P.polyval(x, P.polyder(self.coefficients))
        return self.norm * (dpoly + poly * self._envelope_log_derivative(x)) * self._envelope(x)

    def on(self, problem: Problem1D) -> "ExactState":
        """The same state sampled on another grid of the same kind."""
        return exact_state(problem, self.label)


def _hydrogen_4s():
    # u_40(r) ∝ r L_3^(1)(r/2) e^{-r/4}
    lag = genlaguerre(3, 1)
    lag_coeffs = np.asarray(lag.coeffs[::-1], dtype=float)  # increasing powers in s = r/2
    in_r = lag_coeffs * 0.5 ** np.arange(lag_coeffs.size)
    coeffs = P.polymulx(in_r)
    roots = np.sort(P.polyroots(in_r).real)
    return -1.0 / (2 * 4**2), coeffs, roots


def _oscillator_5():
    herm = H.herm2poly([0, 0, 0, 0, 0, 1])  # 32x^5 - 160x^3 + 120x
    roots = P.polyroots(herm).real
    roots = np.sort(roots[roots > 1e-12])
    return 5.5, herm, roots


_STATES = {
    "H 4S": (ProblemKind.HYDROGEN_RADIAL, _hydrogen_4s),
    "HO n=5": (ProblemKind.HARMONIC_HALF_LINE, _oscillator_5),
}
SUPPORTED_STATES = tuple(_STATES)


def _analytic_norm(kind: ProblemKind, coeffs: np.ndarray) -> float:
    # ∫ poly(x)^2 envelope(x)^2 over the half line, via closed-form moments
    sq = P.polymul(coeffs, coeffs)
    total = 0.0
    for k, c in enumerate(sq):
        if kind is ProblemKind.HYDROGEN_RADIAL:
            moment = math.factorial(k) * 2.0 ** (k + 1)  # ∫ r^k e^{-r/2} dr
        else:
            moment = 0.5 * math.gamma((k + 1) / 2.0)  # ∫_0^∞ x^k e^{-x^2} dx
        total += c * moment
    return 1.0 / math.sqrt(total)


def exact_state(problem: Problem1D, label: str) -> ExactState:
    try:
        kind, builder = _STATES[label]
    except KeyError:
        raise UnsupportedStateError(
            f"unsupported state {label!r}; choose from {', '.join(SUPPORTED_STATES)}"
        ) from None
    if problem.kind is not kind:
        raise UnsupportedStateError(f"state {label!r} does not belong to a {problem.kind.value} problem")
    energy, coeffs, roots = builder()
    if roots[-1] >= problem.x_max:
        raise ConfigurationError(f"x_max={problem.x_max} does not enclose the outermost node {roots[-1]:.4f}")
    norm = _analytic_norm(kind, coeffs)
    state = ExactState(problem, label, energy, tuple(float(r) for r in roots),
                       np.empty(0), coeffs, norm)
    samples = state.evaluate(problem.grid)
    samples[0] = 0.0
    samples.setflags(write=False)
    object.__setattr__(state, "samples", samples)
    return state


def _cubic_bracket_root(x, u, i, rtol):
    """Root of the local 4-point interpolant of u between x[i] and x[i+1]."""
    lo = max(0, min(i - 1, x.size - 4))
    xs, us = x[lo:lo + 4], u[lo:lo + 4]
    if xs.size < 4:
        xs, us = x[i:i + 2], u[i:i + 2]
    coeffs = np.polyfit(xs - x[i], us, xs.size - 1)
    a, b = 0.0, x[i + 1] - x[i]
    fa = np.polyval(coeffs, a)
    # bisection on the interpolant
    while b - a > rtol * max(abs(x[i]), abs(x[i + 1]), 1e-300):
        m = 0.5 * (a + b)
        fm = np.polyval(coeffs, m)
        if fm == 0.0:
            return x[i] + m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return x[i] + 0.5 * (a + b)


def find_nodes(x, samples, rtol: float = 1e-10) -> list[float]:
    """Interior sign changes of a sampled function, refined by bisection.

    Endpoint zeros are not reported. An interior sample that is exactly zero
    between samples of opposite sign is reported at its grid position.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(samples, dtype=float)
    if x.shape != u.shape:
        raise ValueError("x and samples must have the same shape")
    if not np.any(u):
        raise DegenerateFunctionError("function vanishes identically")
    nodes: list[float] = []
    inner = np.flatnonzero(u[1:-1]) + 1
    if inner.size == 0:
        return nodes
    for k in range(inner.size - 1):
        i, j = inner[k], inner[k + 1]
        if (u[i] > 0) == (u[j] > 0):
            continue
        if j == i + 1:
            nodes.append(_cubic_bracket_root(x, u, i, rtol))
        else:
            # exact zeros in between; take the midpoint of the zero run
            nodes.append(float(0.5 * (x[i + 1] + x[j - 1])))
    return nodes
