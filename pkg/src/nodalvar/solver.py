"""Ground state of the 1D Hamiltonian restricted to one nodal region.

Each region (a, b) gets its own uniform grid whose end points fall exactly on
a and b, with spacing no larger than the problem spacing h. The Dirichlet
operator -1/2 d^2/dx^2 + V is discretized by second-order central
differences, giving a symmetric tridiagonal matrix on the interior points.
Its lowest eigenvalue is bracketed by Sturm-sequence bisection and the
vector obtained by inverse iteration (LAPACK ``stebz``/``stein``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from .problems import Problem1D

__all__ = [
    "Interval",
    "RegionSolution",
    "InsufficientResolutionError",
    "NumericFailureError",
    "MIN_REGION_POINTS",
    "region_grid",
    "dirichlet_operator",
    "dirichlet_ground_state",
    "region_ground_state",
    "convergence_study",
    "richardson_ratios",
    "sturm_count",
    "rayleigh_quotient",
    "one_sided_slopes",
]

MIN_REGION_POINTS = 50
EIGEN_TOL = 1e-12


class InsufficientResolutionError(ValueError):
    pass


class NumericFailureError(RuntimeError):
    pass


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"empty interval ({self.a}, {self.b})")

    @property
    def length(self) -> float:
        return self.b - self.a

    def contains(self, x: float) -> bool:
        return self.a < x < self.b


@dataclass(frozen=True)
class RegionSolution:
    """Lowest Dirichlet eigenpair on one region.

    ``x`` and ``samples`` include both end points (where ``samples`` is
    zero). The samples are positive inside and have unit trapezoidal norm, so
    ``norm_squared`` is 1 up to rounding.
    """

    interval: Interval
    energy: float
    x: np.ndarray = field(repr=False)
    samples: np.ndarray = field(repr=False)
    norm_squared: float
    h: float

    @property
    def n_intervals(self) -> int:
        return self.x.size - 1


def region_grid(a: float, b: float, h: float, n_intervals: int | None = None) -> np.ndarray:
    if n_intervals is None:
        n_intervals = max(1, math.ceil((b - a) / h - 1e-9))
    return np.linspace(a, b, n_intervals + 1)


def dirichlet_operator(potential, x: np.ndarray):
    """Diagonal and off-diagonal of the interior Dirichlet operator on ``x``."""
    h = x[1] - x[0]
    inner = x[1:-1]
    diag = 1.0 / h**2 + potential(inner)
    off = np.full(inner.size - 1, -0.5 / h**2)
    return diag, off


def sturm_count(diag, off, shift: float) -> int:
    """Number of eigenvalues of the tridiagonal matrix strictly below ``shift``.

    Plain LDL^T recurrence; kept independent of LAPACK so it can cross-check
    the eigensolver.
    """
    count = 0
    q = 1.0
    tiny = np.finfo(float).tiny
    off2 = np.asarray(off) ** 2
    for i, d in enumerate(np.asarray(diag)):
        q = d - shift - (off2[i - 1] / q if i else 0.0)
        if q == 0.0:
            q = -tiny
        if q < 0:
            count += 1
    return count


def rayleigh_quotient(diag, off, v) -> float:
    v = np.asarray(v)
    tv = diag * v
    tv[:-1] += off * v[1:]
    tv[1:] += off * v[:-1]
    return float(v @ tv / (v @ v))


def dirichlet_ground_state(potential, a: float, b: float, h: float,
                           n_intervals: int | None = None):
    """Lowest eigenpair of -1/2 u'' + V u = E u on (a, b) with u(a) = u(b) = 0.

    Returns ``(energy, x, u)`` with ``u`` positive inside and unit
    trapezoidal norm.
    """
    x = region_grid(a, b, h, n_intervals)
    if x.size - 2 < MIN_REGION_POINTS:
        raise InsufficientResolutionError(
            f"interval ({a:.6g}, {b:.6g}) holds {x.size - 2} interior points; "
            f"at least {MIN_REGION_POINTS} are required"
        )
    diag, off = dirichlet_operator(potential, x)
    try:
        w, v = eigh_tridiagonal(diag, off, select="i", select_range=(0, 0),
                                lapack_driver="stebz", tol=EIGEN_TOL)
    except LinAlgError as exc:
        raise NumericFailureError(
            f"tridiagonal eigensolve failed on ({a:.6g}, {b:.6g}) with "
            f"{diag.size} unknowns: {exc}"
        ) from exc
    if w.size != 1 or not np.all(np.isfinite(v)):
        raise NumericFailureError(f"no finite eigenpair found on ({a:.6g}, {b:.6g})")
    u = np.zeros(x.size)
    u[1:-1] = v[:, 0]
    if u[np.argmax(np.abs(u))] < 0:
        u = -u
    step = x[1] - x[0]
    u /= math.sqrt(step * np.sum(u * u))
    return float(w[0]), x, u


def region_ground_state(problem: Problem1D, interval: Interval,
                        n_intervals: int | None = None) -> RegionSolution:
    if not (problem.x_min <= interval.a < interval.b <= problem.x_max):
        raise ValueError(f"interval ({interval.a}, {interval.b}) outside the problem domain")
    energy, x, u = dirichlet_ground_state(problem.potential, interval.a, interval.b,
                                          problem.h, n_intervals)
    x.setflags(write=False)
    u.setflags(write=False)
    step = x[1] - x[0]
    return RegionSolution(interval, energy, x, u, float(step * np.sum(u * u)), float(step))


def one_sided_slopes(sol: RegionSolution) -> tuple[float, float]:
    """Second-order one-sided derivatives at the left and right end points."""
    u, h = sol.samples, sol.h
    left = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h)
    right = (3.0 * u[-1] - 4.0 * u[-2] + u[-3]) / (2.0 * h)
    return float(left), float(right)


def convergence_study(problem: Problem1D, interval: Interval,
                      refinement_levels: int) -> list[tuple[float, float]]:
    """Energies at spacings h, h/2, h/4, ... on the region.

    The coarsest level uses the region's default interval count N, then 2N,
    4N, ... so every level places grid points exactly on the end points.
    """
    if refinement_levels < 2:
        raise ValueError("refinement_levels must be at least 2")
    base = region_grid(interval.a, interval.b, problem.h).size - 1
    out = []
    for level in range(refinement_levels):
        sol = region_ground_state(problem, interval, n_intervals=base * 2**level)
        out.append((sol.h, sol.energy))
    return out


def richardson_ratios(values) -> list[float]:
    """(v_k - v_{k+1}) / (v_{k+1} - v_{k+2}) for consecutive refinement levels."""
    v = [e for _, e in values] if values and isinstance(values[0], tuple) else list(values)
    return [(v[k] - v[k + 1]) / (v[k + 1] - v[k + 2]) for k in range(len(v) - 2)]
