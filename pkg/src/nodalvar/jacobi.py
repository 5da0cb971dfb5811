"""Numerical checks of the multiplicative-variation energy identity

    <g psi|H|g psi> / <g psi|g psi> = E + (1/2) <g' psi|g' psi> / <g psi|g psi>

for an exact eigenstate psi and a smooth g, plus the node-slope and
ratio-finiteness checks for trial functions built on exact nodes.

All integrals are trapezoidal on uniform grids. The kinetic energy always uses
the first-derivative form (1/2) int f'^2, never f''.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import csvio
from .problems import ExactState, Problem1D, find_nodes
from .scaling import ScalingFunction
from .solver import region_grid

__all__ = [
    "DegenerateScalingError",
    "DegenerateNodeError",
    "rayleigh_quotient_scaled",
    "gradient_correction",
    "verify_multiplicative_identity",
    "IdentityReport",
    "ResidualRow",
    "node_slope_and_ratio_check",
    "NORM_FLOOR",
]

NORM_FLOOR = 1e-14
SLOPE_FRACTION = 1e-3
RATIO_AMPLITUDE_FLOOR = 1e-5


class DegenerateScalingError(ValueError):
    pass


class DegenerateNodeError(ValueError):
    pass


def _weights(x):
    h = x[1] - x[0]
    w = np.full(x.size, h)
    w[0] = w[-1] = 0.5 * h
    return w


def _potential_times(problem: Problem1D, x, f2):
    # V f^2 with the hydrogen r = 0 point taken as its limit (f vanishes there)
    out = np.zeros_like(f2)
    inside = x > 0 if problem.x_min == 0.0 else np.ones(x.size, bool)
    out[inside] = problem.potential(x[inside]) * f2[inside]
    return out


def _energy_integrals(state, f, df, x, derivative):
    """(kinetic + potential integral, norm integral) of f on the grid x."""
    w = _weights(x)
    if derivative == "difference":
        h = x[1] - x[0]
        kinetic = 0.5 * np.sum(np.diff(f) ** 2) / h
    elif derivative == "analytic":
        kinetic = 0.5 * np.dot(w, df * df)
    else:
        raise ValueError(f"unknown derivative mode {derivative!r}")
    potential = np.dot(w, _potential_times(state.problem, x, f * f))
    return kinetic + potential, float(np.dot(w, f * f))


def _scaled_samples(state: ExactState, g: ScalingFunction, x):
    psi = state.evaluate(x)
    dpsi = state.derivative(x)
    return g(x) * psi, g.derivative(x) * psi + g(x) * dpsi, psi


def _grid(state: ExactState, x):
    return state.problem.grid if x is None else np.asarray(x, dtype=float)


def rayleigh_quotient_scaled(state: ExactState, g: ScalingFunction, x=None,
                             derivative: str = "difference") -> float:
    """<g psi|H|g psi> / <g psi|g psi> by trapezoidal quadrature.

    ``derivative="difference"`` differentiates the sampled product g psi by
    forward differences (kinetic term on cell midpoints); ``"analytic"`` uses
    (g psi)' = g' psi + g psi' from the closed forms.
    """
    x = _grid(state, x)
    f, df, _ = _scaled_samples(state, g, x)
    num, den = _energy_integrals(state, f, df, x, derivative)
    if den < NORM_FLOOR:
        raise DegenerateScalingError(f"<g psi|g psi> = {den:.3g} for {g.describe()}")
    return float(num / den)


def gradient_correction(state: ExactState, g: ScalingFunction, x=None, form: str = "b1",
                        derivative: str = "difference") -> float:
    """Energy shift of g psi above E.

    ``form="b1"``: (1/2) int g'^2 psi^2 / int g^2 psi^2 (no operator inside).
    ``form="printed"``: (1/2) <g' psi|H|g' psi> / <g psi|g psi>, the variant
    with the Hamiltonian between the derivative factors; computed for
    comparison only.
    """
    x = _grid(state, x)
    w = _weights(x)
    psi = state.evaluate(x)
    den = float(np.dot(w, (g(x) * psi) ** 2))
    if den < NORM_FLOOR:
        raise DegenerateScalingError(f"<g psi|g psi> = {den:.3g} for {g.describe()}")
    dg = g.derivative(x)
    if form == "b1":
        return float(0.5 * np.dot(w, (dg * psi) ** 2) / den)
    if form == "printed":
        ddg = _second_derivative(g, x)
        f = dg * psi
        df = ddg * psi + dg * state.derivative(x)
        num, _ = _energy_integrals(state, f, df, x, derivative)
        return float(0.5 * num / den)
    raise ValueError(f"unknown correction form {form!r}")


def _second_derivative(g: ScalingFunction, x):
    if g.kind == "gaussian":
        t = x - g.x0
        return (16.0 * g.d**2 * t * t - 4.0 * g.d) * g(x)
    if g.kind == "polynomial":
        from numpy.polynomial import polynomial as P
        return P.polyval(x, P.polyder(np.asarray(g.coefficients, dtype=float), 2))
    return np.zeros_like(x)


@dataclass(frozen=True)
class ResidualRow:
    g_id: str
    h: float
    lhs: float
    rhs: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)


@dataclass(frozen=True)
class IdentityReport:
    """Residuals of the identity on successively halved grids.

    ``rows`` holds the whole-domain check (rhs = E + correction). ``regions``
    holds the restricted version on each nodal region of the exact state,
    computed on grids whose end points sit on the exact nodes.
    ``printed_rows`` repeats the whole-domain check with the Hamiltonian
    inside the correction term.
    """

    g_id: str
    energy: float
    rows: tuple[ResidualRow, ...]
    regions: tuple[ResidualRow, ...] = ()
    printed_rows: tuple[ResidualRow, ...] = ()

    @property
    def residuals(self) -> list[float]:
        return [r.residual for r in self.rows]

    @property
    def ratios(self) -> list[float]:
        res = self.residuals
        return [res[k] / res[k + 1] if res[k + 1] > 0 else math.inf for k in range(len(res) - 1)]

    @property
    def finest(self) -> ResidualRow:
        return self.rows[-1]

    def inequality_holds(self, slack: float = 1e-8) -> bool:
        return all(r.lhs >= self.energy - slack for r in self.rows)

    def to_csv(self, precision: int = csvio.DEFAULT_PRECISION, metadata=None) -> str:
        return rows_to_csv(self.rows + self.regions + self.printed_rows, precision, metadata)


def rows_to_csv(rows, precision: int = csvio.DEFAULT_PRECISION, metadata=None) -> str:
    return csvio.render(["g_id", "h", "lhs", "rhs", "residual"],
                        [(r.g_id, r.h, r.lhs, r.rhs, r.residual) for r in rows],
                        metadata, precision)


def verify_multiplicative_identity(state: ExactState, g: ScalingFunction,
                                   refinement_levels: int = 3, base_refinement: int = 1,
                                   g_id: str | None = None,
                                   derivative: str = "difference") -> IdentityReport:
    """Evaluate both sides on grids refined by base_refinement * 2**level."""
    if refinement_levels < 2:
        raise ValueError("refinement_levels must be at least 2")
    g_id = g_id or g.describe()
    rows, printed = [], []
    problem = None
    for level in range(refinement_levels):
        problem = state.problem.refined(base_refinement * 2**level)
        x = problem.grid
        lhs = rayleigh_quotient_scaled(state, g, x, derivative)
        rows.append(ResidualRow(g_id, problem.h, lhs,
                                state.energy + gradient_correction(state, g, x, "b1")))
        printed.append(ResidualRow(g_id + ":printed", problem.h, lhs,
                                   state.energy + gradient_correction(state, g, x, "printed",
                                                                      derivative)))
    regions = []
    edges = (problem.x_min,) + tuple(state.interior_nodes) + (problem.x_max,)
    for j, (a, b) in enumerate(zip(edges, edges[1:]), start=1):
        x = region_grid(a, b, problem.h)
        try:
            lhs = rayleigh_quotient_scaled(state, g, x, derivative)
            rhs = state.energy + gradient_correction(state, g, x, "b1")
        except DegenerateScalingError:
            continue  # g carries no weight on this region
        regions.append(ResidualRow(f"{g_id}:region{j}", float(x[1] - x[0]), lhs, rhs))
    return IdentityReport(g_id, state.energy, tuple(rows), tuple(regions), tuple(printed))


def _trial_samples(trial):
    """(x, values, nodes, left/right slopes at each node) for a composite or sample pair."""
    if isinstance(trial, tuple):
        x, y = (np.asarray(a, dtype=float) for a in trial)
        nodes = find_nodes(x, y)
        slopes = []
        dy = np.gradient(y, x)
        for n in nodes:
            i = int(np.searchsorted(x, n))
            # one-sided second-order slopes from points on each side of the node
            left = (3 * y[i - 1] - 4 * y[i - 2] + y[i - 3]) / (2 * (x[i - 1] - x[i - 2]))
            right = (-3 * y[i] + 4 * y[i + 1] - y[i + 2]) / (2 * (x[i + 1] - x[i]))
            slopes.append((float(left), float(right)))
        return x, y, list(nodes), slopes, float(np.max(np.abs(dy)))
    from .solver import one_sided_slopes
    x, y = trial.on_grid()
    slopes = []
    for j in range(trial.m - 1):
        sl = one_sided_slopes(trial.region_solutions[j])[1] * trial.region_scales[j]
        sr = one_sided_slopes(trial.region_solutions[j + 1])[0] * trial.region_scales[j + 1]
        slopes.append((float(sl), float(sr)))
    dmax = max(float(np.max(np.abs(np.diff(yy)) / (xx[1] - xx[0]))) for xx, yy in trial.pieces())
    return x, y, list(trial.nodes), slopes, dmax


def node_slope_and_ratio_check(trial, exact: ExactState, mask_radius: int = 5,
                               continuity_tol: float = 1e-2,
                               amplitude_floor: float = RATIO_AMPLITUDE_FLOOR) -> dict:
    """Nonzero slope of the trial at every node and a finite, continuous ratio trial/exact.

    ``trial`` is a patched composite or an ``(x, values)`` pair. Raises
    DegenerateNodeError when a one-sided slope falls below 1e-3 of the largest
    slope of the trial function. The ratio is sampled where the exact state
    exceeds ``amplitude_floor`` of its maximum; deeper in the tail the
    Dirichlet wall at x_max, not the nodes, controls the trial function.
    """
    x, y, nodes, slopes, dmax = _trial_samples(trial)
    for k, (sl, sr) in enumerate(slopes, start=1):
        if min(abs(sl), abs(sr)) < SLOPE_FRACTION * dmax:
            raise DegenerateNodeError(
                f"slope at node {k} ({nodes[k - 1]:.6g}) is {min(abs(sl), abs(sr)):.3g}, "
                f"below {SLOPE_FRACTION:g} of the maximum {dmax:.3g}")
    h = float(np.max(np.diff(x)))
    ex = exact.evaluate(x)
    near = np.zeros(x.size, bool)
    for p in list(nodes) + list(exact.interior_nodes) + [x[0], x[-1]]:
        near |= np.abs(x - p) < mask_radius * h
    near |= np.abs(ex) < amplitude_floor * np.max(np.abs(ex))
    ratio = y[~near] / ex[~near]
    sign = 1.0 if np.median(ratio) > 0 else -1.0
    ratio = sign * ratio
    node_ratios = []
    dex = exact.derivative(np.asarray(nodes)) if nodes else np.array([])
    for (sl, sr), de in zip(slopes, dex):
        node_ratios.append((sign * sl / de, sign * sr / de))
    scale = float(np.max(np.abs(ratio)))
    jumps = [abs(a - b) / scale for a, b in node_ratios]
    # the node value must also join the unmasked ratio on both sides
    xs = x[~near]
    joins = []
    for n, (a, b) in zip(nodes, node_ratios):
        left = ratio[xs < n]
        right = ratio[xs > n]
        if left.size and right.size:
            joins.append(max(abs(left[-1] - a), abs(right[0] - b)) / scale)
    ok = bool(np.all(np.isfinite(ratio)) and all(j <= continuity_tol for j in jumps)
              and all(j <= continuity_tol for j in joins))
    return {
        "ok": ok,
        "nodes": nodes,
        "node_slopes": slopes,
        "slope_floor": SLOPE_FRACTION * dmax,
        "ratio_x": xs,
        "ratio": ratio,
        "ratio_max": scale,
        "ratio_min": float(np.min(np.abs(ratio))),
        "node_ratios": node_ratios,
        "node_jumps": jumps,
        "node_joins": joins,
        "global_sign": sign,
    }
