"""Composite trial functions built from region ground states, and the
energy averages and error expressions evaluated on them.

Region numbers are 1-based and run outwards from x_min, matching the way
nodal regions are labelled in tables ("1,2" is the first two regions).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import logsumexp

from . import csvio
from .problems import Problem1D, ProblemKind
from .scaling import DisallowedScalingError, ScalingFunction
from .solver import (MIN_REGION_POINTS, Interval, RegionSolution, one_sided_slopes,
                     region_ground_state)

__all__ = [
    "NodalPartition",
    "CompositeWavefunction",
    "ErrorReport",
    "Reference",
    "InvalidPartitionError",
    "InvalidSubsetError",
    "DegeneratePatchError",
    "build_composite",
    "patch_regions",
    "average_energy",
    "error_expression_1",
    "error_expression_2",
    "squared_deviation",
    "error_report",
    "reports_to_csv",
    "per_region_csv",
    "local_energy_profile",
    "kinetic_jump_at_node",
    "sign_alternation_check",
    "reflect_odd",
]

MASK_RADIUS = 5
# local energies where |psi| < AMPLITUDE_FLOOR * max|psi| of the region are dropped;
# the far tail carries too few significant digits for a second difference ratio
AMPLITUDE_FLOOR = 1e-6


class InvalidPartitionError(ValueError):
    pass


class InvalidSubsetError(ValueError):
    pass


class DegeneratePatchError(ValueError):
    pass


class Reference(str, enum.Enum):
    SUBSET_AVERAGE = "subset"
    FULL_AVERAGE = "full"


@dataclass(frozen=True)
class NodalPartition:
    problem: Problem1D
    interior_nodes: tuple[float, ...]

    def __post_init__(self):
        nodes = tuple(float(n) for n in self.interior_nodes)
        object.__setattr__(self, "interior_nodes", nodes)
        if any(not math.isfinite(n) for n in nodes):
            raise InvalidPartitionError("nodes must be finite")
        if any(b <= a for a, b in zip(nodes, nodes[1:])):
            raise InvalidPartitionError("nodes must be strictly increasing")
        p = self.problem
        if nodes and (nodes[0] <= p.x_min or nodes[-1] >= p.x_max):
            raise InvalidPartitionError(
                f"nodes must lie inside the open domain ({p.x_min}, {p.x_max})")
        floor = MIN_REGION_POINTS * p.h
        edges = (p.x_min,) + nodes + (p.x_max,)
        gaps = np.diff(edges)
        if np.any(gaps < floor):
            k = int(np.argmin(gaps))
            raise InvalidPartitionError(
                f"region {k + 1} is {gaps[k]:.4g} wide; minimum separation is {floor:.4g}")

    @property
    def m(self) -> int:
        return len(self.interior_nodes) + 1

    @property
    def intervals(self) -> list[Interval]:
        edges = (self.problem.x_min,) + self.interior_nodes + (self.problem.x_max,)
        return [Interval(a, b) for a, b in zip(edges, edges[1:])]


@dataclass(frozen=True)
class CompositeWavefunction:
    """C1-patched trial state: region ground states times signed scales.

    ``region_scales`` already include the global normalization, so region j of
    the composite is ``region_scales[j] * region_solutions[j].samples``.
    """

    partition: NodalPartition | None
    region_solutions: tuple[RegionSolution, ...]
    region_scales: np.ndarray
    weights: np.ndarray
    region_energies: np.ndarray
    potential: Callable = field(repr=False, default=None)

    @property
    def m(self) -> int:
        return len(self.region_solutions)

    @property
    def nodes(self) -> tuple[float, ...]:
        return tuple(s.interval.b for s in self.region_solutions[:-1])

    @property
    def kind(self) -> ProblemKind | None:
        return self.partition.problem.kind if self.partition is not None else None

    def pieces(self):
        for s, sol in zip(self.region_scales, self.region_solutions):
            yield sol.x, s * sol.samples

    def on_grid(self) -> tuple[np.ndarray, np.ndarray]:
        """Concatenated (x, psi), shared node points listed once."""
        xs, ys = [], []
        for k, (x, y) in enumerate(self.pieces()):
            start = 0 if k == 0 else 1
            xs.append(x[start:])
            ys.append(y[start:])
        return np.concatenate(xs), np.concatenate(ys)

    def full_average(self) -> float:
        return float(np.dot(self.weights, self.region_energies))


def build_composite(problem: Problem1D, nodes: Sequence[float]) -> CompositeWavefunction:
    """Partition, solve every region, and patch."""
    partition = NodalPartition(problem, tuple(nodes))
    solutions = [region_ground_state(problem, iv) for iv in partition.intervals]
    return patch_regions(solutions, partition=partition)


def patch_regions(solutions: Sequence[RegionSolution], partition: NodalPartition | None = None,
                  potential: Callable | None = None) -> CompositeWavefunction:
    """Scale region solutions so the first derivative is continuous at every node.

    Region 1 keeps scale +1; region j+1 is scaled so its right-going slope at
    the shared node equals the left region's slope there. Both solutions are
    positive, so the scale comes out negative relative to its neighbour. The
    result is normalized to unit total norm.
    """
    solutions = tuple(solutions)
    if not solutions:
        raise ValueError("no region solutions to patch")
    for left, right in zip(solutions, solutions[1:]):
        if not math.isclose(left.interval.b, right.interval.a, rel_tol=0, abs_tol=1e-12):
            raise ValueError(
                f"regions must be contiguous: {left.interval.b} != {right.interval.a}")
    slopes = [one_sided_slopes(s) for s in solutions]
    scales = [1.0]
    for j in range(1, len(solutions)):
        left_slope = scales[-1] * slopes[j - 1][1]
        right_slope = slopes[j][0]
        scale_max = max(np.max(np.abs(np.diff(s.samples))) / s.h for s in solutions[j - 1:j + 1])
        if abs(right_slope) < 1e-12 * scale_max or abs(slopes[j - 1][1]) < 1e-12 * scale_max:
            raise DegeneratePatchError(
                f"zero one-sided derivative at node {solutions[j].interval.a:.6g}")
        scales.append(left_slope / right_slope)
    scales = np.asarray(scales)
    norms = np.array([s.norm_squared for s in solutions]) * scales**2
    total = norms.sum()
    if potential is None and partition is not None:
        potential = partition.problem.potential
    return CompositeWavefunction(
        partition=partition,
        region_solutions=solutions,
        region_scales=scales / math.sqrt(total),
        weights=norms / total,
        region_energies=np.array([s.energy for s in solutions]),
        potential=potential,
    )


def _indices(composite: CompositeWavefunction, regions) -> np.ndarray:
    if regions is None:
        return np.arange(composite.m)
    regions = list(regions)
    if not regions:
        raise InvalidSubsetError("subset of regions is empty")
    if len(set(regions)) != len(regions):
        raise InvalidSubsetError(f"repeated region in subset {regions}")
    for r in regions:
        if int(r) != r or not 1 <= r <= composite.m:
            raise InvalidSubsetError(f"region {r} out of range 1..{composite.m}")
    return np.array(sorted(int(r) - 1 for r in regions))


def average_energy(composite: CompositeWavefunction, regions=None) -> float:
    """Weight-normalized mean of region energies over a subset (all by default)."""
    idx = _indices(composite, regions)
    p = composite.weights[idx]
    return float(np.dot(p, composite.region_energies[idx]) / p.sum())


def _reference_energy(composite, regions, reference) -> float:
    if isinstance(reference, Reference) or isinstance(reference, str):
        ref = Reference(reference)
        if ref is Reference.FULL_AVERAGE:
            return composite.full_average()
        return average_energy(composite, regions)
    return float(reference)


def error_expression_1(composite: CompositeWavefunction, regions=None,
                       reference=Reference.SUBSET_AVERAGE) -> float:
    """p-weighted mean squared deviation of region energies from a reference.

    Normalized by the subset's total weight, which is 1 for the full set.
    """
    idx = _indices(composite, regions)
    ref = _reference_energy(composite, regions, reference)
    p = composite.weights[idx]
    dev = composite.region_energies[idx] - ref
    return float(np.dot(p, dev * dev) / p.sum())


def squared_deviation(composite: CompositeWavefunction, regions, exact_energy: float) -> float:
    return (float(exact_energy) - average_energy(composite, regions)) ** 2


def _log_trapezoid_mass(x: np.ndarray, log_f: np.ndarray) -> float:
    """log of the trapezoidal integral of exp(log_f) on a uniform grid."""
    h = x[1] - x[0]
    w = np.full(x.size, math.log(h))
    w[0] = w[-1] = math.log(0.5 * h)
    return float(logsumexp(log_f + w))


def _selected_scaling(composite, idx, scaling_set, select):
    if select == "all" or len(idx) == composite.m:
        return list(scaling_set)
    if select != "anchored":
        raise ValueError(f"unknown scaling selection {select!r}")
    chosen = []
    for g in scaling_set:
        x0 = g.anchor
        if x0 is None:
            chosen.append(g)
            continue
        for j in idx:
            iv = composite.region_solutions[j].interval
            last = j == composite.m - 1
            if iv.a <= x0 < iv.b or (last and x0 >= iv.b):
                chosen.append(g)
                break
    return chosen or list(scaling_set)


def scaled_energy_ratios(composite: CompositeWavefunction, scaling_set, regions=None):
    """<g psi|H|psi> / <g psi|psi> over the chosen regions, one value per g.

    Inside region j the composite is an eigenfunction with energy E_j and it
    vanishes at the region ends, so <g psi|H|psi>_j = E_j <g psi|psi>_j.
    Integrals are accumulated in log space.
    """
    idx = _indices(composite, regions)
    out = []
    for g in scaling_set:
        logs = []
        for j in idx:
            sol = composite.region_solutions[j]
            if not g.is_positive_on(sol.interval.a, sol.interval.b):
                raise DisallowedScalingError(
                    f"{g.describe()} is not strictly positive on region {j + 1}")
            u2 = (composite.region_scales[j] * sol.samples) ** 2
            with np.errstate(divide="ignore"):
                log_f = g.log(sol.x) + np.log(u2)
            logs.append(_log_trapezoid_mass(sol.x, log_f))
        logs = np.array(logs)
        w = np.exp(logs - logs.max())
        out.append(float(np.dot(w, composite.region_energies[idx]) / w.sum()))
    return out


def error_expression_2(composite: CompositeWavefunction, scaling_set: Sequence[ScalingFunction],
                       regions=None, reference=Reference.FULL_AVERAGE,
                       select: str = "anchored") -> float:
    """Mean over scaling functions of the squared shift of the g-weighted energy.

    For a strict subset of regions, ``select="anchored"`` keeps only the
    Gaussians centred inside the chosen regions (plus any g without a centre);
    ``select="all"`` keeps every function.
    """
    scaling_set = list(scaling_set)
    if not scaling_set:
        raise DisallowedScalingError("scaling set is empty")
    idx = _indices(composite, regions)
    chosen = _selected_scaling(composite, idx, scaling_set, select)
    ref = _reference_energy(composite, regions, reference)
    ratios = scaled_energy_ratios(composite, chosen, regions)
    return float(np.mean([(r - ref) ** 2 for r in ratios]))


@dataclass(frozen=True)
class ErrorReport:
    regions: tuple[int, ...]
    average_energy: float
    reference_energy: float
    err1: float
    err2: float | None
    per_region: tuple[tuple[int, float, float, float, float, float], ...]
    """(region, a, b, E, p, squared deviation from the reference)"""


def error_report(composite: CompositeWavefunction, regions=None,
                 reference=Reference.SUBSET_AVERAGE, scaling_set=None,
                 err2_reference=Reference.FULL_AVERAGE) -> ErrorReport:
    idx = _indices(composite, regions)
    label = tuple(int(j) + 1 for j in idx)
    ref = _reference_energy(composite, label, reference)
    rows = []
    for j in idx:
        sol = composite.region_solutions[j]
        e = float(composite.region_energies[j])
        rows.append((int(j) + 1, sol.interval.a, sol.interval.b, e,
                     float(composite.weights[j]), (e - ref) ** 2))
    err2 = None
    if scaling_set:
        err2 = error_expression_2(composite, scaling_set, label, reference=err2_reference)
    return ErrorReport(
        regions=label,
        average_energy=average_energy(composite, label),
        reference_energy=ref,
        err1=error_expression_1(composite, label, ref),
        err2=err2,
        per_region=tuple(rows),
    )


def reports_to_csv(reports: Sequence[ErrorReport], precision: int = csvio.DEFAULT_PRECISION,
                   metadata=None) -> str:
    rows = [(csvio.regions_label(r.regions), r.average_energy, r.reference_energy, r.err1, r.err2)
            for r in reports]
    return csvio.render(["subset", "E_avg", "reference", "err1", "err2"], rows, metadata, precision)


def per_region_csv(report: ErrorReport, precision: int = csvio.DEFAULT_PRECISION,
                   metadata=None) -> str:
    return csvio.render(["region", "a", "b", "E", "p", "sq_dev"], report.per_region,
                        metadata, precision)


@dataclass(frozen=True)
class LocalEnergyProfile:
    x: np.ndarray
    kinetic: np.ndarray
    potential: np.ndarray
    total: np.ndarray
    region: np.ndarray

    def rows(self):
        return zip(self.x, self.kinetic, self.potential, self.total)

    def in_region(self, number: int) -> "LocalEnergyProfile":
        sel = self.region == number
        return LocalEnergyProfile(self.x[sel], self.kinetic[sel], self.potential[sel],
                                  self.total[sel], self.region[sel])


def local_energy_profile(composite: CompositeWavefunction, mask_radius: float = MASK_RADIUS,
                         amplitude_floor: float = AMPLITUDE_FLOOR) -> LocalEnergyProfile:
    """Kinetic -psi''/(2 psi), potential and total local energy per grid point.

    Points closer than ``mask_radius`` grid spacings to a region end, or where
    the amplitude has decayed below ``amplitude_floor`` of the region maximum,
    are dropped.
    """
    xs, kin, pot, reg = [], [], [], []
    for j, sol in enumerate(composite.region_solutions):
        x, u, h = sol.x, sol.samples, sol.h
        lap = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / h**2
        xi, ui = x[1:-1], u[1:-1]
        keep = ((xi - sol.interval.a) >= mask_radius * h * (1 - 1e-9)) & \
               ((sol.interval.b - xi) >= mask_radius * h * (1 - 1e-9)) & \
               (np.abs(ui) >= amplitude_floor * np.max(np.abs(u)))
        xs.append(xi[keep])
        kin.append(-0.5 * lap[keep] / ui[keep])
        pot.append(composite.potential(xi[keep]))
        reg.append(np.full(int(keep.sum()), j + 1))
    x = np.concatenate(xs)
    k = np.concatenate(kin)
    v = np.concatenate(pot)
    return LocalEnergyProfile(x, k, v, k + v, np.concatenate(reg))


def kinetic_jump_at_node(composite: CompositeWavefunction, node: int,
                         profile: LocalEnergyProfile | None = None, points: int = 10) -> float:
    """Right-limit minus left-limit of the total local energy at interior node ``node``.

    Node j separates regions j and j+1. Each side is extrapolated linearly to
    the node from its ``points`` unmasked samples closest to it. V is
    continuous, so this is also the jump of the local kinetic energy.
    """
    if not 1 <= node <= composite.m - 1:
        raise ValueError(f"node {node} out of range 1..{composite.m - 1}")
    profile = profile or local_energy_profile(composite)
    x_node = composite.region_solutions[node - 1].interval.b
    left = profile.in_region(node)
    right = profile.in_region(node + 1)
    lx, ly = left.x[-points:], left.total[-points:]
    rx, ry = right.x[:points], right.total[:points]
    left_limit = np.polyval(np.polyfit(lx - x_node, ly, 1), 0.0)
    right_limit = np.polyval(np.polyfit(rx - x_node, ry, 1), 0.0)
    return float(right_limit - left_limit)


def reflect_odd(composite: CompositeWavefunction) -> tuple[np.ndarray, np.ndarray]:
    """Odd continuation psi(-x) = -psi(x) of a half-line composite."""
    x, y = composite.on_grid()
    if x[0] != 0.0:
        raise ValueError("odd reflection needs a composite starting at x = 0")
    return np.concatenate([-x[:0:-1], x]), np.concatenate([-y[:0:-1], y])


def sign_alternation_check(composite: CompositeWavefunction) -> tuple[bool, dict]:
    """Re-verify sign alternation from the sampled values, and odd parity on the half line."""
    sample_signs = []
    for x, y in composite.pieces():
        inner = y[1:-1]
        sample_signs.append(int(np.sign(inner[np.argmax(np.abs(inner))])))
    scale_signs = [int(np.sign(s)) for s in composite.region_scales]
    single_signed = []
    for x, y in composite.pieces():
        inner = y[1:-1]
        nz = inner[inner != 0]
        single_signed.append(bool(np.all(nz > 0) or np.all(nz < 0)))
    alternates = all(a == -b for a, b in zip(sample_signs, sample_signs[1:]))
    ok = alternates and scale_signs == sample_signs and all(single_signed)
    report = {
        "region_signs": sample_signs,
        "scale_signs": scale_signs,
        "single_signed": single_signed,
        "alternates": alternates,
    }
    if composite.kind is ProblemKind.HARMONIC_HALF_LINE:
        xf, yf = reflect_odd(composite)
        odd = bool(np.array_equal(xf[::-1], -xf) and np.array_equal(yf[::-1], -yf))
        report["odd_parity"] = odd
        # the reflected function changes sign at x = 0 as well
        report["full_line_signs"] = [-s for s in sample_signs[::-1]] + sample_signs
        ok = ok and odd and sample_signs[0] == -report["full_line_signs"][len(sample_signs) - 1]
    return ok, report
