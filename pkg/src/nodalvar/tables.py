"""Built-in benchmark configurations and reproduction of the reference tables
and figure data, with a data-driven comparison against bundled expectations.

Node triples for the hydrogen wave functions of tables II-IV are not known
directly; they were recovered with :func:`reconstruct_nodes` from the
single-region energies and are stored here together with their fit
residuals. The oscillator node pairs are likewise fitted to the region
energies; they agree with the three-decimal node values usually quoted.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
from scipy.optimize import least_squares

from . import csvio
from .analysis import (Reference, average_energy, build_composite, error_expression_1,
                       error_expression_2, local_energy_profile, reflect_odd)
from .problems import ConfigurationError, Problem1D, exact_state, make_problem
from .scaling import HYDROGEN_GAUSSIANS, OSCILLATOR_GAUSSIANS
from .solver import Interval, region_ground_state

__all__ = [
    "HydrogenConfig",
    "HYDROGEN_CONFIGS",
    "OSCILLATOR_NODES",
    "OSCILLATOR_QUOTED_NODES",
    "TABLE_IDS",
    "Reproduction",
    "DiffReport",
    "reconstruct_nodes",
    "hydrogen_table",
    "reproduce",
    "load_expected",
    "diff",
    "scaled_problem",
]

TABLE_IDS = ("I", "II", "III", "IV", "V", "Fig1", "Fig2")
H4S_ENERGY = -1.0 / 32.0


@dataclass(frozen=True)
class HydrogenConfig:
    name: str
    nodes: tuple[float, float, float]
    source: str
    target_energies: tuple[float | None, ...] = ()
    fit_residuals: tuple[float | None, ...] = ()


HYDROGEN_CONFIGS = {
    "I": HydrogenConfig("I", (2.0240, 6.6068, 15.6442), "given"),
    # region-1 energies printed as -0.01000 are excluded from the fits; see reconstruct_nodes.
    # fit_residuals are E_region - target in hartree at the stored nodes
    "II": HydrogenConfig("II", (1.8483614, 6.7530868, 15.3378203), "reconstructed",
                         (None, -0.04337, -0.02636, -0.03153), (None, -2.97e-09, 1.30e-09, -4.55e-11)),
    "III": HydrogenConfig("III", (1.8591174, 6.6865082, 15.1817506), "reconstructed",
                          (-0.02075, -0.03789, -0.02588, -0.03178),
                          (-2.27e-09, 1.48e-07, 2.01e-07, 2.36e-06)),
    "IV": HydrogenConfig("IV", (1.5955606, 6.3395271, 15.1802729), "reconstructed",
                         (None, -0.05227, -0.03312, -0.03178), (None, -2.09e-09, 8.64e-10, -2.83e-10)),
}

OSCILLATOR_NODES = {
    "HO-1": (0.7586078, 2.0802068),
    "HO-2": (0.9850854, 2.4201817),
}
OSCILLATOR_QUOTED_NODES = {
    "HO-1": (0.759, 2.080),
    "HO-2": (0.985, 2.420),
}
OSCILLATOR_TARGET_ENERGIES = {
    "HO-1": (8.6564, 3.8478, 5.6742),
    "HO-2": (5.2218, 3.8525, 6.7234),
}
# (wave function, regions) rows of the oscillator summary table
TABLE_V_ROWS = (("HO-1", (1, 2, 3)), ("HO-1", (3,)), ("HO-2", (1, 2, 3)), ("HO-2", (1,)))


def scaled_problem(kind, grid_scale: float = 1.0) -> Problem1D:
    """Default problem of ``kind`` with n_points multiplied by ``grid_scale``."""
    base = make_problem(kind)
    if not grid_scale > 0 or not math.isfinite(grid_scale):
        raise ConfigurationError(f"grid scale must be positive, got {grid_scale}")
    n = int(round((base.n_points - 1) * grid_scale)) + 1
    return make_problem(kind, base.x_max, n)


def region_energies(problem: Problem1D, nodes) -> np.ndarray:
    edges = (problem.x_min,) + tuple(nodes) + (problem.x_max,)
    return np.array([region_ground_state(problem, Interval(a, b)).energy
                     for a, b in zip(edges, edges[1:])])


def reconstruct_nodes(problem: Problem1D, target_energies, initial) -> tuple[tuple[float, ...], np.ndarray]:
    """Nodes whose region ground-state energies match ``target_energies``.

    Entries given as None are left out of the fit. Relative energy residuals
    are minimized by least squares; returns (nodes, residuals of the used
    entries).
    """
    targets = np.array([np.nan if e is None else float(e) for e in target_energies])
    used = ~np.isnan(targets)
    if used.sum() < len(initial):
        raise ConfigurationError("fewer usable energies than unknown nodes")

    def residual(nodes):
        if np.any(np.diff(nodes) <= 0) or nodes[0] <= problem.x_min or nodes[-1] >= problem.x_max:
            return np.full(int(used.sum()), 1e3)
        return (region_energies(problem, nodes)[used] - targets[used]) / np.abs(targets[used])

    span = problem.x_max - problem.x_min
    fit = least_squares(residual, np.asarray(initial, dtype=float),
                        x_scale=np.maximum(0.05 * np.asarray(initial, dtype=float), 1e-3 * span),
                        xtol=1e-12, ftol=1e-12)
    nodes = tuple(float(v) for v in fit.x)
    return nodes, region_energies(problem, nodes)[used] - targets[used]


@dataclass
class Reproduction:
    table_id: str
    header: tuple[str, ...]
    rows: list[tuple]
    metadata: dict[str, str] = field(default_factory=dict)
    cells: dict[tuple[str, str], float] = field(default_factory=dict)
    plots: dict[str, tuple[np.ndarray, np.ndarray]] = field(default_factory=dict)

    def csv(self, precision: int = csvio.DEFAULT_PRECISION) -> str:
        return csvio.render(self.header, self.rows, self.metadata, precision)

    def plot_csvs(self, precision: int = csvio.DEFAULT_PRECISION) -> dict[str, str]:
        return {name: csvio.render(["x", "value"], zip(x, y), None, precision)
                for name, (x, y) in self.plots.items()}


def _subsets(m):
    for size in range(1, m + 1):
        yield from itertools.combinations(range(1, m + 1), size)


def hydrogen_table(problem: Problem1D, nodes, table_id: str = "custom",
                   scaling_set=HYDROGEN_GAUSSIANS) -> Reproduction:
    """All-subset energy and error table of the hydrogen 4S composite on ``nodes``."""
    c = build_composite(problem, nodes)
    rows, cells = [], {}
    for subset in _subsets(c.m):
        label = csvio.regions_label(subset)
        e = average_energy(c, subset)
        vals = {
            "E_avg": e,
            "sq_dev_exact": (H4S_ENERGY - e) ** 2,
            "err1_full": error_expression_1(c, subset, Reference.FULL_AVERAGE),
            "err1_subset": error_expression_1(c, subset, Reference.SUBSET_AVERAGE),
            "err2": error_expression_2(c, scaling_set, subset, Reference.FULL_AVERAGE),
        }
        rows.append((label,) + tuple(vals.values()))
        cells.update({(label, k): v for k, v in vals.items()})
    for j, (p, e) in enumerate(zip(c.weights, c.region_energies), 1):
        cells[("weights", f"p{j}")] = float(p)
        cells[(f"region {j}", "E")] = float(e)
    meta = {
        "table": table_id,
        "problem": f"{problem.kind.value} x_max={problem.x_max:g} n_points={problem.n_points}",
        "nodes": " ".join(f"{n:.7f}" for n in c.nodes),
        "weights": " ".join(f"{p:.6f}" for p in c.weights),
        "region_energies": " ".join(f"{e:.7f}" for e in c.region_energies),
        "exact_energy": f"{H4S_ENERGY}",
    }
    header = ("subset", "E_avg", "sq_dev_exact", "err1_full", "err1_subset", "err2")
    return Reproduction(table_id, header, rows, meta, cells)


def _table_v(problem: Problem1D) -> Reproduction:
    rows, cells = [], {}
    composites = {name: build_composite(problem, nodes) for name, nodes in OSCILLATOR_NODES.items()}
    for name, regions in TABLE_V_ROWS:
        c = composites[name]
        label = f"{name} ({csvio.regions_label(regions)})"
        full = len(regions) == c.m
        # whole-function rows: variance about the mean; single regions: deviation from the full mean
        e = average_energy(c, regions)
        e1 = error_expression_1(c, regions, Reference.SUBSET_AVERAGE if full else Reference.FULL_AVERAGE)
        e2 = error_expression_2(c, OSCILLATOR_GAUSSIANS, regions, Reference.FULL_AVERAGE)
        rows.append((name, csvio.regions_label(regions), e, e1, e2))
        cells.update({(label, "energy"): e, (label, "err1"): e1, (label, "err2"): e2})
    meta = {
        "table": "V",
        "problem": f"{problem.kind.value} x_max={problem.x_max:g} n_points={problem.n_points}",
    }
    for name, c in composites.items():
        meta[f"{name} nodes"] = " ".join(f"{n:.7f}" for n in c.nodes)
    return Reproduction("V", ("wavefunction", "regions", "energy", "err1", "err2"), rows, meta, cells)


def _figure_plots(prefix, composite, exact=None):
    plots = {}
    x, psi = composite.on_grid()
    plots[f"{prefix}_wavefunction"] = (x, psi)
    if exact is not None:
        sign = 1.0 if np.dot(psi, exact.evaluate(x)) >= 0 else -1.0
        plots[f"{prefix}_exact"] = (x, sign * exact.evaluate(x))
    prof = local_energy_profile(composite)
    plots[f"{prefix}_kinetic"] = (prof.x, prof.kinetic)
    plots[f"{prefix}_potential"] = (prof.x, prof.potential)
    plots[f"{prefix}_total"] = (prof.x, prof.total)
    return plots


def _figure(problem: Problem1D, configs: dict, label: str, fig_id: str, odd: bool) -> Reproduction:
    exact = exact_state(problem, label)
    rows, cells, plots = [], {}, {}
    for name, nodes in configs.items():
        c = build_composite(problem, nodes)
        prefix = name.lower().replace("-", "")
        for j, sol in enumerate(c.region_solutions, 1):
            rows.append((name, j, sol.interval.a, sol.interval.b, sol.energy, c.weights[j - 1]))
            key = f"region {j}" if len(configs) == 1 else f"{name} region {j}"
            cells[(key, "E")] = sol.energy
        plots.update(_figure_plots(prefix, c, exact))
        if odd:
            plots[f"{prefix}_full_line"] = reflect_odd(c)
    for k, n in enumerate(exact.interior_nodes, 1):
        cells[(f"exact node {k}", "x")] = n
    exact_regions = region_energies(problem, exact.interior_nodes)
    cells[("exact", "E")] = float(np.mean(exact_regions))
    meta = {
        "figure": fig_id,
        "problem": f"{problem.kind.value} x_max={problem.x_max:g} n_points={problem.n_points}",
        "exact_nodes": " ".join(f"{n:.7f}" for n in exact.interior_nodes),
        "exact_node_region_energies": " ".join(f"{e:.7f}" for e in exact_regions),
    }
    return Reproduction(fig_id, ("wavefunction", "region", "a", "b", "E", "p"), rows, meta, cells, plots)


def reproduce(table_id: str, grid_scale: float = 1.0) -> Reproduction:
    """Recompute one reference table or figure data set on the built-in configs."""
    tid = _canonical(table_id)
    if tid in HYDROGEN_CONFIGS:
        cfg = HYDROGEN_CONFIGS[tid]
        rep = hydrogen_table(scaled_problem("hydrogen", grid_scale), cfg.nodes, tid)
        rep.metadata["node_source"] = cfg.source
        if cfg.fit_residuals:
            rep.metadata["fit_residuals"] = " ".join(
                "excluded" if r is None else f"{r:.2e}" for r in cfg.fit_residuals)
        return rep
    if tid == "V":
        return _table_v(scaled_problem("oscillator", grid_scale))
    if tid == "Fig1":
        return _figure(scaled_problem("hydrogen", grid_scale), {"I": HYDROGEN_CONFIGS["I"].nodes},
                       "H 4S", "Fig1", odd=False)
    return _figure(scaled_problem("oscillator", grid_scale), OSCILLATOR_NODES, "HO n=5", "Fig2", odd=True)


def _canonical(table_id: str) -> str:
    for tid in TABLE_IDS:
        if str(table_id).strip().lower() == tid.lower():
            return tid
    raise ConfigurationError(f"unknown table id {table_id!r}; choose from {', '.join(TABLE_IDS)}")


@dataclass(frozen=True)
class ExpectedCell:
    row: str
    column: str
    expected: float
    tolerance: float
    mode: str  # abs, rel or info (reported, never failing)


def load_expected(table_id: str) -> list[ExpectedCell]:
    tid = _canonical(table_id)
    name = f"fig_{tid[-1]}.csv" if tid.startswith("Fig") else f"table_{tid}.csv"
    text = resources.files("nodalvar").joinpath("data", name).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    reader = csv.DictReader(io.StringIO("\n".join(lines)))
    return [ExpectedCell(r["row"], r["column"], float(r["expected"]), float(r["tolerance"]), r["mode"])
            for r in reader]


@dataclass(frozen=True)
class CellDiff:
    cell: ExpectedCell
    value: float

    @property
    def deviation(self) -> float:
        return abs(self.value - self.cell.expected)

    @property
    def relative_deviation(self) -> float:
        if self.cell.expected == 0:
            return 0.0 if self.value == 0 else math.inf
        return self.deviation / abs(self.cell.expected)

    @property
    def passed(self) -> bool:
        c = self.cell
        if c.mode == "info":
            return True
        if c.mode == "abs":
            return self.deviation <= c.tolerance
        return self.relative_deviation <= c.tolerance


@dataclass(frozen=True)
class DiffReport:
    table_id: str
    cells: tuple[CellDiff, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cells)

    @property
    def failures(self) -> list[CellDiff]:
        return [c for c in self.cells if not c.passed]

    @property
    def max_relative_deviation(self) -> float:
        finite = [c.relative_deviation for c in self.cells
                  if c.cell.mode != "info" and math.isfinite(c.relative_deviation)]
        return max(finite, default=0.0)

    def csv(self, precision: int = csvio.DEFAULT_PRECISION) -> str:
        rows = [(c.cell.row, c.cell.column, c.cell.expected, c.value, c.cell.tolerance, c.cell.mode,
                 c.deviation, c.relative_deviation, "pass" if c.passed else "FAIL") for c in self.cells]
        meta = {"table": self.table_id, "cells": len(self.cells),
                "failed": len(self.failures),
                "max_relative_deviation": f"{self.max_relative_deviation:.4g}"}
        return csvio.render(["row", "column", "expected", "value", "tolerance", "mode",
                             "deviation", "rel_deviation", "status"], rows, meta, precision)


def diff(reproduction: Reproduction) -> DiffReport:
    out = []
    for cell in load_expected(reproduction.table_id):
        key = (cell.row, cell.column)
        if key not in reproduction.cells:
            raise KeyError(f"reproduction of {reproduction.table_id} has no cell {key}")
        out.append(CellDiff(cell, float(reproduction.cells[key])))
    return DiffReport(reproduction.table_id, tuple(out))
