"""INI-style run configuration shared by the command-line subcommands.

Example::

    [problem]
    kind = hydrogen
    x_max = 120
    n_points = 24001

    [nodes]
    values = 2.0240, 6.6068, 15.6442   ; or "exact" for the analytic nodes

    [subset]
    regions = all            ; or e.g. "3,4; 1,2,3,4"
    reference = subset       ; subset | full | a number
    exact_energy = -0.03125

    [objective]
    kind = err1              ; err1 | err2
    scaling = hydrogen       ; hydrogen | oscillator | d:x0, d:x0, ...
    max_iterations = 500
    simplex_scale = 0.1
    tolerance = 1e-12

    [jacobi]
    state = H 4S
    scaling = hydrogen
    refinement_levels = 3
    base_refinement = 16
    tolerance = 1e-6

    [output]
    directory = out
    precision = 6

Every section is optional except where a subcommand needs it. Unknown
sections or keys are rejected.
"""
from __future__ import annotations

import configparser
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

from .analysis import InvalidPartitionError, NodalPartition, Reference
from .optimize import ObjectiveKind, OptOptions
from .problems import ConfigurationError, Problem1D, ProblemKind, exact_state, make_problem
from .scaling import HYDROGEN_GAUSSIANS, OSCILLATOR_GAUSSIANS, ScalingFunction, gaussian

__all__ = ["RunConfig", "load_config", "parse_config", "grid_scale_from_env", "GRID_SCALE_ENV"]

GRID_SCALE_ENV = "NODALVAR_GRID_SCALE"

ALLOWED = {
    "problem": {"kind", "x_max", "n_points"},
    "nodes": {"values"},
    "subset": {"regions", "reference", "exact_energy"},
    "objective": {"kind", "scaling", "max_iterations", "simplex_scale", "tolerance"},
    "jacobi": {"state", "scaling", "refinement_levels", "base_refinement", "tolerance"},
    "output": {"directory", "precision"},
}
NAMED_SCALING = {"hydrogen": HYDROGEN_GAUSSIANS, "oscillator": OSCILLATOR_GAUSSIANS}
BENCHMARK_STATES = {ProblemKind.HYDROGEN_RADIAL: "H 4S", ProblemKind.HARMONIC_HALF_LINE: "HO n=5"}


@dataclass(frozen=True)
class RunConfig:
    problem: Problem1D | None = None
    nodes: tuple[float, ...] = ()
    subsets: tuple[tuple[int, ...], ...] | None = None  # None means every non-empty subset
    reference: Reference | float = Reference.SUBSET_AVERAGE
    exact_energy: float | None = None
    objective_kind: ObjectiveKind = ObjectiveKind.ERR1
    scaling_set: tuple[ScalingFunction, ...] = ()
    options: OptOptions = field(default_factory=OptOptions)
    jacobi_state: str | None = None
    jacobi_scaling: tuple[ScalingFunction, ...] = ()
    refinement_levels: int = 3
    base_refinement: int = 16
    jacobi_tolerance: float = 1e-6
    output_dir: Path | None = None
    precision: int = 6

    def require_nodes(self) -> NodalPartition:
        if self.problem is None:
            raise ConfigurationError("config needs a [problem] section")
        if not self.nodes:
            raise ConfigurationError("config needs [nodes] values")
        return NodalPartition(self.problem, self.nodes)


def grid_scale_from_env() -> float:
    raw = os.environ.get(GRID_SCALE_ENV)
    if raw is None or raw.strip() == "":
        return 1.0
    try:
        value = float(raw)
    except ValueError:
        raise ConfigurationError(f"{GRID_SCALE_ENV} must be a number, got {raw!r}") from None
    if not value > 0 or not math.isfinite(value):
        raise ConfigurationError(f"{GRID_SCALE_ENV} must be positive, got {raw!r}")
    return value


def _float(section, key, text) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigurationError(f"[{section}] {key}: not a number: {text!r}") from None
    if not math.isfinite(value):
        raise ConfigurationError(f"[{section}] {key}: must be finite")
    return value


def _int(section, key, text) -> int:
    value = _float(section, key, text)
    if value != int(value):
        raise ConfigurationError(f"[{section}] {key}: must be an integer, got {text!r}")
    return int(value)


def _floats(section, key, text) -> tuple[float, ...]:
    parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
    return tuple(_float(section, key, p.strip()) for p in parts)


def _scaling(section, text) -> tuple[ScalingFunction, ...]:
    key = text.strip().lower()
    if key in NAMED_SCALING:
        return NAMED_SCALING[key]
    if key in ("", "none"):
        return ()
    out = []
    for item in text.split(","):
        d, sep, x0 = item.partition(":")
        if not sep:
            raise ConfigurationError(f"[{section}] scaling: expected d:x0 pairs, got {item.strip()!r}")
        try:
            out.append(gaussian(_float(section, "scaling", d), _float(section, "scaling", x0)))
        except ValueError as exc:
            raise ConfigurationError(f"[{section}] scaling: {exc}") from None
    return tuple(out)


def _subsets(text) -> tuple[tuple[int, ...], ...] | None:
    if text.strip().lower() == "all":
        return None
    subsets = []
    for group in text.split(";"):
        if not group.strip():
            continue
        subsets.append(tuple(_int("subset", "regions", p.strip()) for p in group.split(",") if p.strip()))
    if not subsets or any(not s for s in subsets):
        raise ConfigurationError("[subset] regions: empty subset")
    return tuple(subsets)


def parse_config(text: str, grid_scale: float = 1.0) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config: {exc}") from None
    for section in parser.sections():
        if section not in ALLOWED:
            raise ConfigurationError(f"unknown section [{section}]")
        unknown = set(parser[section]) - ALLOWED[section]
        if unknown:
            raise ConfigurationError(f"unknown key(s) in [{section}]: {', '.join(sorted(unknown))}")
    kw = {}
    if parser.has_section("problem"):
        sec = parser["problem"]
        if "kind" not in sec:
            raise ConfigurationError("[problem] kind is required")
        kind = ProblemKind.parse(sec["kind"])
        x_max = _float("problem", "x_max", sec["x_max"]) if "x_max" in sec else None
        n_points = _int("problem", "n_points", sec["n_points"]) if "n_points" in sec else None
        base = make_problem(kind, x_max, n_points)
        n = int(round((base.n_points - 1) * grid_scale)) + 1
        kw["problem"] = make_problem(kind, base.x_max, n)
    if parser.has_section("nodes") and "values" in parser["nodes"]:
        text = parser["nodes"]["values"]
        if text.strip().lower() == "exact":
            if "problem" not in kw:
                raise ConfigurationError("[nodes] values = exact needs a [problem] section")
            label = BENCHMARK_STATES[kw["problem"].kind]
            kw["nodes"] = exact_state(kw["problem"], label).interior_nodes
        else:
            kw["nodes"] = _floats("nodes", "values", text)
    if parser.has_section("subset"):
        sec = parser["subset"]
        if "regions" in sec:
            kw["subsets"] = _subsets(sec["regions"])
        if "reference" in sec:
            ref = sec["reference"].strip().lower()
            kw["reference"] = Reference(ref) if ref in ("subset", "full") else _float("subset", "reference", ref)
        if "exact_energy" in sec:
            kw["exact_energy"] = _float("subset", "exact_energy", sec["exact_energy"])
    if parser.has_section("objective"):
        sec = parser["objective"]
        if "kind" in sec:
            try:
                kw["objective_kind"] = ObjectiveKind(sec["kind"].strip().lower())
            except ValueError:
                raise ConfigurationError(f"[objective] kind must be err1 or err2, got {sec['kind']!r}") from None
        if "scaling" in sec:
            kw["scaling_set"] = _scaling("objective", sec["scaling"])
        opts = {}
        if "max_iterations" in sec:
            opts["max_iterations"] = _int("objective", "max_iterations", sec["max_iterations"])
        if "simplex_scale" in sec:
            opts["simplex_scale"] = _float("objective", "simplex_scale", sec["simplex_scale"])
        if "tolerance" in sec:
            opts["tolerance"] = _float("objective", "tolerance", sec["tolerance"])
        try:
            kw["options"] = OptOptions(**opts)
        except ValueError as exc:
            raise ConfigurationError(f"[objective] {exc}") from None
    if parser.has_section("jacobi"):
        sec = parser["jacobi"]
        if "state" in sec:
            kw["jacobi_state"] = sec["state"].strip()
        if "scaling" in sec:
            kw["jacobi_scaling"] = _scaling("jacobi", sec["scaling"])
        if "refinement_levels" in sec:
            kw["refinement_levels"] = _int("jacobi", "refinement_levels", sec["refinement_levels"])
            if kw["refinement_levels"] < 2:
                raise ConfigurationError("[jacobi] refinement_levels must be at least 2")
        if "base_refinement" in sec:
            kw["base_refinement"] = _int("jacobi", "base_refinement", sec["base_refinement"])
            if kw["base_refinement"] < 1:
                raise ConfigurationError("[jacobi] base_refinement must be at least 1")
        if "tolerance" in sec:
            kw["jacobi_tolerance"] = _float("jacobi", "tolerance", sec["tolerance"])
    if parser.has_section("output"):
        sec = parser["output"]
        if "directory" in sec:
            kw["output_dir"] = Path(sec["directory"].strip())
        if "precision" in sec:
            kw["precision"] = _int("output", "precision", sec["precision"])
            if not 1 <= kw["precision"] <= 17:
                raise ConfigurationError("[output] precision must be between 1 and 17")
    cfg = RunConfig(**kw)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig):
    if cfg.nodes and cfg.problem is not None:
        try:
            partition = NodalPartition(cfg.problem, cfg.nodes)
        except InvalidPartitionError as exc:
            raise ConfigurationError(str(exc)) from None
        m = partition.m
        for s in cfg.subsets or ():
            if len(set(s)) != len(s) or any(not 1 <= r <= m for r in s):
                raise ConfigurationError(f"[subset] regions {s} invalid for {m} regions")
    if cfg.objective_kind is ObjectiveKind.ERR2 and not cfg.scaling_set:
        raise ConfigurationError("[objective] err2 needs a scaling set")
    for g in cfg.scaling_set + cfg.jacobi_scaling:
        lo, hi = (cfg.problem.x_min, cfg.problem.x_max) if cfg.problem else (0.0, math.inf)
        if g.kind == "gaussian" and not g.is_positive_on(lo, hi):
            raise ConfigurationError(f"scaling function {g.describe()} is not strictly positive")


def load_config(path, grid_scale: float | None = None) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc.strerror}") from None
    scale = grid_scale_from_env() if grid_scale is None else grid_scale
    return parse_config(text, scale)
