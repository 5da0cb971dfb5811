"""Node-position search that minimizes an error expression."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import csvio
from .analysis import (InvalidPartitionError, Reference, build_composite, error_expression_1,
                       error_expression_2)
from .problems import Problem1D
from .scaling import DisallowedScalingError, ScalingFunction
from .solver import InsufficientResolutionError

__all__ = [
    "ObjectiveKind",
    "NodeObjective",
    "OptOptions",
    "OptResult",
    "evaluate_objective",
    "optimize_nodes",
]


class ObjectiveKind(str, enum.Enum):
    ERR1 = "err1"
    ERR2 = "err2"


@dataclass(frozen=True)
class NodeObjective:
    kind: ObjectiveKind
    problem: Problem1D
    scaling_set: tuple[ScalingFunction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", ObjectiveKind(self.kind))
        object.__setattr__(self, "scaling_set", tuple(self.scaling_set or ()))
        if self.kind is ObjectiveKind.ERR2:
            if not self.scaling_set:
                raise DisallowedScalingError("err2 objective needs a non-empty scaling set")
            for g in self.scaling_set:
                if not g.is_positive_on(self.problem.x_min, self.problem.x_max):
                    raise DisallowedScalingError(f"{g.describe()} is not strictly positive")


def evaluate_objective(objective: NodeObjective, nodes) -> float:
    """Error expression of the composite patched on ``nodes`` (full set of regions)."""
    composite = build_composite(objective.problem, nodes)
    if objective.kind is ObjectiveKind.ERR1:
        return error_expression_1(composite, None, Reference.SUBSET_AVERAGE)
    return error_expression_2(composite, objective.scaling_set, None, Reference.FULL_AVERAGE)


@dataclass(frozen=True)
class OptOptions:
    max_iterations: int = 500
    simplex_scale: float = 0.1
    tolerance: float = 1e-12

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not self.simplex_scale > 0:
            raise ValueError("simplex_scale must be positive")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")


@dataclass(frozen=True)
class OptResult:
    nodes: tuple[float, ...]
    objective_value: float
    iterations: int
    trace: tuple[tuple[tuple[float, ...], float], ...] = field(repr=False)
    converged: bool
    message: str = ""

    def trace_csv(self, precision: int = csvio.DEFAULT_PRECISION, metadata=None) -> str:
        m = len(self.nodes)
        header = ["iter"] + [f"node_{k}" for k in range(1, m + 1)] + ["objective"]
        rows = [(i,) + tuple(n) + (v,) for i, (n, v) in enumerate(self.trace)]
        return csvio.render(header, rows, metadata, precision)


def optimize_nodes(objective: NodeObjective, initial, options: OptOptions | None = None) -> OptResult:
    """Downhill-simplex search over interior node positions.

    Invalid partitions (misordered nodes, regions narrower than the resolution
    floor) evaluate to +inf, which the simplex treats as a wall. The trace
    records the best vertex after every iteration, starting from ``initial``.
    Convergence means the spread of objective values over the simplex fell
    below ``options.tolerance``; running out of iterations returns the best
    point with ``converged=False``.
    """
    options = options or OptOptions()
    x0 = np.asarray(initial, dtype=float)
    f0 = evaluate_objective(objective, x0)  # invalid initial nodes raise here

    def f(x):
        try:
            return evaluate_objective(objective, x)
        except (InvalidPartitionError, InsufficientResolutionError):
            return math.inf

    n = x0.size
    simplex = np.vstack([x0] + [x0 + options.simplex_scale * e for e in np.eye(n)])
    trace = [(tuple(float(v) for v in x0), float(f0))]

    def record(intermediate_result):
        trace.append((tuple(float(v) for v in intermediate_result.x),
                      float(intermediate_result.fun)))

    res = minimize(f, x0, method="Nelder-Mead", callback=record,
                   options={"initial_simplex": simplex, "maxiter": options.max_iterations,
                            "maxfev": 10 * options.max_iterations + 100,
                            "fatol": options.tolerance, "xatol": math.inf})
    best = tuple(float(v) for v in res.x)
    value = evaluate_objective(objective, best)
    return OptResult(best, value, int(res.nit), tuple(trace), bool(res.status == 0),
                     str(res.message))
