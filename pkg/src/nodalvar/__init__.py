"""Fixed-node region eigensolves and nodal error analysis for 1D model systems."""
from .analysis import (CompositeWavefunction, DegeneratePatchError, ErrorReport,
                       InvalidPartitionError, InvalidSubsetError, NodalPartition, Reference,
                       average_energy, build_composite, error_expression_1, error_expression_2,
                       error_report, kinetic_jump_at_node, local_energy_profile, patch_regions,
                       sign_alternation_check, squared_deviation)
from .jacobi import (DegenerateNodeError, DegenerateScalingError, gradient_correction,
                     node_slope_and_ratio_check, rayleigh_quotient_scaled,
                     verify_multiplicative_identity)
from .optimize import NodeObjective, ObjectiveKind, OptOptions, OptResult, evaluate_objective, optimize_nodes
from .problems import (ConfigurationError, DegenerateFunctionError, ExactState, Problem1D, ProblemKind,
                       UnsupportedStateError, exact_state, find_nodes, make_problem)
from .scaling import (HYDROGEN_GAUSSIANS, OSCILLATOR_GAUSSIANS, DisallowedScalingError, ScalingFunction,
                      constant, gaussian, polynomial)
from .solver import (InsufficientResolutionError, Interval, NumericFailureError, RegionSolution,
                     convergence_study, region_ground_state, richardson_ratios)

__version__ = "0.1.0"
