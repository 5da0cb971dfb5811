"""
Moving nodes until every region has the same energy
===================================================

Minimizing either error expression over the node positions drives the
region energies together, and the minimum sits at the exact nodes.
"""
import numpy as np

from nodalvar import (OSCILLATOR_GAUSSIANS, NodeObjective, ObjectiveKind, exact_state,
                      make_problem, optimize_nodes)

hydrogen = make_problem("hydrogen")
res = optimize_nodes(NodeObjective(ObjectiveKind.ERR1, hydrogen), (2.0240, 6.6068, 15.6442))
print("hydrogen err1:", np.round(res.nodes, 5), f"objective {res.objective_value:.2e}",
      f"after {res.iterations} iterations")
print("exact:        ", np.round(exact_state(hydrogen, "H 4S").interior_nodes, 5))

oscillator = make_problem("oscillator")
exact = exact_state(oscillator, "HO n=5").interior_nodes
for kind, start in ((ObjectiveKind.ERR1, (0.759, 2.080)), (ObjectiveKind.ERR2, (0.985, 2.420))):
    objective = NodeObjective(kind, oscillator, OSCILLATOR_GAUSSIANS)
    res = optimize_nodes(objective, start)
    print(f"oscillator {kind.value} from {start}:", np.round(res.nodes, 5),
          f"objective {res.objective_value:.2e}")
print("exact:", np.round(exact, 5))

# the trace is what the CLI writes to trace.csv
print(res.trace_csv(precision=5)[:400])
