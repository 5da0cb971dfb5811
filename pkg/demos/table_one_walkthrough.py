"""
Region energies and error expressions for an approximate 4S node set
=====================================================================

Solve the radial hydrogen problem separately in each nodal region,
patch the pieces into one smooth trial function, and look at how the
region energies spread around the exact -1/32 hartree.
"""
import itertools

import numpy as np

from nodalvar import (HYDROGEN_GAUSSIANS, Reference, average_energy, build_composite,
                      error_expression_1, error_expression_2, exact_state, kinetic_jump_at_node,
                      local_energy_profile, make_problem)

problem = make_problem("hydrogen")
exact = exact_state(problem, "H 4S")
nodes = (2.0240, 6.6068, 15.6442)
trial = build_composite(problem, nodes)

print("exact nodes:", np.round(exact.interior_nodes, 4))
print("trial nodes:", nodes)
for j, (e, p) in enumerate(zip(trial.region_energies, trial.weights), 1):
    print(f"region {j}: E = {e:+.5f}  weight = {p:.6f}")

# The weighted average sits close to the exact energy even though the
# individual regions are far from it.
print(f"full average {trial.full_average():+.5f}  exact {exact.energy:+.5f}")

###############################################################################
# Every subset of regions
print("subset      E_avg      err1(subset)  err1(full)")
for k in range(1, 5):
    for subset in itertools.combinations(range(1, 5), k):
        label = ",".join(map(str, subset))
        print(f"{label:10s} {average_energy(trial, subset):+.5f}  "
              f"{error_expression_1(trial, subset, Reference.SUBSET_AVERAGE):.4e}  "
              f"{error_expression_1(trial, subset, Reference.FULL_AVERAGE):.4e}")

print("err2, all regions:", f"{error_expression_2(trial, HYDROGEN_GAUSSIANS):.4e}")
print("err2, regions 3,4:", f"{error_expression_2(trial, HYDROGEN_GAUSSIANS, (3, 4)):.4e}")

###############################################################################
# The local energy is flat inside each region and jumps at the nodes by the
# difference of neighbouring region energies.
profile = local_energy_profile(trial)
for k in range(1, trial.m):
    print(f"jump at node {k}: {kinetic_jump_at_node(trial, k, profile):+.5f}")

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    x, psi = trial.on_grid()
    fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(6, 6))
    ax1.plot(x, psi, label="patched trial")
    ax1.plot(x, exact.evaluate(x), "--", label="exact 4S")
    ax1.legend()
    ax2.plot(profile.x, profile.total, ".", ms=1)
    ax2.axhline(exact.energy, color="k", lw=0.5)
    ax2.set_ylim(-0.2, 0.05)
    ax2.set_xlim(0, 40)
    ax2.set_xlabel("r (bohr)")
    ax2.set_ylabel("local energy")
    fig.savefig("table_one_walkthrough.png", dpi=120)
