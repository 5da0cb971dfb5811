"""
Energy of a multiplicatively modified eigenstate
================================================

For an exact eigenstate psi and a smooth positive g, the energy of g psi
exceeds E by (1/2) <g' psi|g' psi> / <g psi|g psi>. The residual of that
identity shrinks like h^2 on refined grids. The variant with the
Hamiltonian between the derivative factors does not hold at all.
"""
from nodalvar import (HYDROGEN_GAUSSIANS, exact_state, gradient_correction, make_problem,
                      rayleigh_quotient_scaled, verify_multiplicative_identity)

state = exact_state(make_problem("hydrogen"), "H 4S")
for k, g in enumerate(HYDROGEN_GAUSSIANS, 1):
    q = rayleigh_quotient_scaled(state, g)
    c = gradient_correction(state, g)
    print(f"g{k} {g.describe():32s} quotient {q:+.8f}  E + correction {state.energy + c:+.8f}")

report = verify_multiplicative_identity(state, HYDROGEN_GAUSSIANS[1], refinement_levels=3,
                                        base_refinement=16, g_id="g2")
print(report.to_csv(precision=6))
print("ratios between levels:", [round(r, 3) for r in report.ratios])
print("printed-form residuals:", [f"{r.residual:.3e}" for r in report.printed_rows])
