import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nodalvar import (HYDROGEN_GAUSSIANS, OSCILLATOR_GAUSSIANS, DisallowedScalingError,
                      InvalidPartitionError, InvalidSubsetError, Reference, average_energy,
                      build_composite, error_expression_1, error_expression_2, error_report,
                      kinetic_jump_at_node, local_energy_profile, patch_regions, polynomial,
                      sign_alternation_check, squared_deviation)
from nodalvar.analysis import per_region_csv, reports_to_csv
from nodalvar.solver import Interval, RegionSolution, dirichlet_ground_state, region_ground_state

FULL = Reference.FULL_AVERAGE
SUBSET = Reference.SUBSET_AVERAGE


def test_weights_table_i(table_i):
    assert np.allclose(table_i.weights, [0.007188, 0.030936, 0.128878, 0.832998], atol=2e-3)
    assert table_i.weights.sum() == pytest.approx(1.0, abs=1e-14)


def test_composite_norm(table_i):
    x, psi = table_i.on_grid()
    assert np.trapezoid(psi**2, x) == pytest.approx(1.0, abs=1e-12)


def test_exact_node_composite_is_eigenstate(h_exact_composite, h4s):
    x, psi = h_exact_composite.on_grid()
    ref = h4s.evaluate(x)
    sign = np.sign(np.dot(psi, ref))
    assert np.max(np.abs(sign * psi - ref)) < 1e-4 * np.max(np.abs(ref))


def test_particle_in_box_halves():
    # first excited state of a unit box has its node at 1/2
    parts = []
    for a, b in ((0.0, 0.5), (0.5, 1.0)):
        e, x, u = dirichlet_ground_state(lambda x: 0 * x, a, b, 0.001)
        parts.append(RegionSolution(Interval(a, b), e, x, u, float(np.trapezoid(u**2, x)), x[1] - x[0]))
    c = patch_regions(parts, potential=lambda x: 0 * x)
    assert np.allclose(c.weights, [0.5, 0.5], atol=1e-12)
    assert c.region_scales[0] == pytest.approx(-c.region_scales[1])


def test_invalid_partition(hydrogen):
    with pytest.raises(InvalidPartitionError, match="strictly increasing"):
        build_composite(hydrogen, (6.6, 2.0))
    with pytest.raises(InvalidPartitionError):
        build_composite(hydrogen, (2.0, 2.1))
    with pytest.raises(InvalidPartitionError):
        build_composite(hydrogen, (2.0, 130.0))


@pytest.mark.parametrize("subset,expected", [((1, 2, 3, 4), -0.03139), ((1, 2), -0.03453), ((3,), -0.03261)])
def test_average_energy(table_i, subset, expected):
    assert average_energy(table_i, subset) == pytest.approx(expected, abs=1e-4)


def test_empty_subset(table_i):
    with pytest.raises(InvalidSubsetError):
        average_energy(table_i, [])
    with pytest.raises(InvalidSubsetError):
        average_energy(table_i, [5])
    with pytest.raises(InvalidSubsetError):
        error_expression_1(table_i, [2, 2])


def test_err1_full(table_i):
    assert error_expression_1(table_i, None, SUBSET) == pytest.approx(1.0167e-4, rel=0.02)


def test_err1_pair_subset(table_i):
    assert error_expression_1(table_i, (1, 2), SUBSET) == pytest.approx(2.5897e-3, rel=0.02)


def test_err1_tail_full_reference(table_i):
    assert error_expression_1(table_i, (3, 4), FULL) == pytest.approx(2.9484e-7, rel=0.05)


@pytest.mark.parametrize("j", [1, 2, 3, 4])
def test_err1_single_region_is_zero(table_i, j):
    assert error_expression_1(table_i, (j,), SUBSET) < 1e-30


def test_err1_explicit_reference(table_i):
    e = table_i.region_energies
    p = table_i.weights
    by_hand = np.dot(p, (e + 0.03125) ** 2)
    assert error_expression_1(table_i, None, -0.03125) == pytest.approx(by_hand, rel=1e-12)


def test_squared_deviation(table_i):
    assert squared_deviation(table_i, (1,), -0.03125) == pytest.approx(1.1849e-2, rel=0.01)
    assert squared_deviation(table_i, (3, 4), -0.03125) == pytest.approx(1.9032e-10, rel=0.5)


def test_squared_deviation_exact_nodes(h_exact_composite):
    assert squared_deviation(h_exact_composite, None, -0.03125) < 1e-9


def test_err2_full(table_i):
    assert error_expression_2(table_i, HYDROGEN_GAUSSIANS) == pytest.approx(3.0694e-3, rel=0.05)


def test_err2_tail(table_i):
    assert error_expression_2(table_i, HYDROGEN_GAUSSIANS, (3, 4)) == pytest.approx(7.9837e-7, rel=0.10)


@pytest.mark.parametrize("fixture,gs", [("h_exact_composite", HYDROGEN_GAUSSIANS),
                                        ("ho_exact_composite", OSCILLATOR_GAUSSIANS)])
def test_err2_exact_nodes(fixture, gs, request):
    assert error_expression_2(request.getfixturevalue(fixture), gs) < 1e-8


def test_err2_rejects_non_positive_scaling(table_i):
    with pytest.raises(DisallowedScalingError):
        error_expression_2(table_i, [polynomial(-1.0, 0.1)])
    with pytest.raises(DisallowedScalingError):
        error_expression_2(table_i, [])


@settings(max_examples=25, deadline=None)
@given(st.floats(-10.0, 10.0))
def test_err1_shift_invariant(table_i, shift):
    shifted = dataclasses.replace(table_i, region_energies=table_i.region_energies + shift)
    for subset in (None, (1, 2), (3, 4)):
        a = error_expression_1(table_i, subset, SUBSET)
        b = error_expression_1(shifted, subset, SUBSET)
        assert b == pytest.approx(a, rel=1e-6, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=4, unique=True))
def test_subset_average_is_convex_combination(table_i, subset):
    e = table_i.region_energies[np.array(subset) - 1]
    avg = average_energy(table_i, subset)
    assert e.min() - 1e-15 <= avg <= e.max() + 1e-15
    assert error_expression_1(table_i, subset, SUBSET) >= 0.0


def test_exact_node_subsets_refined(h4s):
    # every subset of an exact-node partition averages to the exact energy
    fine = h4s.problem.refined(2)
    c = build_composite(fine, h4s.interior_nodes)
    for subset in ((1,), (2, 3), (1, 2, 3, 4)):
        assert average_energy(c, subset) == pytest.approx(-0.03125, abs=2e-6)


def test_error_report_and_csv(table_i):
    rep = error_report(table_i, (3, 4), FULL, HYDROGEN_GAUSSIANS)
    assert rep.regions == (3, 4)
    assert rep.reference_energy == pytest.approx(table_i.full_average())
    text = reports_to_csv([rep])
    assert text.splitlines()[0] == "subset,E_avg,reference,err1,err2"
    assert text.splitlines()[1].startswith('"3,4"') or text.splitlines()[1].startswith("3 4")
    assert per_region_csv(rep).splitlines()[0] == "region,a,b,E,p,sq_dev"


def test_local_energy_region_three(table_i):
    prof = local_energy_profile(table_i).in_region(3)
    assert prof.x.size > 100
    assert np.allclose(prof.total, -0.03261, atol=1e-3)


def test_local_energy_exact_state(h_exact_composite):
    prof = local_energy_profile(h_exact_composite)
    assert np.allclose(prof.total, -0.03125, atol=1e-3)


def test_local_energy_ho1_region_one(ho1):
    prof = local_energy_profile(ho1).in_region(1)
    assert np.allclose(prof.total, 8.6564, atol=1e-2)


def test_local_energy_matches_region_energy(table_i):
    prof = local_energy_profile(table_i)
    for j, e in enumerate(table_i.region_energies, 1):
        assert np.max(np.abs(prof.in_region(j).total - e)) < 1e-3


def test_kinetic_jump_table_i(table_i):
    assert kinetic_jump_at_node(table_i, 1) == pytest.approx(0.13010, abs=1e-3)


@pytest.mark.parametrize("node", [1, 2, 3])
def test_kinetic_jump_exact(h_exact_composite, node):
    assert abs(kinetic_jump_at_node(h_exact_composite, node)) < 1e-4


def test_kinetic_jump_ho1(ho1):
    assert kinetic_jump_at_node(ho1, 1) == pytest.approx(-4.8086, abs=1e-2)


def test_kinetic_jump_bad_index(table_i):
    with pytest.raises(ValueError):
        kinetic_jump_at_node(table_i, 4)


@pytest.mark.parametrize("fixture", ["table_i", "h_exact_composite", "ho1", "ho2"])
def test_sign_alternation(fixture, request):
    ok, report = sign_alternation_check(request.getfixturevalue(fixture))
    assert ok, report


def test_sign_alternation_detects_violation(table_i):
    scales = table_i.region_scales.copy()
    scales[2] = -scales[2]
    bad = dataclasses.replace(table_i, region_scales=scales)
    ok, report = sign_alternation_check(bad)
    assert not ok
    assert not report["alternates"]


def test_odd_parity_ho2(ho2):
    ok, report = sign_alternation_check(ho2)
    assert ok and report["odd_parity"]


def test_patch_requires_contiguous(hydrogen):
    a = region_ground_state(hydrogen, Interval(0.0, 2.0))
    b = region_ground_state(hydrogen, Interval(2.5, 6.0))
    with pytest.raises(ValueError):
        patch_regions([a, b])
