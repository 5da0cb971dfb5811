import numpy as np
import pytest

from nodalvar import (OSCILLATOR_GAUSSIANS, DisallowedScalingError, InvalidPartitionError,
                      NodeObjective, ObjectiveKind, OptOptions, evaluate_objective, optimize_nodes)

from conftest import TABLE_I_NODES

ERR1, ERR2 = ObjectiveKind.ERR1, ObjectiveKind.ERR2


@pytest.fixture(scope="module")
def h_err1(hydrogen):
    return NodeObjective(ERR1, hydrogen)


@pytest.fixture(scope="module")
def ho_err1(oscillator):
    return NodeObjective(ERR1, oscillator)


@pytest.fixture(scope="module")
def ho_err2(oscillator):
    return NodeObjective(ERR2, oscillator, OSCILLATOR_GAUSSIANS)


@pytest.fixture(scope="module")
def h_run(h_err1):
    return optimize_nodes(h_err1, TABLE_I_NODES)


def test_objective_table_i(h_err1):
    assert evaluate_objective(h_err1, TABLE_I_NODES) == pytest.approx(1.0167e-4, rel=0.02)


def test_objective_exact_nodes(h_err1, h4s):
    assert evaluate_objective(h_err1, h4s.interior_nodes) < 1e-8


def test_objective_ho2(ho_err1):
    assert evaluate_objective(ho_err1, (0.985, 2.420)) == pytest.approx(1.6451, rel=0.02)


@pytest.mark.parametrize("name", ["ho_err1", "ho_err2"])
def test_objective_zero_at_exact_oscillator_nodes(name, ho5, request):
    assert 0.0 <= evaluate_objective(request.getfixturevalue(name), ho5.interior_nodes) < 1e-8


def test_objective_non_negative(ho_err1, ho_err2):
    rng = np.random.default_rng(11)
    for _ in range(20):
        nodes = np.sort(rng.uniform(0.3, 4.0, 2))
        if nodes[1] - nodes[0] < 0.1:
            continue
        assert evaluate_objective(ho_err1, nodes) >= 0.0
        assert evaluate_objective(ho_err2, nodes) >= 0.0


def test_err2_needs_scaling(oscillator):
    with pytest.raises(DisallowedScalingError):
        NodeObjective(ERR2, oscillator)


def test_invalid_initial_nodes(ho_err1):
    with pytest.raises(InvalidPartitionError):
        optimize_nodes(ho_err1, (2.0, 1.0))


@pytest.mark.parametrize("kwargs", [{"max_iterations": 0}, {"simplex_scale": 0.0}, {"tolerance": -1.0}])
def test_options_validation(kwargs):
    with pytest.raises(ValueError):
        OptOptions(**kwargs)


def test_hydrogen_recovery(h_run):
    assert h_run.converged
    assert np.allclose(h_run.nodes, [1.8716, 6.6108, 15.5180], atol=5e-3)
    assert h_run.objective_value < 1e-8


def test_oscillator_err1_recovery(ho_err1):
    res = optimize_nodes(ho_err1, (0.759, 2.080))
    assert res.converged
    assert np.allclose(res.nodes, [0.9586, 2.0202], atol=5e-3)


def test_oscillator_err2_recovery(ho_err2):
    res = optimize_nodes(ho_err2, (0.985, 2.420))
    assert res.converged
    assert np.allclose(res.nodes, [0.9586, 2.0202], atol=1e-2)


def test_trace_monotone_and_consistent(h_run, h_err1):
    values = [v for _, v in h_run.trace]
    assert np.all(np.diff(values) <= 0)
    assert h_run.trace[0][0] == tuple(TABLE_I_NODES)
    assert h_run.objective_value == evaluate_objective(h_err1, h_run.nodes)


def test_trace_csv(h_run):
    lines = h_run.trace_csv().splitlines()
    assert lines[0] == "iter,node_1,node_2,node_3,objective"
    assert len(lines) == len(h_run.trace) + 1


def test_deterministic(ho_err1):
    a = optimize_nodes(ho_err1, (0.8, 2.1))
    b = optimize_nodes(ho_err1, (0.8, 2.1))
    assert a.trace == b.trace
    assert a.trace_csv() == b.trace_csv()


def test_max_iterations_exhausted(ho_err1):
    res = optimize_nodes(ho_err1, (0.759, 2.080), OptOptions(max_iterations=1))
    assert not res.converged
    assert res.iterations == 1
    assert len(res.trace) >= 1
    assert res.objective_value <= evaluate_objective(ho_err1, (0.759, 2.080))


@pytest.mark.parametrize("fixture,state", [("h_err1", "h4s"), ("ho_err1", "ho5")])
def test_basin_property(fixture, state, request):
    objective = request.getfixturevalue(fixture)
    exact = np.array(request.getfixturevalue(state).interior_nodes)
    rng = np.random.default_rng(2024)
    misses = []
    for _ in range(20):
        start = exact + rng.uniform(-0.2, 0.2, exact.size)
        res = optimize_nodes(objective, start)
        if not np.allclose(res.nodes, exact, atol=5e-3):
            misses.append((start, res.nodes))
    assert not misses
