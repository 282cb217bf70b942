"""Smoke tests of the python bindings."""

import json

import numpy as np
import pytest

import qmelearn as qm


def test_pauli_algebra():
    x = qm.pauli("x")
    y = qm.pauli("y")
    z = qm.pauli("z")
    assert np.allclose(x @ x, np.eye(2))
    assert np.allclose(x @ y - y @ x, 2j * z)

    obs = qm.pauli_string([1], "y", 6)
    assert obs.label == "y2"
    assert obs.op.shape == (64, 64)


def test_observable_basis_counts():
    assert len(qm.observable_basis("one_local", 6)) == 19
    assert len(qm.observable_basis("two_local", 6)) == 154
    assert len(qm.observable_basis("xy_one_local", 6)) == 12


def test_model_and_kraus_map():
    spec = qm.ModelSpec("linear_dissipator", 2)
    assert spec.size == 17
    names = qm.parameter_names(spec)
    assert len(names) == 17 and names[-1] == "s_2"

    theta = qm.random_true_model(5, spec)
    ops = qm.build_operators(spec, theta)
    assert np.allclose(ops.hamiltonian, ops.hamiltonian.conj().T)

    kmap = qm.kraus_second_order(ops, 0.01)
    assert kmap.tp_defect() < 1e-4
    rho = qm.all_up_state(2)
    evolved = kmap.apply(rho)
    assert abs(np.trace(evolved) - 1.0) < 1e-6
    assert qm.min_eigenvalue_hermitian(evolved) >= -1e-10

    y = qm.evolve_expectations(kmap, rho, qm.observable_basis("one_local", 2), 5, 10)
    assert y.shape == (7, 5)
    assert np.all(np.abs(y) <= 1 + 1e-8)


def test_sse_enumeration_matches_kraus():
    spec = qm.ModelSpec("pauli_jump", 1)
    theta = qm.random_true_model(9, spec)
    ops = qm.build_operators(spec, theta)
    psi0 = np.array([1.0, 1.0j]) / np.sqrt(2.0)
    enum = qm.enumerate_one_step(psi0, ops, 0.05, order=2)
    kraus = qm.kraus_second_order(ops, 0.05).apply(np.outer(psi0, psi0.conj()))
    assert np.max(np.abs(enum - kraus)) < 1e-12

    rho, se = qm.mc_density(psi0, ops, 0.01, steps=10, num_trajectories=64, seed=3)
    assert rho.shape == (2, 2)
    assert np.all(se >= 0)


def test_fit_problem_gradient():
    config = json.dumps(
        {
            "schema_version": 1,
            "model": {"family": "pauli_jump", "num_qubits": 1},
            "data": {"dt": 0.05, "delta_t": 0.1, "num_times": 3},
            "fit": {"dt": 0.05},
        }
    )
    spec = qm.ModelSpec("pauli_jump", 1)
    theta_star = qm.random_true_model(4, spec)
    values, labels = qm.generate_data(config, theta_star)
    assert values.shape == (4, 3)
    assert labels[0] == "I"

    dataset = qm.MeasurementDataset(
        qm.observable_basis("one_local", 1), 0.1, 3, 0.0, values, qm.all_up_state(1)
    )
    problem = qm.FitProblem(spec, dataset, qm.SimOptions(order=2, dt=0.05))
    assert problem.residuals(theta_star).max() < 1e-12

    theta = qm.initial_guess(theta_star, 0.2, 11)
    grad = problem.gradient(theta)
    jac = problem.jacobian(theta)
    r = problem.residuals(theta)
    scale = 1.0 / (4 * 3)
    assert np.allclose(grad, scale * (jac.T @ r), atol=1e-10)


def test_end_to_end_learning():
    config = json.loads(qm.experiment_config_json("fig2-1local"))
    config["model"]["num_qubits"] = 1
    config["init"]["perturbation"] = 0.2
    result = qm.run_experiment(json.dumps(config))
    assert result["final_rel_error"] < 1e-7
    assert result["phi_history"][-1] <= result["phi_history"][0]
