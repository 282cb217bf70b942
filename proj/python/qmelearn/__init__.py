"""Completely positive Lindblad simulation and parameter learning."""

from qmelearn._core import (
    FitProblem,
    KrausMap,
    LindbladOperators,
    MeasurementDataset,
    ModelSpec,
    Observable,
    SimOptions,
    all_up_state,
    build_operators,
    embed_local,
    enumerate_one_step,
    evolve_expectations,
    expectation,
    experiment_config_json,
    experiment_ids,
    generate_data,
    initial_guess,
    kraus_first_order,
    kraus_second_order,
    mc_density,
    min_eigenvalue_hermitian,
    observable_basis,
    parameter_names,
    parameters_to_json,
    pauli,
    pauli_string,
    random_true_model,
    run_experiment,
)

__all__ = [
    "FitProblem",
    "KrausMap",
    "LindbladOperators",
    "MeasurementDataset",
    "ModelSpec",
    "Observable",
    "SimOptions",
    "all_up_state",
    "build_operators",
    "embed_local",
    "enumerate_one_step",
    "evolve_expectations",
    "expectation",
    "experiment_config_json",
    "experiment_ids",
    "generate_data",
    "initial_guess",
    "kraus_first_order",
    "kraus_second_order",
    "mc_density",
    "min_eigenvalue_hermitian",
    "observable_basis",
    "parameter_names",
    "parameters_to_json",
    "pauli",
    "pauli_string",
    "random_true_model",
    "run_experiment",
]

__version__ = "0.1.0"
