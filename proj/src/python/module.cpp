// Copyright 2026 The qmelearn authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qmelearn/harness.hpp"
#include "qmelearn/sse.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace pybind11::literals;
using namespace qmelearn;

namespace {

ModelSpec make_spec(const std::string& family, int num_qubits, const std::string& mode) {
  ModelSpec spec;
  spec.family = family_from_string(family);
  spec.num_qubits = num_qubits;
  spec.mode = mode_from_string(mode);
  return spec;
}

std::vector<int> axes_from_string(const std::string& axes) {
  std::vector<int> out;
  out.reserve(axes.size());
  for (char c : axes) out.push_back(axis_from_name(c));
  return out;
}

py::dict run_experiment_py(const std::string& config_json, const std::string& out_dir) {
  const ExperimentConfig config = config_from_json(config_json);
  const RunArtifacts artifacts = run_experiment(config, out_dir);
  py::dict result;
  result["theta_true"] = artifacts.theta_true;
  result["theta_init"] = artifacts.theta_init;
  result["theta_hat"] = artifacts.theta_hat;
  result["initial_error"] = artifacts.initial_error;
  result["final_rel_error"] = artifacts.final_rel_error;
  result["final_phi"] = artifacts.lm.final_phi;
  result["accepted_iterations"] = artifacts.lm.accepted_count;
  result["stop_reason"] = to_string(artifacts.lm.stop);
  result["stagnated"] = artifacts.lm.stagnated;
  py::list phi, rel_err;
  for (const auto& it : artifacts.lm.history) {
    phi.append(it.phi);
    rel_err.append(it.rel_param_error);
  }
  result["phi_history"] = phi;
  result["rel_error_history"] = rel_err;
  return result;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Completely positive Lindblad simulation and parameter learning";

  // ---- operators ----
  m.def("pauli", [](const std::string& axis) -> Matrix2 {
    if (axis.size() != 1) throw std::invalid_argument("axis must be one of x, y, z");
    return pauli(axis_from_name(axis[0]));
  }, "axis"_a);
  m.def("embed_local", &embed_local, "op"_a, "site"_a, "num_qubits"_a);
  m.def("pauli_string",
        [](const std::vector<int>& sites, const std::string& axes, int num_qubits) {
          return pauli_string(sites, axes_from_string(axes), num_qubits);
        },
        "sites"_a, "axes"_a, "num_qubits"_a);
  m.def("observable_basis", [](const std::string& kind, int num_qubits) {
    return observable_basis(observable_set_from_string(kind), num_qubits);
  }, "kind"_a, "num_qubits"_a);
  m.def("expectation",
        [](const Matrix& a, const Matrix& rho) { return expectation(a, rho); },
        "observable"_a, "rho"_a);
  m.def("min_eigenvalue_hermitian", &min_eigenvalue_hermitian, "m"_a);

  py::class_<Observable>(m, "Observable")
      .def_readonly("op", &Observable::op)
      .def_readonly("label", &Observable::label)
      .def("__repr__", [](const Observable& o) { return "<Observable " + o.label + ">"; });

  // ---- model ----
  py::class_<ModelSpec>(m, "ModelSpec")
      .def(py::init(&make_spec), "family"_a, "num_qubits"_a, "mode"_a = "amplitude")
      .def_property_readonly("family",
                             [](const ModelSpec& s) { return to_string(s.family); })
      .def_readonly("num_qubits", &ModelSpec::num_qubits)
      .def_property_readonly("mode", [](const ModelSpec& s) { return to_string(s.mode); })
      .def_property_readonly("size", &ModelSpec::size)
      .def_property_readonly("num_jumps", &ModelSpec::num_jumps);

  py::class_<LindbladOperators>(m, "LindbladOperators")
      .def_readonly("hamiltonian", &LindbladOperators::H)
      .def_readonly("jumps", &LindbladOperators::V)
      .def_readonly("generator", &LindbladOperators::G);

  m.def("parameter_names",
        [](const ModelSpec& spec) { return ParameterLayout::create(spec).names; },
        "spec"_a);
  m.def("random_true_model", &random_true_model, "seed"_a, "spec"_a);
  m.def("build_operators", &build_operators, "spec"_a, "theta"_a);
  m.def("parameters_to_json", &parameters_to_json, "spec"_a, "theta"_a);

  // ---- propagation ----
  py::class_<KrausMap>(m, "KrausMap")
      .def_property_readonly("order", &KrausMap::order)
      .def_property_readonly("dt", &KrausMap::dt)
      .def_property_readonly("dim", &KrausMap::dim)
      .def("apply", &KrausMap::apply, "rho"_a)
      .def("apply_adjoint", &KrausMap::apply_adjoint, "observable"_a)
      .def("kraus_operators", &KrausMap::kraus_operators)
      .def("tp_defect", &KrausMap::tp_defect)
      .def("spectral_radius_f0", &KrausMap::spectral_radius_f0);

  m.def("kraus_first_order", &KrausMap::first_order, "ops"_a, "dt"_a);
  m.def("kraus_second_order", &KrausMap::second_order, "ops"_a, "dt"_a,
        "simplified"_a = false);
  m.def("evolve_expectations", &evolve_expectations, "map"_a, "rho0"_a, "observables"_a,
        "num_times"_a, "stride"_a, "start_steps"_a = 0, "renormalize"_a = false);
  m.def("all_up_state", &all_up_state, "num_qubits"_a);

  // ---- stochastic unraveling ----
  m.def("mc_density",
        [](const Vector& psi0, const LindbladOperators& ops, double dt, int steps,
           long num_trajectories, int order, std::uint64_t seed) {
          const auto result = mc_density(psi0, ops, dt, steps, num_trajectories, order, seed);
          return py::make_tuple(result.rho, result.standard_error);
        },
        "psi0"_a, "ops"_a, "dt"_a, "steps"_a, "num_trajectories"_a, "order"_a = 2,
        "seed"_a = 0);
  m.def("enumerate_one_step", &enumerate_one_step, "psi0"_a, "ops"_a, "dt"_a, "order"_a = 2);

  // ---- learning ----
  py::class_<SimOptions>(m, "SimOptions")
      .def(py::init([](int order, double dt, bool simplified) {
             SimOptions sim;
             sim.order = order;
             sim.dt = dt;
             sim.simplified = simplified;
             return sim;
           }),
           "order"_a = 2, "dt"_a = 0.01, "simplified"_a = false)
      .def_readwrite("order", &SimOptions::order)
      .def_readwrite("dt", &SimOptions::dt)
      .def_readwrite("simplified", &SimOptions::simplified);

  py::class_<MeasurementDataset>(m, "MeasurementDataset")
      .def(py::init([](std::vector<Observable> observables, double delta_t, int num_times,
                       double t_start, Eigen::MatrixXd values, Matrix rho0) {
             MeasurementDataset data;
             data.observables = std::move(observables);
             data.delta_t = delta_t;
             data.num_times = num_times;
             data.t_start = t_start;
             data.values = std::move(values);
             data.rho0 = std::move(rho0);
             return data;
           }),
           "observables"_a, "delta_t"_a, "num_times"_a, "t_start"_a, "values"_a, "rho0"_a)
      .def_readonly("values", &MeasurementDataset::values)
      .def_readonly("delta_t", &MeasurementDataset::delta_t)
      .def_readonly("num_times", &MeasurementDataset::num_times);

  py::class_<FitProblem>(m, "FitProblem")
      .def(py::init<ModelSpec, MeasurementDataset, SimOptions>(), "spec"_a, "dataset"_a,
           "sim"_a)
      .def("residuals", &FitProblem::residuals, "theta"_a)
      .def("objective", &FitProblem::objective, "theta"_a)
      .def("gradient", &FitProblem::gradient, "theta"_a)
      .def("jacobian", &FitProblem::jacobian, "theta"_a)
      .def_property_readonly("num_parameters", &FitProblem::num_parameters)
      .def_property_readonly("num_residuals", &FitProblem::num_residuals);

  // ---- harness ----
  m.def("generate_data",
        [](const std::string& config_json, const Eigen::VectorXd& theta_true) {
          const ExperimentConfig config = config_from_json(config_json);
          const MeasurementDataset data = generate_data(config, theta_true);
          py::list labels;
          for (const auto& obs : data.observables) labels.append(obs.label);
          return py::make_tuple(data.values, labels);
        },
        "config_json"_a, "theta_true"_a);
  m.def("initial_guess", &initial_guess, "theta_true"_a, "norm"_a, "seed"_a);
  m.def("run_experiment", &run_experiment_py, "config_json"_a, "out_dir"_a = "");
  m.def("experiment_ids", &experiment_ids);
  m.def("experiment_config_json",
        [](const std::string& id) { return config_to_json(experiment_config(id)); }, "id"_a);
}
