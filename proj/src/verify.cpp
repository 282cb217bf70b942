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

// The verification suite: fast self-checks of the integrators, the SSE
// unraveling, the analytic derivatives, and the Monte Carlo estimator,
// each reported as a value inside an expected window.

#include "qmelearn/harness.hpp"
#include "qmelearn/rng.hpp"
#include "qmelearn/sse.hpp"

#include <cmath>
#include <random>

namespace qmelearn {

namespace {

VerifyCheck window_check(const std::string& name, double value, double lo, double hi,
                         const std::string& detail = "") {
  VerifyCheck check;
  check.name = name;
  check.value = value;
  check.lo = lo;
  check.hi = hi;
  check.pass = std::isfinite(value) && value >= lo && value <= hi;
  check.detail = detail;
  return check;
}

Matrix random_matrix(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> unit(0.0, 1.0);
  Matrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = Complex(unit(rng), unit(rng));
  return m;
}

Vector random_state(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> unit(0.0, 1.0);
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = Complex(unit(rng), unit(rng));
  return v / v.norm();
}

LindbladOperators random_dense_model(int num_qubits, std::mt19937_64& rng) {
  const int d = qubit_dimension(num_qubits);
  const Matrix h = hermitized(random_matrix(d, rng));
  std::vector<Matrix> v;
  v.push_back(0.5 * random_matrix(d, rng));
  v.push_back(0.5 * random_matrix(d, rng));
  return LindbladOperators::from_parts(h, v);
}

// max-abs expectation error against a fine-step second-order reference
double expectation_error(const ModelSpec& spec, const Eigen::VectorXd& theta, int order,
                         double dt, double delta_t, int num_times,
                         const Eigen::MatrixXd& reference) {
  const LindbladOperators ops = build_operators(spec, theta);
  const KrausMap map = order == 1 ? KrausMap::first_order(ops, dt)
                                  : KrausMap::second_order(ops, dt);
  const auto obs = observable_basis(ObservableSet::one_local, spec.num_qubits);
  const int stride = static_cast<int>(std::lround(delta_t / dt));
  const Eigen::MatrixXd y =
      evolve_expectations(map, all_up_state(spec.num_qubits), obs, num_times, stride);
  return (y - reference).cwiseAbs().maxCoeff();
}

void check_orders(std::vector<VerifyCheck>& checks) {
  ModelSpec spec;
  spec.family = ModelFamily::linear_dissipator;
  spec.num_qubits = 2;
  const Eigen::VectorXd theta = random_true_model(42, spec);
  const double delta_t = 0.2;
  const int num_times = 5;

  const LindbladOperators ops = build_operators(spec, theta);
  const KrausMap ref_map = KrausMap::second_order(ops, 1e-4);
  const auto obs = observable_basis(ObservableSet::one_local, 2);
  const Eigen::MatrixXd reference =
      evolve_expectations(ref_map, all_up_state(2), obs, num_times, 2000);

  const double dts[3] = {4e-2, 2e-2, 1e-2};
  for (int order : {1, 2}) {
    double err[3];
    for (int i = 0; i < 3; ++i) {
      err[i] = expectation_error(spec, theta, order, dts[i], delta_t, num_times, reference);
    }
    const double lo = order == 1 ? 1.7 : 3.2;
    const double hi = order == 1 ? 2.4 : 4.8;
    for (int i = 0; i < 2; ++i) {
      checks.push_back(window_check(
          "order" + std::to_string(order) + "_error_ratio_" + std::to_string(i + 1),
          err[i] / err[i + 1], lo, hi,
          "err(" + std::to_string(dts[i]) + ")=" + std::to_string(err[i])));
    }
  }
}

void check_tpcp(std::vector<VerifyCheck>& checks) {
  auto rng = seeded_engine(7);
  for (int n = 1; n <= 3; ++n) {
    const LindbladOperators ops = random_dense_model(n, rng);
    const double dt = 0.02;
    for (int order : {1, 2}) {
      const auto make = [&](double step) {
        return order == 1 ? KrausMap::first_order(ops, step)
                          : KrausMap::second_order(ops, step);
      };
      const double ratio = make(dt).tp_defect() / make(0.5 * dt).tp_defect();
      const double target = order == 1 ? 4.0 : 8.0;
      checks.push_back(window_check(
          "tp_defect_ratio_order" + std::to_string(order) + "_n" + std::to_string(n), ratio,
          0.7 * target, 1.3 * target));
    }
  }

  // complete positivity over a long run of the spin-chain model
  ModelSpec spec;
  spec.family = ModelFamily::linear_dissipator;
  spec.num_qubits = 2;
  const Eigen::VectorXd theta = random_true_model(5, spec);
  const LindbladOperators ops = build_operators(spec, theta);
  for (int order : {1, 2}) {
    const KrausMap map = order == 1 ? KrausMap::first_order(ops, 0.01)
                                    : KrausMap::second_order(ops, 0.01);
    Matrix rho = all_up_state(2);
    double min_eig = 0.0;
    for (int m = 0; m < 1000; ++m) {
      rho = map.apply(rho);
      if (m % 100 == 99) min_eig = std::min(min_eig, min_eigenvalue_hermitian(rho));
    }
    checks.push_back(window_check("cp_min_eigenvalue_order" + std::to_string(order), min_eig,
                                  -1e-10, 1.0));
  }

  // resolvent stability: spectral radius of F0 stays at or below one even for
  // very stiff Hamiltonians
  auto rng2 = seeded_engine(8);
  const int d = 4;
  const Matrix h = 1e3 * hermitized(random_matrix(d, rng2));
  std::vector<Matrix> v = {0.5 * random_matrix(d, rng2)};
  const LindbladOperators stiff = LindbladOperators::from_parts(h, v);
  const double sr = KrausMap::first_order(stiff, 0.05).spectral_radius_f0();
  checks.push_back(window_check("spectral_radius_f0_stiff", sr, 0.0, 1.0 + 1e-12));
}

void check_sse(std::vector<VerifyCheck>& checks) {
  auto rng = seeded_engine(21);
  struct Case {
    ModelFamily family;
    int n;
    const char* tag;
  };
  const Case cases[] = {{ModelFamily::pauli_jump, 1, "pauli_n1"},
                        {ModelFamily::pauli_jump, 2, "pauli_n2"},
                        {ModelFamily::linear_dissipator, 1, "linear_n1"}};
  for (const auto& c : cases) {
    ModelSpec spec;
    spec.family = c.family;
    spec.num_qubits = c.n;
    const Eigen::VectorXd theta = random_true_model(100 + c.n, spec);
    const LindbladOperators ops = build_operators(spec, theta);
    const double dt = 0.05;
    const Vector psi0 = random_state(ops.dim(), rng);
    const Matrix rho0 = psi0 * psi0.adjoint();

    const Matrix enum2 = enumerate_one_step(psi0, ops, dt, 2);
    const Matrix kraus2 = KrausMap::second_order(ops, dt, false).apply(rho0);
    checks.push_back(window_check(std::string("sse_enum_order2_") + c.tag,
                                  (enum2 - kraus2).norm(), 0.0, 1e-12));

    const Matrix enum1 = enumerate_one_step(psi0, ops, dt, 1);
    const Matrix kraus1 = KrausMap::first_order(ops, dt).apply(rho0);
    checks.push_back(window_check(std::string("sse_enum_order1_") + c.tag,
                                  (enum1 - kraus1).norm(), 0.0, 1e-12));
  }

  // adjoint identity <K* A, rho> = <A, K rho> on a random dense model
  const LindbladOperators ops = random_dense_model(2, rng);
  const KrausMap map = KrausMap::second_order(ops, 0.03);
  const Matrix a = hermitized(random_matrix(4, rng));
  Matrix rho = hermitized(random_matrix(4, rng));
  rho = rho * rho.adjoint();
  rho /= rho.trace().real();
  const double lhs = expectation(map.apply_adjoint(a), rho);
  const double rhs = expectation(a, map.apply(rho));
  checks.push_back(window_check("adjoint_identity", std::abs(lhs - rhs), 0.0, 1e-12));
}

void check_gradient(std::vector<VerifyCheck>& checks) {
  for (const ModelFamily family : {ModelFamily::linear_dissipator, ModelFamily::pauli_jump}) {
    ModelSpec spec;
    spec.family = family;
    spec.num_qubits = 2;
    const Eigen::VectorXd theta_star = random_true_model(3, spec);

    ExperimentConfig config;
    config.model = spec;
    config.num_times = 3;
    config.delta_t = 0.1;
    config.data_dt = 0.05;
    config.sim.dt = 0.05;
    const MeasurementDataset data = generate_data(config, theta_star);
    const FitProblem problem(spec, data, config.sim);

    const Eigen::VectorXd theta = initial_guess(theta_star, 0.2, 17);
    const Eigen::VectorXd grad = problem.gradient(theta);
    const double h = 1e-5;
    Eigen::VectorXd fd(grad.size());
    for (int a = 0; a < grad.size(); ++a) {
      Eigen::VectorXd tp = theta, tm = theta;
      tp(a) += h;
      tm(a) -= h;
      fd(a) = (problem.objective(tp) - problem.objective(tm)) / (2.0 * h);
    }
    const std::string tag = family == ModelFamily::linear_dissipator ? "linear" : "pauli";
    checks.push_back(window_check("gradient_fd_rel_" + tag,
                                  (grad - fd).norm() / fd.norm(), 0.0, 1e-6));

    const Eigen::MatrixXd jac = problem.jacobian(theta);
    const Eigen::VectorXd r = problem.residuals(theta);
    const Eigen::VectorXd via_jac = problem.objective_scale() * (jac.transpose() * r);
    checks.push_back(window_check("gradient_vs_jacobian_" + tag, (grad - via_jac).norm(),
                                  0.0, 1e-10));

    const Eigen::MatrixXd jac_back = problem.jacobian_backward(theta);
    checks.push_back(window_check("jacobian_forward_vs_backward_" + tag,
                                  (jac - jac_back).norm(), 0.0, 1e-12 * (1.0 + jac.norm())));
  }
}

void check_ehrenfest(std::vector<VerifyCheck>& checks) {
  ModelSpec spec;
  spec.family = ModelFamily::linear_dissipator;
  spec.num_qubits = 2;
  const Eigen::VectorXd theta = random_true_model(42, spec);
  const LindbladOperators ops = build_operators(spec, theta);
  const Matrix a = pauli_string({1}, {kAxisY}, 2).op;
  const auto residual_at = [&](double dt) {
    const KrausMap map = KrausMap::second_order(ops, dt);
    const int steps = static_cast<int>(std::lround(0.5 / dt));
    const Trajectory traj = evolve_trajectory(map, all_up_state(2), steps);
    return ehrenfest_residual(ops, traj, a);
  };
  const double r1 = residual_at(2e-3);
  const double r2 = residual_at(1e-3);
  checks.push_back(window_check("ehrenfest_residual_ratio", r1 / r2, 2.8, 5.2,
                                "residual(2e-3)=" + std::to_string(r1)));
}

void check_mc_scaling(std::vector<VerifyCheck>& checks) {
  // single-qubit dephasing; the reference is the same scheme's exact
  // expectation, so the remaining error is purely statistical
  ModelSpec spec;
  spec.family = ModelFamily::pauli_jump;
  spec.num_qubits = 1;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(spec.size());
  theta(spec.hamiltonian_size() + 2) = std::sqrt(0.5);  // V = sqrt(1/2) sigma^z
  const LindbladOperators ops = build_operators(spec, theta);

  const double dt = 0.01;
  const int steps = 50;
  Vector psi0(2);
  psi0 << 1.0, 1.0;
  psi0 /= psi0.norm();
  const KrausMap map = KrausMap::second_order(ops, dt);
  Matrix rho_scheme = psi0 * psi0.adjoint();
  for (int m = 0; m < steps; ++m) rho_scheme = map.apply(rho_scheme);

  const long sizes[3] = {100, 1000, 10000};
  const int reps = 10;
  double logn[3], logerr[3];
  for (int i = 0; i < 3; ++i) {
    double mean_err = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
      const auto result = mc_density(psi0, ops, dt, steps, sizes[i], 2,
                                     900 + 100 * rep + i);
      mean_err += (result.rho - rho_scheme).norm();
    }
    mean_err /= reps;
    logn[i] = std::log10(static_cast<double>(sizes[i]));
    logerr[i] = std::log10(mean_err);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < 3; ++i) {
    sx += logn[i];
    sy += logerr[i];
    sxx += logn[i] * logn[i];
    sxy += logn[i] * logerr[i];
  }
  const double slope = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
  checks.push_back(window_check("mc_error_slope", slope, -0.65, -0.35));
}

}  // namespace

std::vector<VerifyCheck> verify_suite(const VerifyOptions& opts) {
  std::vector<VerifyCheck> checks;
  if (opts.orders) check_orders(checks);
  if (opts.tpcp) check_tpcp(checks);
  if (opts.sse) check_sse(checks);
  if (opts.gradient) check_gradient(checks);
  if (opts.ehrenfest) check_ehrenfest(checks);
  if (opts.mc_scaling) check_mc_scaling(checks);
  return checks;
}

}  // namespace qmelearn
