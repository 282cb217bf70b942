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

#include "qmelearn/learning.hpp"

#include <cmath>

namespace qmelearn {

namespace {

int checked_ratio(double num, double den, const char* what) {
  const double ratio = num / den;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 && std::abs(num) > 1e-12) {
    throw std::invalid_argument(std::string(what) + " must be a positive multiple of dt");
  }
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, std::abs(ratio))) {
    throw std::invalid_argument(std::string(what) + " is not an integer multiple of dt");
  }
  return static_cast<int>(rounded);
}

double real_inner(const Matrix& a, const Matrix& b) {
  // tr(a b) for Hermitian a, b
  return a.transpose().cwiseProduct(b).sum().real();
}

}  // namespace

FitProblem::FitProblem(ModelSpec spec, MeasurementDataset data, SimOptions sim)
    : spec_(spec), data_(std::move(data)), sim_(sim) {
  if (sim_.order != 1 && sim_.order != 2) throw std::invalid_argument("order must be 1 or 2");
  if (sim_.dt <= 0.0) throw std::invalid_argument("dt must be positive");
  if (data_.num_times < 1) throw std::invalid_argument("dataset has no measurement times");
  if (data_.values.rows() != data_.num_observables() ||
      data_.values.cols() != data_.num_times) {
    throw std::invalid_argument("dataset value table has wrong shape");
  }
  stride_ = checked_ratio(data_.delta_t, sim_.dt, "measurement interval");
  start_steps_ = data_.t_start == 0.0 ? 0 : checked_ratio(data_.t_start, sim_.dt, "start offset");
  total_steps_ = start_steps_ + stride_ * data_.num_times;
}

double FitProblem::objective_scale() const {
  return 1.0 / (static_cast<double>(data_.num_observables()) * data_.num_times);
}

FitProblem::Forward FitProblem::run_forward(const Eigen::VectorXd& theta,
                                            bool keep_states) const {
  const LindbladOperators ops = build_operators(spec_, theta);
  Forward fwd(sim_.order == 1 ? KrausMap::first_order(ops, sim_.dt)
                              : KrausMap::second_order(ops, sim_.dt, sim_.simplified));
  const int n_obs = data_.num_observables();
  fwd.expectations.resize(n_obs, data_.num_times);
  if (keep_states) fwd.states.reserve(total_steps_ + 1);

  Matrix rho = data_.rho0;
  if (keep_states) fwd.states.push_back(rho);
  for (int m = 1; m <= total_steps_; ++m) {
    rho = fwd.map.apply(rho);
    if (keep_states) fwd.states.push_back(rho);
    if (m > start_steps_ && (m - start_steps_) % stride_ == 0) {
      const int n = (m - start_steps_) / stride_;
      for (int k = 0; k < n_obs; ++k) {
        fwd.expectations(k, n - 1) = expectation(data_.observables[k], rho);
      }
    }
  }
  return fwd;
}

Eigen::VectorXd FitProblem::residuals_from(const Eigen::MatrixXd& expectations) const {
  Eigen::VectorXd r(num_residuals());
  for (int k = 0; k < data_.num_observables(); ++k) {
    for (int n = 1; n <= data_.num_times; ++n) {
      r(residual_index(k, n)) = expectations(k, n - 1) - data_.values(k, n - 1);
    }
  }
  return r;
}

Eigen::VectorXd FitProblem::residuals(const Eigen::VectorXd& theta) const {
  return residuals_from(run_forward(theta, false).expectations);
}

double FitProblem::objective(const Eigen::VectorXd& theta) const {
  return 0.5 * objective_scale() * residuals(theta).squaredNorm();
}

std::vector<KrausDerivative> FitProblem::parameter_derivatives(const Eigen::VectorXd& theta,
                                                               const KrausMap& map) const {
  std::vector<KrausDerivative> derivs;
  derivs.reserve(num_parameters());
  for (int a = 0; a < num_parameters(); ++a) {
    derivs.emplace_back(map, operator_derivative(spec_, theta, a));
  }
  return derivs;
}

Eigen::VectorXd FitProblem::gradient(const Eigen::VectorXd& theta) const {
  const Forward fwd = run_forward(theta, true);
  const Eigen::VectorXd r = residuals_from(fwd.expectations);
  const auto derivs = parameter_derivatives(theta, fwd.map);
  const int np = num_parameters();
  const int d = fwd.map.dim();

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(np);
  Matrix lambda = Matrix::Zero(d, d);
  bool adjoint_checked = false;
  for (int m = total_steps_ - 1; m >= 0; --m) {
    // measurement at step m+1 injects its weighted observables into Lambda
    const int offset = m + 1 - start_steps_;
    if (offset > 0 && offset % stride_ == 0) {
      const int n = offset / stride_;
      for (int k = 0; k < data_.num_observables(); ++k) {
        lambda += r(residual_index(k, n)) * data_.observables[k].op;
      }
    }
    const KrausStepCache cache = fwd.map.step_cache(fwd.states[m]);
    for (int a = 0; a < np; ++a) {
      const Matrix dk = derivs[a].apply(fwd.states[m], &fwd.states[m + 1], &cache);
      grad(a) += real_inner(lambda, dk);
    }
    if (m > 0) {
      const Matrix propagated = fwd.map.apply_adjoint(lambda);
      if (!adjoint_checked && lambda.norm() > 0.0) {
        // adjoint identity <K* A, rho> = <A, K rho> spot check
        const double lhs = real_inner(propagated, fwd.states[m - 1]);
        const double rhs = real_inner(lambda, fwd.states[m]);
        const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
        if (std::abs(lhs - rhs) > 1e-10 * scale) {
          throw std::runtime_error("adjoint identity violated in gradient back-propagation");
        }
        adjoint_checked = true;
      }
      lambda = propagated;
    }
  }
  return objective_scale() * grad;
}

Eigen::MatrixXd FitProblem::jacobian(const Eigen::VectorXd& theta) const {
  const Forward fwd = run_forward(theta, true);
  const auto derivs = parameter_derivatives(theta, fwd.map);
  const int np = num_parameters();
  const int d = fwd.map.dim();
  const int n_obs = data_.num_observables();

  Eigen::MatrixXd jac(num_residuals(), np);
  std::vector<Matrix> chi(np, Matrix::Zero(d, d));
  for (int m = 0; m < total_steps_; ++m) {
    const KrausStepCache cache = fwd.map.step_cache(fwd.states[m]);
    const bool first_step = m == 0;  // chi is still zero, skip the map apply
    for (int a = 0; a < np; ++a) {
      Matrix next = derivs[a].apply(fwd.states[m], &fwd.states[m + 1], &cache);
      if (!first_step) next += fwd.map.apply(chi[a]);
      chi[a] = std::move(next);
    }
    const int offset = m + 1 - start_steps_;
    if (offset > 0 && offset % stride_ == 0) {
      const int n = offset / stride_;
      for (int a = 0; a < np; ++a) {
        for (int k = 0; k < n_obs; ++k) {
          jac(residual_index(k, n), a) = real_inner(data_.observables[k].op, chi[a]);
        }
      }
    }
  }
  return jac;
}

Eigen::MatrixXd FitProblem::jacobian_backward(const Eigen::VectorXd& theta) const {
  const Forward fwd = run_forward(theta, true);
  const auto derivs = parameter_derivatives(theta, fwd.map);
  const int np = num_parameters();
  const int n_obs = data_.num_observables();

  // back-propagated observable sequences (K*)^i A_k, i = 0 .. M-1
  std::vector<std::vector<Matrix>> back(n_obs);
  for (int k = 0; k < n_obs; ++k) {
    back[k].reserve(total_steps_);
    back[k].push_back(data_.observables[k].op);
    for (int i = 1; i < total_steps_; ++i) back[k].push_back(fwd.map.apply_adjoint(back[k][i - 1]));
  }

  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(num_residuals(), np);
  for (int m = 0; m < total_steps_; ++m) {
    const KrausStepCache cache = fwd.map.step_cache(fwd.states[m]);
    for (int a = 0; a < np; ++a) {
      const Matrix dk = derivs[a].apply(fwd.states[m], &fwd.states[m + 1], &cache);
      for (int n = 1; n <= data_.num_times; ++n) {
        const int mn = start_steps_ + n * stride_;
        if (mn <= m) continue;
        for (int k = 0; k < n_obs; ++k) {
          jac(residual_index(k, n), a) += real_inner(back[k][mn - 1 - m], dk);
        }
      }
    }
  }
  return jac;
}

}  // namespace qmelearn
