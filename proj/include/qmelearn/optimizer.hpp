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

// Levenberg-Marquardt for nonlinear least squares with the residual-norm
// damping rule nu_k = mu ||R(theta_k)||^2, which yields local quadratic
// convergence under a standard identifiability condition. Rejected steps are
// halved rather than re-damped, so the accepted-step theory stays intact.

#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace qmelearn {

struct LMOptions {
  int max_iterations = 100;
  double grad_tolerance = 1e-10;  // on ||J^T R||_inf
  double step_tolerance = 1e-12;  // on ||delta theta||
  double nu_scale = 1.0;          // nu = nu_scale * ||R||^2
  int max_backtracks = 20;
  double objective_scale = 1.0;   // phi = objective_scale * ||R||^2 / 2
};

struct LMIterate {
  int iteration = 0;
  Eigen::VectorXd theta;
  double phi = 0.0;
  double residual_norm = 0.0;
  double nu = 0.0;
  double step_norm = 0.0;
  bool accepted = false;
  int backtracks = 0;
  double rel_param_error = -1.0;  // ||theta - theta*|| / ||theta*||, -1 if unknown
};

enum class LMStop { gradient, step, max_iterations, stagnated };
std::string to_string(LMStop reason);

struct LMResult {
  Eigen::VectorXd theta;
  std::vector<LMIterate> history;
  LMStop stop = LMStop::max_iterations;
  bool stagnated = false;
  double final_phi = 0.0;
  double final_residual_norm = 0.0;
  int accepted_count = 0;
};

struct LeastSquaresCallbacks {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> residuals;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;
};

// Solves (nu I + J^T J) delta = -J^T r by a Cholesky-type factorization.
Eigen::VectorXd lm_step(const Eigen::VectorXd& r, const Eigen::MatrixXd& jac, double nu);

// Runs the damped iteration from theta0. A step is accepted iff phi strictly
// decreases; otherwise delta is halved up to opts.max_backtracks times, and
// exhausting the backtracks returns the best point with a stagnation flag.
// Stopping checks, in order: gradient, step size, iteration budget. When
// theta_star is given, history rows carry the relative parameter error.
LMResult lm_run(const Eigen::VectorXd& theta0, const LeastSquaresCallbacks& problem,
                const LMOptions& opts = {}, const Eigen::VectorXd* theta_star = nullptr);

// Convergence-order estimate from the accepted-iteration error sequence:
// least-squares fit of log e_(k+1) against log e_k over the final
// contracting window.
struct RateReport {
  bool has_order = false;
  double order = 0.0;
  double constant = 0.0;
  int pairs_used = 0;
  bool single_step = false;   // converged in too few steps to fit a rate
  bool plateaued = false;     // errors stopped contracting before converging
  double plateau_level = 0.0;
  std::string note;
};

RateReport rate_diagnostics(const std::vector<LMIterate>& history);

// CSV export: iter,phi,res_norm,nu,step_norm,accepted,rel_param_err
void write_history_csv(const std::vector<LMIterate>& history, const std::string& path);

}  // namespace qmelearn
