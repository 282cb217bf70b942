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

#include "qmelearn/optimizer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qmelearn {

std::string to_string(LMStop reason) {
  switch (reason) {
    case LMStop::gradient: return "gradient";
    case LMStop::step: return "step";
    case LMStop::max_iterations: return "max_iterations";
    case LMStop::stagnated: return "stagnated";
  }
  return "unknown";
}

Eigen::VectorXd lm_step(const Eigen::VectorXd& r, const Eigen::MatrixXd& jac, double nu) {
  if (jac.rows() != r.size()) throw std::invalid_argument("lm_step: dimension mismatch");
  if (nu < 0.0) throw std::invalid_argument("lm_step: nu must be non-negative");
  const int np = static_cast<int>(jac.cols());
  Eigen::MatrixXd normal = jac.transpose() * jac;
  normal.diagonal().array() += nu;
  if (!normal.allFinite() || !r.allFinite()) {
    throw std::runtime_error("lm_step: non-finite system (NaN contamination)");
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw std::runtime_error("lm_step: normal system is not positive definite");
  }
  const Eigen::VectorXd g = jac.transpose() * r;
  Eigen::VectorXd delta = ldlt.solve(-g);
  if (!delta.allFinite()) throw std::runtime_error("lm_step: solve produced non-finite step");
  (void)np;
  return delta;
}

namespace {

double rel_error(const Eigen::VectorXd& theta, const Eigen::VectorXd* star) {
  if (star == nullptr || star->norm() == 0.0) return -1.0;
  return (theta - *star).norm() / star->norm();
}

// FD spot check of the Jacobian along one direction; a consistency guard for
// the callbacks, not a proof.
void check_callbacks(const Eigen::VectorXd& theta0, const LeastSquaresCallbacks& problem,
                     const Eigen::MatrixXd& jac0) {
  const int np = static_cast<int>(theta0.size());
  Eigen::VectorXd v = Eigen::VectorXd::Ones(np) / std::sqrt(static_cast<double>(np));
  const double h = 1e-5;
  const Eigen::VectorXd r_plus = problem.residuals(theta0 + h * v);
  const Eigen::VectorXd r_minus = problem.residuals(theta0 - h * v);
  const Eigen::VectorXd fd = (r_plus - r_minus) / (2.0 * h);
  const Eigen::VectorXd jv = jac0 * v;
  const double scale = std::max({jv.norm(), fd.norm(), 1e-8});
  if ((jv - fd).norm() > 1e-4 * scale) {
    throw std::invalid_argument("lm_run: jacobian callback disagrees with residuals (FD check)");
  }
}

}  // namespace

LMResult lm_run(const Eigen::VectorXd& theta0, const LeastSquaresCallbacks& problem,
                const LMOptions& opts, const Eigen::VectorXd* theta_star) {
  if (opts.grad_tolerance <= 0 || opts.step_tolerance <= 0 || opts.nu_scale <= 0) {
    throw std::invalid_argument("lm_run: tolerances and nu_scale must be positive");
  }
  LMResult result;
  Eigen::VectorXd theta = theta0;
  Eigen::VectorXd r = problem.residuals(theta);
  Eigen::MatrixXd jac = problem.jacobian(theta);
  check_callbacks(theta, problem, jac);

  const auto phi_of = [&](const Eigen::VectorXd& res) {
    return 0.5 * opts.objective_scale * res.squaredNorm();
  };
  double phi = phi_of(r);

  {
    LMIterate init;
    init.iteration = 0;
    init.theta = theta;
    init.phi = phi;
    init.residual_norm = r.norm();
    init.nu = opts.nu_scale * r.squaredNorm();
    init.accepted = true;
    init.rel_param_error = rel_error(theta, theta_star);
    result.history.push_back(init);
  }

  result.stop = LMStop::max_iterations;
  for (int k = 1; k <= opts.max_iterations; ++k) {
    const Eigen::VectorXd g = jac.transpose() * r;
    if (g.lpNorm<Eigen::Infinity>() <= opts.grad_tolerance) {
      result.stop = LMStop::gradient;
      break;
    }
    const double nu = opts.nu_scale * r.squaredNorm();
    const Eigen::VectorXd delta = lm_step(r, jac, nu);

    double scale = 1.0;
    int backtracks = 0;
    bool accepted = false;
    Eigen::VectorXd theta_try, r_try;
    double phi_try = 0.0;
    while (backtracks <= opts.max_backtracks) {
      theta_try = theta + scale * delta;
      r_try = problem.residuals(theta_try);
      phi_try = phi_of(r_try);
      if (phi_try < phi) {
        accepted = true;
        break;
      }
      scale *= 0.5;
      ++backtracks;
    }

    LMIterate it;
    it.iteration = k;
    it.nu = nu;
    it.backtracks = backtracks;
    it.step_norm = (scale * delta).norm();
    it.accepted = accepted;
    if (!accepted) {
      it.theta = theta;
      it.phi = phi;
      it.residual_norm = r.norm();
      it.rel_param_error = rel_error(theta, theta_star);
      result.history.push_back(it);
      result.stagnated = true;
      result.stop = LMStop::stagnated;
      break;
    }

    theta = theta_try;
    r = r_try;
    phi = phi_try;
    ++result.accepted_count;
    it.theta = theta;
    it.phi = phi;
    it.residual_norm = r.norm();
    it.rel_param_error = rel_error(theta, theta_star);
    result.history.push_back(it);

    if (it.step_norm <= opts.step_tolerance) {
      result.stop = LMStop::step;
      break;
    }
    jac = problem.jacobian(theta);
  }

  result.theta = theta;
  result.final_phi = phi;
  result.final_residual_norm = r.norm();
  return result;
}

RateReport rate_diagnostics(const std::vector<LMIterate>& history) {
  RateReport report;
  std::vector<double> errors;
  for (const auto& it : history) {
    if (it.accepted && it.rel_param_error >= 0.0) errors.push_back(it.rel_param_error);
  }
  if (errors.size() < 2) {
    report.note = "no error sequence (theta* unknown or no accepted steps)";
    return report;
  }

  // contracting pairs in the final descent, away from the roundoff floor
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    const double e0 = errors[i], e1 = errors[i + 1];
    if (e0 <= 0.5 && e1 < 0.7 * e0 && e1 > 1e-12) pairs.emplace_back(e0, e1);
  }
  if (pairs.size() < 3) {
    const double final_error = errors.back();
    // either the run collapsed in one or two steps, or it never contracted
    if (final_error < 1e-8) {
      report.single_step = true;
      report.note = "converged in fewer than 3 contracting steps";
    } else {
      report.plateaued = true;
      report.plateau_level = final_error;
      report.note = "no contracting window; error plateaued";
    }
    return report;
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [e0, e1] : pairs) {
    const double x = std::log(e0), y = std::log(e1);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(pairs.size());
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-12) {
    report.note = "degenerate fit window";
    return report;
  }
  report.order = (n * sxy - sx * sy) / denom;
  report.constant = std::exp((sy - report.order * sx) / n);
  report.pairs_used = static_cast<int>(pairs.size());
  report.has_order = true;
  return report;
}

void write_history_csv(const std::vector<LMIterate>& history, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "iter,phi,res_norm,nu,step_norm,accepted,rel_param_err\n";
  char buf[256];
  for (const auto& it : history) {
    std::snprintf(buf, sizeof(buf), "%d,%.15g,%.15g,%.15g,%.15g,%d,%.15g\n", it.iteration,
                  it.phi, it.residual_norm, it.nu, it.step_norm, it.accepted ? 1 : 0,
                  it.rel_param_error);
    out << buf;
  }
}

}  // namespace qmelearn
