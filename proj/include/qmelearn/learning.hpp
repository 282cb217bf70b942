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

// Residuals, objective, gradient and Jacobian of the trajectory-fitting
// problem: simulated expectations tr(A_k rho_(nL)) against measured values,
// differentiated through the Kraus propagator. The gradient back-propagates
// observables through the adjoint map; the Jacobian propagates per-parameter
// state sensitivities forward. Both routes are exact derivatives of the
// discrete map, so they agree with finite differences of the objective up to
// truncation error.

#pragma once

#include "qmelearn/kraus.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qmelearn {

struct SimOptions {
  int order = 2;
  double dt = 0.01;
  bool simplified = false;
};

struct MeasurementDataset {
  std::vector<Observable> observables;
  double delta_t = 0.1;   // measurement interval
  int num_times = 0;      // N_T; measurement times are t_start + n delta_t, n = 1..N_T
  double t_start = 0.0;
  Eigen::MatrixXd values;  // N_O x N_T
  long shots = 0;          // 0 = exact expectations
  std::string noise_model = "bernoulli";
  std::uint64_t seed = 0;
  Matrix rho0;

  int num_observables() const { return static_cast<int>(observables.size()); }
  double time_at(int n) const { return t_start + n * delta_t; }  // n = 1..N_T
};

class FitProblem {
 public:
  FitProblem(ModelSpec spec, MeasurementDataset data, SimOptions sim);

  int num_parameters() const { return spec_.size(); }
  int num_residuals() const { return data_.num_observables() * data_.num_times; }
  int total_steps() const { return total_steps_; }
  const MeasurementDataset& dataset() const { return data_; }
  const ModelSpec& spec() const { return spec_; }
  const SimOptions& sim() const { return sim_; }
  double objective_scale() const;  // 1 / (N_O N_T)

  // residual r_(k,n) = tr(A_k rho_(m_n)) - y*_(k,n), ordered k-major
  Eigen::VectorXd residuals(const Eigen::VectorXd& theta) const;

  // phi = ||R||^2 / (2 N_O N_T)
  double objective(const Eigen::VectorXd& theta) const;

  // grad phi via one backward pass of the adjoint map: the weighted
  // observable Lambda_m = K* Lambda_(m+1) + sum_k r_(k,n) A_k [m = m_n]
  // accumulates <Lambda_(m+1), (d_a K) rho_m> per parameter.
  Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const;

  // d r_(k,n) / d theta_a via the forward sensitivity recursion
  // chi_(m+1) = K chi_m + (d_a K) rho_m  (cost independent of N_O)
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& theta) const;

  // same entries from stored adjoint sequences (K*)^i A_k; quadratic in the
  // step count, intended for small cross-validation instances
  Eigen::MatrixXd jacobian_backward(const Eigen::VectorXd& theta) const;

  int residual_index(int k, int n) const { return k * data_.num_times + (n - 1); }

 private:
  struct Forward {
    KrausMap map;
    std::vector<Matrix> states;       // rho_0 .. rho_M (present when requested)
    Eigen::MatrixXd expectations;     // N_O x N_T
    explicit Forward(KrausMap m) : map(std::move(m)) {}
  };
  Forward run_forward(const Eigen::VectorXd& theta, bool keep_states) const;
  Eigen::VectorXd residuals_from(const Eigen::MatrixXd& expectations) const;
  std::vector<KrausDerivative> parameter_derivatives(const Eigen::VectorXd& theta,
                                                     const KrausMap& map) const;

  ModelSpec spec_;
  MeasurementDataset data_;
  SimOptions sim_;
  int stride_ = 1;       // L = delta_t / dt
  int start_steps_ = 0;  // t_start / dt
  int total_steps_ = 0;  // start + L N_T
};

}  // namespace qmelearn
