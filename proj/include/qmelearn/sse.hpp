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

// Stochastic Schroedinger unraveling of the Lindblad dynamics. The density
// matrix is recovered as the ensemble average of |psi><psi| over norm-
// non-preserving trajectories:
//
//   order 1 (semi-implicit Euler, Gaussian increments dW ~ N(0, dt)):
//     psi' = (I - G dt)^-1 [ psi + sum_j V_j psi dW_j ]
//
//   order 2 (implicit weak scheme, three-point dW^ and two-point U):
//     psi' = (I - G dt/2)^-1 [ Q psi + sum_j V_j Q psi dW^_j
//            + 1/2 sum_(j1,j2) V_j2 V_j1 psi (dW^_j1 dW^_j2 + U_j1j2) ]
//     with Q = I + G dt/2, P(dW^ = +-sqrt(3 dt)) = 1/6, P(dW^ = 0) = 2/3,
//     U antisymmetric off the diagonal with entries +-dt, U_jj = -dt.
//
// The expected one-step density of each scheme equals the corresponding
// Kraus map exactly; enumerate_one_step checks that by summing the finite
// noise support with exact probabilities.

#pragma once

#include "qmelearn/kraus.hpp"

#include <cstdint>
#include <random>

namespace qmelearn {

struct NoiseDraw {
  Eigen::VectorXd dW;  // one increment per jump operator
  Eigen::MatrixXd U;   // order 2 only
};

class SseIntegrator {
 public:
  SseIntegrator(const LindbladOperators& ops, double dt, int order);

  int order() const { return order_; }
  double dt() const { return dt_; }
  int dim() const { return static_cast<int>(p_inv_.rows()); }
  int num_jumps() const { return static_cast<int>(ops_.V.size()); }
  const LindbladOperators& ops() const { return ops_; }

  Vector step(const Vector& psi, const NoiseDraw& noise) const;
  NoiseDraw sample_noise(std::mt19937_64& rng) const;

 private:
  Vector apply_jump(int j, const Vector& psi) const;

  LindbladOperators ops_;
  double dt_;
  int order_;
  Matrix p_inv_;
};

struct McDensityResult {
  Matrix rho;                         // mean of |psi><psi|
  Eigen::MatrixXd standard_error;     // per-entry standard error of the mean
  long num_trajectories = 0;
};

// Seeded Monte Carlo estimate of the density matrix after `steps` steps.
// Each trajectory owns an RNG stream keyed by its index; the reduction is
// chunked in a fixed order, so the result is bitwise reproducible for a
// given seed regardless of threading.
McDensityResult mc_density(const Vector& psi0, const LindbladOperators& ops, double dt,
                           int steps, long num_trajectories, int order, std::uint64_t seed);

// Exact one-step expectation of |psi1><psi1| over the finite noise support.
// For the first-order scheme the Gaussian increment is replaced by the
// moment-matched two-point law +-sqrt(dt); only second moments enter the
// expectation, so the result is unchanged. Supports num_jumps <= 3.
Matrix enumerate_one_step(const Vector& psi0, const LindbladOperators& ops, double dt,
                          int order);

}  // namespace qmelearn
