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

// Completely positive one-step propagators for the Lindblad equation in Kraus
// form, built from a semi-implicit resolvent:
//
//   order 1:  F_0 = (I - G dt)^-1,            F_j = F_0 V_j sqrt(dt)
//   order 2:  F_0 = (I - G dt/2)^-1 (I + G dt/2),
//             F_j = (I - G dt/2)^-1 V_j (I + G dt/2) sqrt(dt),
//             F_(j1,j2) = (I - G dt/2)^-1 V_j1 V_j2 dt / sqrt(2)
//                         (or V_j1 V_j2 dt / sqrt(2) in the simplified form)
//
// with G = -iH - 1/2 sum_j V_j^dag V_j. The resolvent is factored once per
// map; applications go through the tensor structure of the jump operators
// when available. An analytic per-parameter derivative of the map supports
// gradient-based fitting.

#pragma once

#include "qmelearn/model.hpp"

#include <memory>
#include <vector>

namespace qmelearn {

// Per-state helper products reused by the derivative map. For the order-2
// schemes: T = rho Q^dag, S = Q rho Q^dag, W = sum_j V_j rho V_j^dag.
struct KrausStepCache {
  Matrix T, S, W;
  bool filled = false;
};

class KrausMap {
 public:
  static KrausMap first_order(const LindbladOperators& ops, double dt);
  static KrausMap second_order(const LindbladOperators& ops, double dt,
                               bool simplified = false);

  int order() const { return order_; }
  double dt() const { return dt_; }
  bool simplified() const { return simplified_; }
  int dim() const { return static_cast<int>(p_inv_.rows()); }
  int num_jumps() const { return static_cast<int>(ops_.V.size()); }
  const LindbladOperators& ops() const { return ops_; }

  // rho -> sum_j F_j rho F_j^dag, re-Hermitized as (X + X^dag)/2. No trace
  // renormalization unless requested by the caller.
  Matrix apply(const Matrix& rho) const;

  // Heisenberg-picture adjoint, A -> sum_j F_j^dag A F_j.
  Matrix apply_adjoint(const Matrix& a) const;

  // Materialized Kraus operator list: F_0, the single-jump operators, then
  // the double-jump operators (j1-major). Built lazily and cached.
  const std::vector<Matrix>& kraus_operators() const;

  double tp_defect() const;          // ||sum_j F_j^dag F_j - I||_2
  double spectral_radius_f0() const;

  KrausStepCache step_cache(const Matrix& rho) const;

  // building blocks shared with the derivative map and the SSE steppers
  const Matrix& p_inv() const { return p_inv_; }
  const Matrix& q() const { return q_; }
  Matrix conj_sum(const Matrix& x) const;      // sum_j V_j x V_j^dag
  Matrix conj_sum_adj(const Matrix& x) const;  // sum_j V_j^dag x V_j

 private:
  KrausMap(const LindbladOperators& ops, double dt, int order, bool simplified);

  LindbladOperators ops_;
  double dt_ = 0.0;
  int order_ = 1;
  bool simplified_ = false;
  Matrix p_inv_;  // (I - G dt)^-1 or (I - G dt/2)^-1
  Matrix q_;      // I + G dt/2 (order 2); unused for order 1
  mutable std::vector<Matrix> kraus_;
};

// Analytic derivative of a Kraus map with respect to one model parameter.
// apply() evaluates (d_theta K)[rho]; passing rho_next = K[rho] and a step
// cache avoids recomputing shared products inside fitting loops. The map and
// the derivative must come from the same theta.
class KrausDerivative {
 public:
  KrausDerivative(const KrausMap& map, OperatorDerivative d);

  Matrix apply(const Matrix& rho, const Matrix* rho_next = nullptr,
               const KrausStepCache* cache = nullptr) const;

  // dF list aligned with map.kraus_operators(); used by verification paths.
  std::vector<Matrix> kraus_operators() const;

 private:
  Matrix mul_dg(const Matrix& x) const;  // dG * x
  const KrausMap* map_;
  OperatorDerivative d_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Matrix> states;
};

Trajectory evolve_trajectory(const KrausMap& map, const Matrix& rho0, int steps,
                             int record_stride = 1, bool renormalize = false);

// Expectation table y(k, n) = tr(A_k rho_(start + n*stride)), n = 1..num_times.
Eigen::MatrixXd evolve_expectations(const KrausMap& map, const Matrix& rho0,
                                    const std::vector<Observable>& observables,
                                    int num_times, int stride, int start_steps = 0,
                                    bool renormalize = false);

// Max over interior recorded times of | centered difference of tr(A rho) -
// tr(A L[rho]) |; a consistency check of a trajectory against the generator.
double ehrenfest_residual(const LindbladOperators& ops, const Trajectory& traj,
                          const Matrix& a);

}  // namespace qmelearn
