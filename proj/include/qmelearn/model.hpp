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

// Parameterized Lindbladian families on spin chains: a nearest-neighbour
// Hamiltonian with single-site fields, plus either fixed-form dissipators
// (lowering and dephasing channels with global strengths) or per-site jump
// operators expanded in the Pauli basis with a gauge-fixed phase. Provides
// the flat real parameter vector layout, operator construction, analytic
// parameter derivatives, seeded ground-truth sampling, and JSON round trips.

#pragma once

#include "qmelearn/operators.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qmelearn {

enum class ModelFamily { linear_dissipator, pauli_jump };
enum class DissipativeMode { strength, amplitude };

ModelFamily family_from_string(const std::string& name);
std::string to_string(ModelFamily family);
DissipativeMode mode_from_string(const std::string& name);
std::string to_string(DissipativeMode mode);

struct ModelSpec {
  ModelFamily family = ModelFamily::linear_dissipator;
  int num_qubits = 1;
  // Only meaningful for linear_dissipator. In amplitude mode the optimized
  // parameters are s_i with rate lambda_i = s_i^2, which keeps derivatives
  // smooth at zero rate; strength mode optimizes lambda_i directly.
  DissipativeMode mode = DissipativeMode::amplitude;

  int num_jumps() const;         // 2N (linear_dissipator) or N (pauli_jump)
  int hamiltonian_size() const;  // 3N + 9(N-1)
  int dissipative_size() const;  // 2 or 5N
  int size() const { return hamiltonian_size() + dissipative_size(); }
};

// Stable parameter order: single-site fields e (site-major, axis-minor),
// couplings c (site-major, then left axis, then right axis), then the
// dissipative block. For pauli_jump the per-site block is
// [re d_1, re d_2, re d_3, im d_2, im d_3]; im d_1 is gauge-fixed to zero
// and has no slot.
struct ParameterLayout {
  ModelSpec spec;
  std::vector<std::string> names;

  static ParameterLayout create(const ModelSpec& spec);
  int size() const { return static_cast<int>(names.size()); }
};

struct LindbladOperators {
  int num_qubits = 0;  // 0 when the operators carry no qubit tensor structure
  Matrix H;
  std::vector<Matrix> V;
  Matrix G;  // -iH - 1/2 sum_j V_j^dag V_j

  // structured single-site form of each jump operator, when available
  std::vector<LocalOp> local_jumps;

  bool structured() const {
    return num_qubits > 0 && local_jumps.size() == V.size();
  }
  int dim() const { return static_cast<int>(H.rows()); }

  // Generic construction from explicit matrices (no tensor structure).
  static LindbladOperators from_parts(Matrix h, std::vector<Matrix> v);
};

// Right-hand side of the master equation, d rho / dt.
Matrix lindblad_rhs(const LindbladOperators& ops, const Matrix& rho);

// Derivative of (H, V, G) with respect to one real parameter. dV is sparse:
// only jump operators that actually depend on the parameter appear.
struct OperatorDerivative {
  Matrix dH;
  Matrix dG;
  std::vector<std::pair<int, Matrix>> dV;

  bool has_local = false;
  LocalOpSum dG_local;
  std::vector<std::pair<int, LocalOp>> dV_local;
};

Matrix build_hamiltonian(const Eigen::VectorXd& theta_h, int num_qubits);
std::vector<Matrix> build_jumps(const Eigen::VectorXd& theta_d, const ModelSpec& spec,
                                std::vector<LocalOp>* local_out = nullptr);
LindbladOperators build_operators(const ModelSpec& spec, const Eigen::VectorXd& theta);
OperatorDerivative operator_derivative(const ModelSpec& spec, const Eigen::VectorXd& theta,
                                       int alpha);

// Ground-truth parameter draw: e, c ~ N(0,1); pauli_jump coefficients
// ~ N(0, 1/2) per real component; dissipator rates lambda = |N(0,1)|
// (stored as sqrt(lambda) in amplitude mode). Deterministic per seed.
Eigen::VectorXd random_true_model(std::uint64_t seed, const ModelSpec& spec);

// Self-describing JSON document embedding the layout schema.
std::string parameters_to_json(const ModelSpec& spec, const Eigen::VectorXd& theta);
std::pair<ModelSpec, Eigen::VectorXd> parameters_from_json(const std::string& text);

}  // namespace qmelearn
