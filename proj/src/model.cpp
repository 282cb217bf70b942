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

#include "qmelearn/model.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <random>

namespace qmelearn {

namespace {
const Complex kI(0.0, 1.0);

// parameter index helpers (0-based site j, axes 1..3)
int e_index(int j, int axis) { return 3 * j + (axis - 1); }
int c_index(int num_qubits, int j, int a, int b) {
  return 3 * num_qubits + 9 * j + 3 * (a - 1) + (b - 1);
}
}  // namespace

ModelFamily family_from_string(const std::string& name) {
  if (name == "linear_dissipator") return ModelFamily::linear_dissipator;
  if (name == "pauli_jump") return ModelFamily::pauli_jump;
  throw std::invalid_argument("unknown model family '" + name + "'");
}

std::string to_string(ModelFamily family) {
  return family == ModelFamily::linear_dissipator ? "linear_dissipator" : "pauli_jump";
}

DissipativeMode mode_from_string(const std::string& name) {
  if (name == "strength") return DissipativeMode::strength;
  if (name == "amplitude") return DissipativeMode::amplitude;
  throw std::invalid_argument("unknown dissipative mode '" + name + "'");
}

std::string to_string(DissipativeMode mode) {
  return mode == DissipativeMode::strength ? "strength" : "amplitude";
}

int ModelSpec::num_jumps() const {
  return family == ModelFamily::linear_dissipator ? 2 * num_qubits : num_qubits;
}

int ModelSpec::hamiltonian_size() const { return 3 * num_qubits + 9 * (num_qubits - 1); }

int ModelSpec::dissipative_size() const {
  return family == ModelFamily::linear_dissipator ? 2 : 5 * num_qubits;
}

ParameterLayout ParameterLayout::create(const ModelSpec& spec) {
  ParameterLayout layout;
  layout.spec = spec;
  const int n = spec.num_qubits;
  for (int j = 0; j < n; ++j)
    for (int a = kAxisX; a <= kAxisZ; ++a)
      layout.names.push_back("e_" + std::to_string(j + 1) + "_" + axis_name(a));
  for (int j = 0; j + 1 < n; ++j)
    for (int a = kAxisX; a <= kAxisZ; ++a)
      for (int b = kAxisX; b <= kAxisZ; ++b)
        layout.names.push_back("c_" + std::to_string(j + 1) + "_" + axis_name(a) +
                               axis_name(b));
  if (spec.family == ModelFamily::linear_dissipator) {
    const char* base = spec.mode == DissipativeMode::strength ? "lambda_" : "s_";
    layout.names.push_back(base + std::string("1"));
    layout.names.push_back(base + std::string("2"));
  } else {
    for (int j = 0; j < n; ++j) {
      const std::string site = std::to_string(j + 1);
      layout.names.push_back("dre_" + site + "_x");
      layout.names.push_back("dre_" + site + "_y");
      layout.names.push_back("dre_" + site + "_z");
      layout.names.push_back("dim_" + site + "_y");
      layout.names.push_back("dim_" + site + "_z");
    }
  }
  return layout;
}

LindbladOperators LindbladOperators::from_parts(Matrix h, std::vector<Matrix> v) {
  LindbladOperators ops;
  ops.H = std::move(h);
  ops.V = std::move(v);
  const int d = static_cast<int>(ops.H.rows());
  ops.G = -kI * ops.H;
  for (const auto& vj : ops.V) {
    if (vj.rows() != d || vj.cols() != d) {
      throw std::invalid_argument("jump operator dimension mismatch");
    }
    ops.G -= 0.5 * (vj.adjoint() * vj);
  }
  return ops;
}

Matrix lindblad_rhs(const LindbladOperators& ops, const Matrix& rho) {
  Matrix out = -kI * (ops.H * rho - rho * ops.H);
  for (const auto& v : ops.V) {
    const Matrix vr = v * rho;
    const Matrix vdv = v.adjoint() * v;
    out += vr * v.adjoint() - 0.5 * (vdv * rho + rho * vdv);
  }
  return out;
}

Matrix build_hamiltonian(const Eigen::VectorXd& theta_h, int num_qubits) {
  const int n = num_qubits;
  const int expected = 3 * n + 9 * (n - 1);
  if (theta_h.size() != expected) {
    throw std::invalid_argument("hamiltonian slice has length " +
                                std::to_string(theta_h.size()) + ", expected " +
                                std::to_string(expected));
  }
  const int d = qubit_dimension(n);
  Matrix h = Matrix::Zero(d, d);
  for (int j = 0; j < n; ++j) {
    for (int a = kAxisX; a <= kAxisZ; ++a) {
      const double w = theta_h(e_index(j, a));
      if (w != 0.0) h += w * LocalOp::single(j, pauli(a)).dense(n);
    }
  }
  for (int j = 0; j + 1 < n; ++j) {
    for (int a = kAxisX; a <= kAxisZ; ++a) {
      for (int b = kAxisX; b <= kAxisZ; ++b) {
        const double w = theta_h(c_index(n, j, a, b));
        if (w != 0.0) {
          h += w * local_product(LocalOp::single(j, pauli(a)),
                                 LocalOp::single(j + 1, pauli(b)))
                       .dense(n);
        }
      }
    }
  }
  return h;
}

namespace {

// Single-site 2x2 blocks of the jump operators, in jump index order.
std::vector<LocalOp> jump_local_ops(const Eigen::VectorXd& theta_d, const ModelSpec& spec) {
  const int n = spec.num_qubits;
  std::vector<LocalOp> jumps;
  if (spec.family == ModelFamily::linear_dissipator) {
    if (theta_d.size() != 2) throw std::invalid_argument("dissipative slice must have length 2");
    double a1 = theta_d(0), a2 = theta_d(1);
    if (spec.mode == DissipativeMode::strength) {
      if (a1 < 0 || a2 < 0) {
        throw std::domain_error("negative dissipation strength; use amplitude mode for "
                                "sign-free parameterization");
      }
      a1 = std::sqrt(a1);
      a2 = std::sqrt(a2);
    }
    // lambda = amplitude^2 either way; the sign of the amplitude cancels in
    // every V . V^dag pairing, so no absolute value is needed.
    for (int j = 0; j < n; ++j) jumps.push_back(LocalOp::single(j, sigma_minus(), a1));
    for (int j = 0; j < n; ++j) jumps.push_back(LocalOp::single(j, pauli(kAxisZ), a2));
  } else {
    if (theta_d.size() != 5 * n) {
      throw std::invalid_argument("dissipative slice must have length " + std::to_string(5 * n));
    }
    for (int j = 0; j < n; ++j) {
      const auto block = theta_d.segment(5 * j, 5);
      const Complex d1(block(0), 0.0);  // im part gauge-fixed to zero
      const Complex d2(block(1), block(3));
      const Complex d3(block(2), block(4));
      Matrix2 v = d1 * pauli(kAxisX) + d2 * pauli(kAxisY) + d3 * pauli(kAxisZ);
      jumps.push_back(LocalOp::single(j, v));
    }
  }
  return jumps;
}

}  // namespace

std::vector<Matrix> build_jumps(const Eigen::VectorXd& theta_d, const ModelSpec& spec,
                                std::vector<LocalOp>* local_out) {
  auto local = jump_local_ops(theta_d, spec);
  std::vector<Matrix> v;
  v.reserve(local.size());
  for (const auto& op : local) v.push_back(op.dense(spec.num_qubits));
  if (local_out) *local_out = std::move(local);
  return v;
}

LindbladOperators build_operators(const ModelSpec& spec, const Eigen::VectorXd& theta) {
  if (theta.size() != spec.size()) {
    throw std::invalid_argument("parameter vector has length " + std::to_string(theta.size()) +
                                ", expected " + std::to_string(spec.size()));
  }
  const int nh = spec.hamiltonian_size();
  LindbladOperators ops;
  ops.num_qubits = spec.num_qubits;
  ops.H = build_hamiltonian(theta.head(nh), spec.num_qubits);
  ops.V = build_jumps(theta.tail(spec.dissipative_size()), spec, &ops.local_jumps);
  ops.G = -kI * ops.H;
  for (const auto& vj : ops.V) ops.G -= 0.5 * (vj.adjoint() * vj);
  return ops;
}

OperatorDerivative operator_derivative(const ModelSpec& spec, const Eigen::VectorXd& theta,
                                       int alpha) {
  if (alpha < 0 || alpha >= spec.size()) {
    throw std::out_of_range("parameter index out of range");
  }
  const int n = spec.num_qubits;
  const int d = qubit_dimension(n);
  const int nh = spec.hamiltonian_size();

  OperatorDerivative out;
  out.has_local = true;
  out.dH = Matrix::Zero(d, d);
  out.dG = Matrix::Zero(d, d);

  if (alpha < nh) {
    // Hamiltonian parameter: dH is a single Pauli string, dV = 0.
    LocalOp term;
    if (alpha < 3 * n) {
      const int j = alpha / 3;
      const int a = alpha % 3 + 1;
      term = LocalOp::single(j, pauli(a));
    } else {
      const int rest = alpha - 3 * n;
      const int j = rest / 9;
      const int a = (rest % 9) / 3 + 1;
      const int b = rest % 3 + 1;
      term = local_product(LocalOp::single(j, pauli(a)), LocalOp::single(j + 1, pauli(b)));
    }
    out.dH = term.dense(n);
    out.dG = -kI * out.dH;
    LocalOp g_term = term;
    g_term.coeff *= -kI;
    out.dG_local.push_back(g_term);
    return out;
  }

  // dissipative parameter: dH = 0, dG = -1/2 sum_j (dV_j^dag V_j + V_j^dag dV_j)
  const int beta = alpha - nh;
  std::vector<LocalOp> jumps = jump_local_ops(theta.tail(spec.dissipative_size()), spec);

  if (spec.family == ModelFamily::linear_dissipator) {
    if (spec.mode == DissipativeMode::strength) {
      const double lambda = theta(alpha);
      if (lambda <= 0.0) {
        throw std::domain_error(
            "derivative of sqrt(lambda) is singular at lambda = 0; switch the model to "
            "amplitude mode");
      }
      const double scale = 0.5 / std::sqrt(lambda);
      const Matrix2 block = beta == 0 ? Matrix2(sigma_minus()) : Matrix2(pauli(kAxisZ));
      for (int j = 0; j < n; ++j) {
        const int jump_index = beta * n + j;
        out.dV_local.emplace_back(jump_index, LocalOp::single(j, block, scale));
      }
    } else {
      const Matrix2 block = beta == 0 ? Matrix2(sigma_minus()) : Matrix2(pauli(kAxisZ));
      for (int j = 0; j < n; ++j) {
        out.dV_local.emplace_back(beta * n + j, LocalOp::single(j, block));
      }
    }
  } else {
    const int j = beta / 5;
    const int slot = beta % 5;
    Complex coeff(1.0, 0.0);
    int axis = 0;
    switch (slot) {
      case 0: axis = kAxisX; break;
      case 1: axis = kAxisY; break;
      case 2: axis = kAxisZ; break;
      case 3: axis = kAxisY; coeff = kI; break;
      case 4: axis = kAxisZ; coeff = kI; break;
    }
    out.dV_local.emplace_back(j, LocalOp::single(j, pauli(axis), coeff));
  }

  for (const auto& [j, dv] : out.dV_local) {
    out.dV.emplace_back(j, dv.dense(n));
    const LocalOp t1 = local_product(dv.adjointed(), jumps[j]);
    const LocalOp t2 = local_product(jumps[j].adjointed(), dv);
    LocalOp g1 = t1, g2 = t2;
    g1.coeff *= -0.5;
    g2.coeff *= -0.5;
    out.dG_local.push_back(g1);
    out.dG_local.push_back(g2);
  }
  out.dG = local_sum_dense(out.dG_local, n);
  return out;
}

Eigen::VectorXd random_true_model(std::uint64_t seed, const ModelSpec& spec) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd theta(spec.size());
  const int nh = spec.hamiltonian_size();
  for (int i = 0; i < nh; ++i) theta(i) = unit(rng);
  if (spec.family == ModelFamily::linear_dissipator) {
    for (int i = 0; i < 2; ++i) {
      const double lambda = std::abs(unit(rng));
      theta(nh + i) = spec.mode == DissipativeMode::strength ? lambda : std::sqrt(lambda);
    }
  } else {
    const double sigma = 1.0 / std::sqrt(2.0);  // variance 1/2 per real component
    for (int i = nh; i < spec.size(); ++i) theta(i) = sigma * unit(rng);
  }
  return theta;
}

std::string parameters_to_json(const ModelSpec& spec, const Eigen::VectorXd& theta) {
  if (theta.size() != spec.size()) {
    throw std::invalid_argument("parameter vector does not match the model spec");
  }
  const ParameterLayout layout = ParameterLayout::create(spec);
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["family"] = to_string(spec.family);
  doc["num_qubits"] = spec.num_qubits;
  if (spec.family == ModelFamily::linear_dissipator) doc["mode"] = to_string(spec.mode);
  doc["names"] = layout.names;
  std::vector<double> values(theta.data(), theta.data() + theta.size());
  doc["values"] = values;
  return doc.dump(2);
}

std::pair<ModelSpec, Eigen::VectorXd> parameters_from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  ModelSpec spec;
  spec.family = family_from_string(doc.at("family").get<std::string>());
  spec.num_qubits = doc.at("num_qubits").get<int>();
  if (doc.contains("mode")) spec.mode = mode_from_string(doc.at("mode").get<std::string>());
  const auto values = doc.at("values").get<std::vector<double>>();
  if (static_cast<int>(values.size()) != spec.size()) {
    throw std::invalid_argument("parameter file does not match its declared layout");
  }
  Eigen::VectorXd theta(spec.size());
  for (int i = 0; i < spec.size(); ++i) theta(i) = values[i];
  return {spec, theta};
}

}  // namespace qmelearn
