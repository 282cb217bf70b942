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

#include "qmelearn/operators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace qmelearn {

namespace {
const Complex kI(0.0, 1.0);

Matrix2 make_pauli(int axis) {
  Matrix2 m;
  switch (axis) {
    case kAxisX: m << 0, 1, 1, 0; break;
    case kAxisY: m << 0, -kI, kI, 0; break;
    case kAxisZ: m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("pauli axis must be 1 (x), 2 (y) or 3 (z)");
  }
  return m;
}
}  // namespace

const Matrix2& pauli(int axis) {
  static const Matrix2 x = make_pauli(kAxisX);
  static const Matrix2 y = make_pauli(kAxisY);
  static const Matrix2 z = make_pauli(kAxisZ);
  switch (axis) {
    case kAxisX: return x;
    case kAxisY: return y;
    case kAxisZ: return z;
    default: throw std::invalid_argument("pauli axis must be 1 (x), 2 (y) or 3 (z)");
  }
}

Matrix2 sigma_plus() {
  Matrix2 m;
  m << 0, 1, 0, 0;
  return m;
}

Matrix2 sigma_minus() {
  Matrix2 m;
  m << 0, 0, 1, 0;
  return m;
}

char axis_name(int axis) {
  switch (axis) {
    case kAxisX: return 'x';
    case kAxisY: return 'y';
    case kAxisZ: return 'z';
    default: throw std::invalid_argument("pauli axis must be 1 (x), 2 (y) or 3 (z)");
  }
}

int axis_from_name(char name) {
  switch (name) {
    case 'x': return kAxisX;
    case 'y': return kAxisY;
    case 'z': return kAxisZ;
    default: throw std::invalid_argument(std::string("unknown pauli axis '") + name + "'");
  }
}

int qubit_dimension(int num_qubits) {
  if (num_qubits < 1 || num_qubits > 30) {
    throw std::invalid_argument("qubit count must be in [1, 30]");
  }
  return 1 << num_qubits;
}

Matrix embed_local(const Matrix2& op, int site, int num_qubits) {
  if (site < 0 || site >= num_qubits) {
    throw std::out_of_range("embed_local: site index out of range");
  }
  const int d = qubit_dimension(num_qubits);
  Matrix out = Matrix::Identity(d, d);
  site_apply_left(out, site, op, num_qubits);
  return out;
}

Observable pauli_string(const std::vector<int>& sites, const std::vector<int>& axes,
                        int num_qubits) {
  if (sites.size() != axes.size()) {
    throw std::invalid_argument("pauli_string: sites and axes must have equal length");
  }
  std::set<int> seen;
  for (int s : sites) {
    if (s < 0 || s >= num_qubits) throw std::out_of_range("pauli_string: site out of range");
    if (!seen.insert(s).second) throw std::invalid_argument("pauli_string: duplicate site");
  }
  const int d = qubit_dimension(num_qubits);
  Observable obs;
  obs.op = Matrix::Identity(d, d);
  if (sites.empty()) {
    obs.label = "I";
    return obs;
  }
  // canonical label in ascending site order, sites printed 1-based
  std::vector<std::size_t> order(sites.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return sites[a] < sites[b]; });
  std::string label;
  for (std::size_t i : order) {
    site_apply_left(obs.op, sites[i], pauli(axes[i]), num_qubits);
    label += axis_name(axes[i]);
    label += std::to_string(sites[i] + 1);
  }
  obs.label = label;
  return obs;
}

ObservableSet observable_set_from_string(const std::string& name) {
  if (name == "one_local") return ObservableSet::one_local;
  if (name == "two_local") return ObservableSet::two_local;
  if (name == "xy_one_local") return ObservableSet::xy_one_local;
  throw std::invalid_argument("unknown observable set '" + name + "'");
}

std::string to_string(ObservableSet kind) {
  switch (kind) {
    case ObservableSet::one_local: return "one_local";
    case ObservableSet::two_local: return "two_local";
    case ObservableSet::xy_one_local: return "xy_one_local";
  }
  throw std::logic_error("unreachable");
}

std::vector<Observable> observable_basis(ObservableSet kind, int num_qubits) {
  std::vector<Observable> basis;
  const int n = num_qubits;
  switch (kind) {
    case ObservableSet::one_local:
    case ObservableSet::two_local:
      basis.push_back(pauli_string({}, {}, n));
      for (int j = 0; j < n; ++j)
        for (int a = kAxisX; a <= kAxisZ; ++a) basis.push_back(pauli_string({j}, {a}, n));
      if (kind == ObservableSet::two_local) {
        for (int i = 0; i < n; ++i)
          for (int j = i + 1; j < n; ++j)
            for (int a = kAxisX; a <= kAxisZ; ++a)
              for (int b = kAxisX; b <= kAxisZ; ++b)
                basis.push_back(pauli_string({i, j}, {a, b}, n));
      }
      break;
    case ObservableSet::xy_one_local:
      for (int j = 0; j < n; ++j) {
        basis.push_back(pauli_string({j}, {kAxisX}, n));
        basis.push_back(pauli_string({j}, {kAxisY}, n));
      }
      break;
  }
  return basis;
}

double expectation(const Matrix& a, const Matrix& rho) {
  if (a.rows() != rho.rows() || a.cols() != rho.cols() || a.rows() != a.cols()) {
    throw std::invalid_argument("expectation: dimension mismatch");
  }
  // tr(A rho) = sum_ij A_ij rho_ji
  const Complex tr = (a.transpose().cwiseProduct(rho)).sum();
  if (std::abs(tr.imag()) > 1e-10) {
    throw std::runtime_error("expectation: imaginary part " + std::to_string(tr.imag()) +
                             " exceeds 1e-10; inputs are not Hermitian enough");
  }
  return tr.real();
}

double hermiticity_defect(const Matrix& x) { return (x - x.adjoint()).norm(); }

double min_eigenvalue_hermitian(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("min_eigenvalue_hermitian: not square");
  const double scale = std::max(1.0, m.norm());
  if (hermiticity_defect(m) > 1e-8 * scale) {
    throw std::invalid_argument("min_eigenvalue_hermitian: input is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

SingularMatrixError::SingularMatrixError(int pivot_index, double pivot_magnitude,
                                         double tolerance)
    : std::runtime_error("singular matrix: pivot " + std::to_string(pivot_index) +
                         " has magnitude " + std::to_string(pivot_magnitude) +
                         " below tolerance " + std::to_string(tolerance)),
      pivot_index_(pivot_index) {}

LuFactorization::LuFactorization(const Matrix& m) : lu_(m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("lu_factor: matrix must be square");
  const double tol = 1e-14 * m.norm();
  const auto diag = lu_.matrixLU().diagonal();
  for (int i = 0; i < diag.size(); ++i) {
    if (std::abs(diag(i)) <= tol) throw SingularMatrixError(i, std::abs(diag(i)), tol);
  }
}

Matrix LuFactorization::solve(const Matrix& rhs) const {
  if (rhs.rows() != lu_.rows()) throw std::invalid_argument("lu_solve: dimension mismatch");
  return lu_.solve(rhs);
}

Vector LuFactorization::solve(const Vector& rhs) const {
  if (rhs.size() != lu_.rows()) throw std::invalid_argument("lu_solve: dimension mismatch");
  return lu_.solve(rhs);
}

Matrix LuFactorization::solve_right(const Matrix& rhs) const {
  if (rhs.cols() != lu_.rows()) throw std::invalid_argument("lu_solve: dimension mismatch");
  // x M = rhs  <=>  M^dag x^dag = rhs^dag
  const Matrix rhs_adj = rhs.adjoint();
  const Matrix x_adj = lu_.adjoint().solve(rhs_adj);
  return x_adj.adjoint();
}

Matrix LuFactorization::inverse() const { return lu_.inverse(); }

// ---------------------------------------------------------------------------
// few-site kernels

void site_apply_left(Matrix& x, int site, const Matrix2& b, int num_qubits) {
  const int d = qubit_dimension(num_qubits);
  if (x.rows() != d) throw std::invalid_argument("site_apply_left: dimension mismatch");
  if (site < 0 || site >= num_qubits) throw std::out_of_range("site index out of range");
  const int w = 1 << (num_qubits - 1 - site);  // weight of the site's bit
  const Complex b00 = b(0, 0), b01 = b(0, 1), b10 = b(1, 0), b11 = b(1, 1);
  const int cols = static_cast<int>(x.cols());
  for (int c = 0; c < cols; ++c) {
    Complex* col = x.col(c).data();
    for (int hi = 0; hi < d; hi += 2 * w) {
      for (int lo = 0; lo < w; ++lo) {
        const int r0 = hi + lo;
        const Complex x0 = col[r0];
        const Complex x1 = col[r0 + w];
        col[r0] = b00 * x0 + b01 * x1;
        col[r0 + w] = b10 * x0 + b11 * x1;
      }
    }
  }
}

void site_apply_right(Matrix& x, int site, const Matrix2& b, int num_qubits) {
  const int d = qubit_dimension(num_qubits);
  if (x.cols() != d) throw std::invalid_argument("site_apply_right: dimension mismatch");
  if (site < 0 || site >= num_qubits) throw std::out_of_range("site index out of range");
  const int w = 1 << (num_qubits - 1 - site);
  const Complex b00 = b(0, 0), b01 = b(0, 1), b10 = b(1, 0), b11 = b(1, 1);
  Vector tmp(x.rows());
  for (int hi = 0; hi < d; hi += 2 * w) {
    for (int lo = 0; lo < w; ++lo) {
      const int c0 = hi + lo;
      const int c1 = c0 + w;
      tmp = x.col(c0);
      x.col(c0) = b00 * tmp + b10 * x.col(c1);
      x.col(c1) = b01 * tmp + b11 * x.col(c1);
    }
  }
}

void site_apply_vec(Vector& v, int site, const Matrix2& b, int num_qubits) {
  const int d = qubit_dimension(num_qubits);
  if (v.size() != d) throw std::invalid_argument("site_apply_vec: dimension mismatch");
  if (site < 0 || site >= num_qubits) throw std::out_of_range("site index out of range");
  const int w = 1 << (num_qubits - 1 - site);
  const Complex b00 = b(0, 0), b01 = b(0, 1), b10 = b(1, 0), b11 = b(1, 1);
  Complex* p = v.data();
  for (int hi = 0; hi < d; hi += 2 * w) {
    for (int lo = 0; lo < w; ++lo) {
      const int r0 = hi + lo;
      const Complex x0 = p[r0];
      const Complex x1 = p[r0 + w];
      p[r0] = b00 * x0 + b01 * x1;
      p[r0 + w] = b10 * x0 + b11 * x1;
    }
  }
}

LocalOp LocalOp::single(int site, const Matrix2& block, Complex coeff) {
  LocalOp op;
  op.coeff = coeff;
  op.factors.push_back({site, block});
  return op;
}

LocalOp LocalOp::adjointed() const {
  LocalOp out;
  out.coeff = std::conj(coeff);
  out.factors = factors;
  for (auto& f : out.factors) f.block = f.block.adjoint().eval();
  return out;
}

Matrix LocalOp::dense(int num_qubits) const {
  const int d = qubit_dimension(num_qubits);
  Matrix out = Matrix::Identity(d, d);
  return mul_left(out, num_qubits);
}

Matrix LocalOp::mul_left(const Matrix& x, int num_qubits) const {
  Matrix out = coeff * x;
  for (const auto& f : factors) site_apply_left(out, f.site, f.block, num_qubits);
  return out;
}

Matrix LocalOp::mul_right(const Matrix& x, int num_qubits) const {
  Matrix out = coeff * x;
  for (const auto& f : factors) site_apply_right(out, f.site, f.block, num_qubits);
  return out;
}

Matrix LocalOp::conjugate(const Matrix& x, int num_qubits) const {
  Matrix out = (coeff * std::conj(coeff)) * x;
  for (const auto& f : factors) {
    site_apply_left(out, f.site, f.block, num_qubits);
    site_apply_right(out, f.site, f.block.adjoint(), num_qubits);
  }
  return out;
}

Vector LocalOp::mul_vec(const Vector& v, int num_qubits) const {
  Vector out = coeff * v;
  for (const auto& f : factors) site_apply_vec(out, f.site, f.block, num_qubits);
  return out;
}

LocalOp local_product(const LocalOp& a, const LocalOp& b) {
  LocalOp out;
  out.coeff = a.coeff * b.coeff;
  out.factors = a.factors;
  for (const auto& fb : b.factors) {
    bool merged = false;
    for (auto& fa : out.factors) {
      if (fa.site == fb.site) {
        fa.block = (fa.block * fb.block).eval();
        merged = true;
        break;
      }
    }
    if (!merged) out.factors.push_back(fb);
  }
  std::sort(out.factors.begin(), out.factors.end(),
            [](const LocalFactor& l, const LocalFactor& r) { return l.site < r.site; });
  return out;
}

Matrix local_sum_dense(const LocalOpSum& sum, int num_qubits) {
  const int d = qubit_dimension(num_qubits);
  Matrix out = Matrix::Zero(d, d);
  for (const auto& op : sum) out += op.dense(num_qubits);
  return out;
}

Matrix local_sum_mul_left(const LocalOpSum& sum, const Matrix& x, int num_qubits) {
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (const auto& op : sum) out += op.mul_left(x, num_qubits);
  return out;
}

}  // namespace qmelearn
