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

// Dense complex linear algebra for multi-qubit operators: Pauli and tensor
// product construction, observable bases, expectation values, pivoted LU
// with reuse, Hermitian eigenvalue checks, and fast application of few-site
// operators to full-dimension matrices.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmelearn {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Matrix2 = Eigen::Matrix2cd;

// Pauli axes are numbered 1..3 = x, y, z, matching the sigma^alpha convention.
enum Axis : int { kAxisX = 1, kAxisY = 2, kAxisZ = 3 };

const Matrix2& pauli(int axis);
Matrix2 sigma_plus();   // (x + i y) / 2 = |0><1|
Matrix2 sigma_minus();  // (x - i y) / 2 = |1><0|
char axis_name(int axis);
int axis_from_name(char name);

int qubit_dimension(int num_qubits);

// I^(site) (x) op (x) I^(N-site-1). Sites are 0-based in code; labels print
// 1-based, so sigma^y on code site 1 is labelled "y2".
Matrix embed_local(const Matrix2& op, int site, int num_qubits);

struct Observable {
  Matrix op;
  std::string label;
};

// Product of embedded Paulis on distinct sites. Empty site list gives the
// identity observable, labelled "I".
Observable pauli_string(const std::vector<int>& sites, const std::vector<int>& axes,
                        int num_qubits);

enum class ObservableSet { one_local, two_local, xy_one_local };
ObservableSet observable_set_from_string(const std::string& name);
std::string to_string(ObservableSet kind);

// one_local: identity + every sigma_j^a             (3N + 1)
// two_local: one_local + every sigma_i^a sigma_j^b, i < j  (1 + 3N + 9 N(N-1)/2)
// xy_one_local: sigma_j^x and sigma_j^y only        (2N)
std::vector<Observable> observable_basis(ObservableSet kind, int num_qubits);

// Re tr(a rho). Throws if the imaginary part exceeds 1e-10 (a and rho are
// expected to be Hermitian up to roundoff).
double expectation(const Matrix& a, const Matrix& rho);
inline double expectation(const Observable& a, const Matrix& rho) {
  return expectation(a.op, rho);
}

inline Matrix hermitized(const Matrix& x) { return 0.5 * (x + x.adjoint()); }
double hermiticity_defect(const Matrix& x);  // ||x - x^dag||_F

// Smallest eigenvalue of a Hermitian matrix. Throws on non-Hermitian input.
double min_eigenvalue_hermitian(const Matrix& m);

class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(int pivot_index, double pivot_magnitude, double tolerance);
  int pivot_index() const { return pivot_index_; }

 private:
  int pivot_index_;
};

// Partial-pivoting LU factorization of a square complex matrix, kept around so
// that many right-hand sides can be solved against the same matrix. Factoring
// a matrix whose smallest pivot falls below 1e-14 * ||M||_F throws.
class LuFactorization {
 public:
  explicit LuFactorization(const Matrix& m);
  int dim() const { return static_cast<int>(lu_.rows()); }
  Matrix solve(const Matrix& rhs) const;        // solves M x = rhs
  Vector solve(const Vector& rhs) const;
  Matrix solve_right(const Matrix& rhs) const;  // solves x M = rhs
  Matrix inverse() const;

 private:
  Eigen::PartialPivLU<Matrix> lu_;
};

inline Matrix lu_solve(const LuFactorization& f, const Matrix& rhs) { return f.solve(rhs); }

// ---------------------------------------------------------------------------
// Few-site operators.
//
// Jump operators and parameter derivatives in the supported model families
// act on one site (or two adjacent sites for Hamiltonian couplings). Applying
// them through their tensor structure costs O(d^2) instead of the O(d^3) of a
// dense multiply, which is what keeps the inner learning loops affordable.
// ---------------------------------------------------------------------------

// x <- (I (x) b (x) I) x  /  x <- x (I (x) b (x) I), block b at `site`.
void site_apply_left(Matrix& x, int site, const Matrix2& b, int num_qubits);
void site_apply_right(Matrix& x, int site, const Matrix2& b, int num_qubits);
void site_apply_vec(Vector& v, int site, const Matrix2& b, int num_qubits);

struct LocalFactor {
  int site = 0;
  Matrix2 block;
};

// coeff * product of single-site blocks on distinct sites.
struct LocalOp {
  Complex coeff{1.0, 0.0};
  std::vector<LocalFactor> factors;

  static LocalOp single(int site, const Matrix2& block, Complex coeff = Complex(1.0, 0.0));
  LocalOp adjointed() const;
  Matrix dense(int num_qubits) const;

  Matrix mul_left(const Matrix& x, int num_qubits) const;   // op * x
  Matrix mul_right(const Matrix& x, int num_qubits) const;  // x * op
  Matrix conjugate(const Matrix& x, int num_qubits) const;  // op * x * op^dag
  Vector mul_vec(const Vector& v, int num_qubits) const;
};

// Product of two local operators; same-site blocks are composed.
LocalOp local_product(const LocalOp& a, const LocalOp& b);

using LocalOpSum = std::vector<LocalOp>;
Matrix local_sum_dense(const LocalOpSum& sum, int num_qubits);
Matrix local_sum_mul_left(const LocalOpSum& sum, const Matrix& x, int num_qubits);

}  // namespace qmelearn
