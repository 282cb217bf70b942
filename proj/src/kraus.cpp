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

#include "qmelearn/kraus.hpp"

#include <cmath>

namespace qmelearn {

namespace {
constexpr double kInvSqrt2 = 0.7071067811865475244;
}

KrausMap::KrausMap(const LindbladOperators& ops, double dt, int order, bool simplified)
    : ops_(ops), dt_(dt), order_(order), simplified_(simplified) {
  if (dt <= 0.0) throw std::invalid_argument("step size must be positive");
  const int d = ops.dim();
  const Matrix eye = Matrix::Identity(d, d);
  if (order == 1) {
    LuFactorization lu(eye - dt * ops.G);
    p_inv_ = lu.inverse();
    q_ = eye;
  } else {
    LuFactorization lu(eye - 0.5 * dt * ops.G);
    p_inv_ = lu.inverse();
    q_ = eye + 0.5 * dt * ops.G;
  }
}

KrausMap KrausMap::first_order(const LindbladOperators& ops, double dt) {
  return KrausMap(ops, dt, 1, false);
}

KrausMap KrausMap::second_order(const LindbladOperators& ops, double dt, bool simplified) {
  return KrausMap(ops, dt, 2, simplified);
}

Matrix KrausMap::conj_sum(const Matrix& x) const {
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  if (ops_.structured()) {
    for (const auto& v : ops_.local_jumps) out += v.conjugate(x, ops_.num_qubits);
  } else {
    for (const auto& v : ops_.V) out.noalias() += v * x * v.adjoint();
  }
  return out;
}

Matrix KrausMap::conj_sum_adj(const Matrix& x) const {
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  if (ops_.structured()) {
    for (const auto& v : ops_.local_jumps) {
      out += v.adjointed().conjugate(x, ops_.num_qubits);
    }
  } else {
    for (const auto& v : ops_.V) out.noalias() += v.adjoint() * x * v;
  }
  return out;
}

Matrix KrausMap::apply(const Matrix& rho) const {
  if (rho.rows() != dim() || rho.cols() != dim()) {
    throw std::invalid_argument("apply: dimension mismatch");
  }
  Matrix out;
  if (order_ == 1) {
    Matrix core = rho + dt_ * conj_sum(rho);
    out.noalias() = p_inv_ * core * p_inv_.adjoint();
  } else {
    Matrix t = rho * q_.adjoint();
    Matrix s = q_ * t;
    Matrix core = s + dt_ * conj_sum(s);
    if (simplified_) {
      out.noalias() = p_inv_ * core * p_inv_.adjoint();
      out += (0.5 * dt_ * dt_) * conj_sum(conj_sum(rho));
    } else {
      core += (0.5 * dt_ * dt_) * conj_sum(conj_sum(rho));
      out.noalias() = p_inv_ * core * p_inv_.adjoint();
    }
  }
  return hermitized(out);
}

Matrix KrausMap::apply_adjoint(const Matrix& a) const {
  if (a.rows() != dim() || a.cols() != dim()) {
    throw std::invalid_argument("apply_adjoint: dimension mismatch");
  }
  Matrix at;
  at.noalias() = p_inv_.adjoint() * a * p_inv_;
  Matrix out;
  if (order_ == 1) {
    out = at + dt_ * conj_sum_adj(at);
  } else {
    Matrix inner = at + dt_ * conj_sum_adj(at);
    out.noalias() = q_.adjoint() * inner * q_;
    out += (0.5 * dt_ * dt_) * conj_sum_adj(conj_sum_adj(simplified_ ? a : at));
  }
  return hermitized(out);
}

const std::vector<Matrix>& KrausMap::kraus_operators() const {
  if (!kraus_.empty()) return kraus_;
  const double sdt = std::sqrt(dt_);
  const int nv = num_jumps();
  if (order_ == 1) {
    kraus_.push_back(p_inv_);
    for (int j = 0; j < nv; ++j) kraus_.push_back(sdt * (p_inv_ * ops_.V[j]));
  } else {
    kraus_.push_back(p_inv_ * q_);
    for (int j = 0; j < nv; ++j) kraus_.push_back(sdt * (p_inv_ * ops_.V[j] * q_));
    for (int j1 = 0; j1 < nv; ++j1) {
      for (int j2 = 0; j2 < nv; ++j2) {
        const Matrix prod = ops_.V[j1] * ops_.V[j2];
        if (simplified_) {
          kraus_.push_back((kInvSqrt2 * dt_) * prod);
        } else {
          kraus_.push_back((kInvSqrt2 * dt_) * (p_inv_ * prod));
        }
      }
    }
  }
  return kraus_;
}

double KrausMap::tp_defect() const {
  const auto& f = kraus_operators();
  const int d = dim();
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& fj : f) sum.noalias() += fj.adjoint() * fj;
  sum -= Matrix::Identity(d, d);
  sum = hermitized(sum);
  Eigen::SelfAdjointEigenSolver<Matrix> es(sum, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double KrausMap::spectral_radius_f0() const {
  const Matrix f0 = order_ == 1 ? p_inv_ : Matrix(p_inv_ * q_);
  Eigen::ComplexEigenSolver<Matrix> es(f0, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

KrausStepCache KrausMap::step_cache(const Matrix& rho) const {
  KrausStepCache cache;
  if (order_ == 2) {
    cache.T = rho * q_.adjoint();
    cache.S = q_ * cache.T;
    cache.W = conj_sum(rho);
    cache.filled = true;
  }
  return cache;
}

// ---------------------------------------------------------------------------

KrausDerivative::KrausDerivative(const KrausMap& map, OperatorDerivative d)
    : map_(&map), d_(std::move(d)) {}

Matrix KrausDerivative::mul_dg(const Matrix& x) const {
  if (d_.has_local && map_->ops().structured()) {
    return local_sum_mul_left(d_.dG_local, x, map_->ops().num_qubits);
  }
  return d_.dG * x;
}

// Z = sum_j dF_j rho F_j^dag, returned as Z + Z^dag. The assembly groups the
// common factor dP^-1 = P^-1 (c dt dG) P^-1 of every dF_j, so the dense work
// per call stays at a handful of d x d products:
//   order 1: Z = dt P^-1 dG K[rho] + dt P^-1 [sum_j dV_j rho V_j^dag] P^-dag
//   order 2: Z = dt/2 P^-1 dG K[rho]
//            + P^-1 [ dt/2 dG T + dt sum_j dV_j S V_j^dag
//                     + dt^2/2 sum_j V_j (dG T) V_j^dag
//                     + dt^2/2 (sum_j1 dV_j1 W V_j1^dag + sum_j1 V_j1 O V_j1^dag) ] P^-dag
// with T = rho Q^dag, S = Q rho Q^dag, W = sum_j V_j rho V_j^dag and
// O = sum_j2 dV_j2 rho V_j2^dag. In the simplified order-2 form the
// double-jump contributions lose their resolvent prefactor.
Matrix KrausDerivative::apply(const Matrix& rho, const Matrix* rho_next,
                              const KrausStepCache* cache) const {
  const KrausMap& map = *map_;
  const LindbladOperators& ops = map.ops();
  const bool structured = ops.structured() && d_.has_local;
  const int nq = ops.num_qubits;
  const double dt = map.dt();
  const int d = map.dim();
  const Matrix& pinv = map.p_inv();

  Matrix next;
  if (rho_next == nullptr) {
    next = map.apply(rho);
    rho_next = &next;
  }

  // sum_j dV_j X V_j^dag for the sparse dV list
  const auto dv_conj = [&](const Matrix& x) {
    Matrix out = Matrix::Zero(d, d);
    if (structured) {
      for (const auto& [j, dv] : d_.dV_local) {
        Matrix term = dv.mul_left(x, nq);
        const auto vadj = ops.local_jumps[j].adjointed();
        for (const auto& f : vadj.factors) site_apply_right(term, f.site, f.block, nq);
        out += vadj.coeff * term;
      }
    } else {
      for (const auto& [j, dv] : d_.dV) out.noalias() += dv * x * ops.V[j].adjoint();
    }
    return out;
  };
  // sum_j V_j X V_j^dag restricted to the jumps present in the dV list is not
  // needed; the full conjugation sum comes from the map.

  Matrix z;
  if (map.order() == 1) {
    z.noalias() = dt * (pinv * mul_dg(*rho_next));
    if (!d_.dV_local.empty() || !d_.dV.empty()) {
      z.noalias() += dt * (pinv * dv_conj(rho) * pinv.adjoint());
    }
  } else {
    Matrix t, s, w;
    if (cache != nullptr && cache->filled) {
      t = cache->T;
      s = cache->S;
      w = cache->W;
    } else {
      t = rho * map.q().adjoint();
      s = map.q() * t;
      w = map.conj_sum(rho);
    }
    const bool has_dv = !d_.dV_local.empty() || !d_.dV.empty();

    const Matrix dg_t = mul_dg(t);
    Matrix bracket = (0.5 * dt) * dg_t;
    bracket += (0.5 * dt * dt) * map.conj_sum(dg_t);
    if (has_dv) {
      bracket += dt * dv_conj(s);
    }

    Matrix doubles;
    if (has_dv) {
      const Matrix omega = dv_conj(rho);
      doubles = (0.5 * dt * dt) * (dv_conj(w) +
                                   // dv_conj uses dV on the left; the second
                                   // double-jump term carries V on the outside
                                   map.conj_sum(omega));
    }

    if (map.simplified()) {
      // the double-jump operators carry no resolvent in the simplified form
      const Matrix k1 = *rho_next - (0.5 * dt * dt) * map.conj_sum(w);
      z.noalias() = (0.5 * dt) * (pinv * mul_dg(k1));
      z.noalias() += pinv * bracket * pinv.adjoint();
      if (has_dv) z += doubles;
    } else {
      z.noalias() = (0.5 * dt) * (pinv * mul_dg(*rho_next));
      if (has_dv) bracket += doubles;
      z.noalias() += pinv * bracket * pinv.adjoint();
    }
  }
  return z + z.adjoint();
}

std::vector<Matrix> KrausDerivative::kraus_operators() const {
  const KrausMap& map = *map_;
  const LindbladOperators& ops = map.ops();
  const double dt = map.dt();
  const double sdt = std::sqrt(dt);
  const int nv = map.num_jumps();
  const int d = map.dim();
  const Matrix& pinv = map.p_inv();

  std::vector<Matrix> dv_full(nv, Matrix::Zero(d, d));
  for (const auto& [j, dv] : d_.dV) dv_full[j] = dv;

  std::vector<Matrix> out;
  const auto& f = map.kraus_operators();
  if (map.order() == 1) {
    const Matrix df0 = dt * (pinv * d_.dG * pinv);
    out.push_back(df0);
    for (int j = 0; j < nv; ++j) {
      out.push_back(sdt * (df0 * ops.V[j]) + sdt * (pinv * dv_full[j]));
    }
  } else {
    const Matrix half_dg = (0.5 * dt) * (pinv * d_.dG);
    out.push_back(half_dg * (f[0] + Matrix::Identity(d, d)));
    for (int j = 0; j < nv; ++j) {
      Matrix dfj = half_dg * f[1 + j];
      dfj.noalias() += sdt * (pinv * dv_full[j] * map.q());
      dfj.noalias() += (0.5 * dt * sdt) * (pinv * ops.V[j] * d_.dG);
      out.push_back(dfj);
    }
    for (int j1 = 0; j1 < nv; ++j1) {
      for (int j2 = 0; j2 < nv; ++j2) {
        Matrix prod = dv_full[j1] * ops.V[j2] + ops.V[j1] * dv_full[j2];
        if (map.simplified()) {
          out.push_back((kInvSqrt2 * dt) * prod);
        } else {
          const int idx = 1 + nv + j1 * nv + j2;
          out.push_back(half_dg * f[idx] + (kInvSqrt2 * dt) * (pinv * prod));
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Trajectory evolve_trajectory(const KrausMap& map, const Matrix& rho0, int steps,
                             int record_stride, bool renormalize) {
  if (steps < 0) throw std::invalid_argument("steps must be non-negative");
  if (record_stride < 1) throw std::invalid_argument("record stride must be >= 1");
  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(rho0);
  Matrix rho = rho0;
  for (int m = 1; m <= steps; ++m) {
    rho = map.apply(rho);
    if (renormalize) rho /= rho.trace().real();
    if (m % record_stride == 0) {
      traj.times.push_back(m * map.dt());
      traj.states.push_back(rho);
    }
  }
  return traj;
}

Eigen::MatrixXd evolve_expectations(const KrausMap& map, const Matrix& rho0,
                                    const std::vector<Observable>& observables,
                                    int num_times, int stride, int start_steps,
                                    bool renormalize) {
  if (num_times < 1) throw std::invalid_argument("num_times must be >= 1");
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  if (start_steps < 0) throw std::invalid_argument("start_steps must be >= 0");
  const int n_obs = static_cast<int>(observables.size());
  Eigen::MatrixXd y(n_obs, num_times);
  Matrix rho = rho0;
  for (int m = 0; m < start_steps; ++m) {
    rho = map.apply(rho);
    if (renormalize) rho /= rho.trace().real();
  }
  for (int n = 1; n <= num_times; ++n) {
    for (int s = 0; s < stride; ++s) {
      rho = map.apply(rho);
      if (renormalize) rho /= rho.trace().real();
    }
    for (int k = 0; k < n_obs; ++k) y(k, n - 1) = expectation(observables[k], rho);
  }
  return y;
}

double ehrenfest_residual(const LindbladOperators& ops, const Trajectory& traj,
                          const Matrix& a) {
  const std::size_t m = traj.states.size();
  if (m < 3) throw std::invalid_argument("ehrenfest_residual: need at least 3 recorded states");
  const double h = traj.times[1] - traj.times[0];
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < m; ++i) {
    const double lhs =
        (expectation(a, traj.states[i + 1]) - expectation(a, traj.states[i - 1])) / (2.0 * h);
    const double rhs = expectation(a, lindblad_rhs(ops, traj.states[i]));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

}  // namespace qmelearn
