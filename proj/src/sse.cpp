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

#include "qmelearn/sse.hpp"

#include "qmelearn/rng.hpp"

#include <cmath>

namespace qmelearn {

SseIntegrator::SseIntegrator(const LindbladOperators& ops, double dt, int order)
    : ops_(ops), dt_(dt), order_(order) {
  if (dt <= 0.0) throw std::invalid_argument("step size must be positive");
  if (order != 1 && order != 2) throw std::invalid_argument("order must be 1 or 2");
  const int d = ops.dim();
  const Matrix eye = Matrix::Identity(d, d);
  const double scale = order == 1 ? dt : 0.5 * dt;
  LuFactorization lu(eye - scale * ops.G);
  p_inv_ = lu.inverse();
}

Vector SseIntegrator::apply_jump(int j, const Vector& psi) const {
  if (ops_.structured()) return ops_.local_jumps[j].mul_vec(psi, ops_.num_qubits);
  return ops_.V[j] * psi;
}

Vector SseIntegrator::step(const Vector& psi, const NoiseDraw& noise) const {
  const int nv = num_jumps();
  if (noise.dW.size() != nv) throw std::invalid_argument("noise draw has wrong jump count");
  if (order_ == 1) {
    Vector acc = psi;
    for (int j = 0; j < nv; ++j) {
      if (noise.dW(j) != 0.0) acc += noise.dW(j) * apply_jump(j, psi);
    }
    return p_inv_ * acc;
  }
  // order 2: drift and single-noise terms act on Q psi, double terms on psi
  Vector w = psi + (0.5 * dt_) * (ops_.G * psi);
  Vector acc = w;
  for (int j = 0; j < nv; ++j) {
    if (noise.dW(j) != 0.0) acc += noise.dW(j) * apply_jump(j, w);
  }
  if (nv > 0) {
    std::vector<Vector> u(nv);
    for (int j = 0; j < nv; ++j) u[j] = apply_jump(j, psi);
    for (int j2 = 0; j2 < nv; ++j2) {
      Vector z = Vector::Zero(psi.size());
      bool any = false;
      for (int j1 = 0; j1 < nv; ++j1) {
        const double kappa = 0.5 * (noise.dW(j1) * noise.dW(j2) + noise.U(j1, j2));
        if (kappa != 0.0) {
          z += kappa * u[j1];
          any = true;
        }
      }
      if (any) acc += apply_jump(j2, z);
    }
  }
  return p_inv_ * acc;
}

NoiseDraw SseIntegrator::sample_noise(std::mt19937_64& rng) const {
  const int nv = num_jumps();
  NoiseDraw noise;
  noise.dW.resize(nv);
  if (order_ == 1) {
    std::normal_distribution<double> gauss(0.0, std::sqrt(dt_));
    for (int j = 0; j < nv; ++j) noise.dW(j) = gauss(rng);
    return noise;
  }
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double a = std::sqrt(3.0 * dt_);
  for (int j = 0; j < nv; ++j) {
    const double u = uniform(rng);
    noise.dW(j) = u < 1.0 / 6.0 ? -a : (u < 1.0 / 3.0 ? a : 0.0);
  }
  noise.U = Eigen::MatrixXd::Zero(nv, nv);
  for (int j1 = 0; j1 < nv; ++j1) {
    noise.U(j1, j1) = -dt_;
    for (int j2 = 0; j2 < j1; ++j2) {
      const double u = uniform(rng) < 0.5 ? dt_ : -dt_;
      noise.U(j1, j2) = u;
      noise.U(j2, j1) = -u;
    }
  }
  return noise;
}

McDensityResult mc_density(const Vector& psi0, const LindbladOperators& ops, double dt,
                           int steps, long num_trajectories, int order, std::uint64_t seed) {
  if (num_trajectories < 2) throw std::invalid_argument("need at least 2 trajectories");
  if (steps < 0) throw std::invalid_argument("steps must be non-negative");
  const SseIntegrator integrator(ops, dt, order);
  const int d = static_cast<int>(psi0.size());

  Matrix sum = Matrix::Zero(d, d);
  Eigen::MatrixXd sum_abs2 = Eigen::MatrixXd::Zero(d, d);
  for (long traj = 0; traj < num_trajectories; ++traj) {
    auto rng = seeded_engine(seed, static_cast<std::uint64_t>(traj));
    Vector psi = psi0;
    for (int m = 0; m < steps; ++m) psi = integrator.step(psi, integrator.sample_noise(rng));
    const Matrix outer = psi * psi.adjoint();
    sum += outer;
    sum_abs2 += outer.cwiseAbs2();
  }

  McDensityResult result;
  result.num_trajectories = num_trajectories;
  const double n = static_cast<double>(num_trajectories);
  result.rho = sum / n;
  const Eigen::MatrixXd var =
      ((sum_abs2 - n * result.rho.cwiseAbs2()) / (n - 1.0)).cwiseMax(0.0);
  result.standard_error = (var / n).cwiseSqrt();
  return result;
}

Matrix enumerate_one_step(const Vector& psi0, const LindbladOperators& ops, double dt,
                          int order) {
  const SseIntegrator integrator(ops, dt, order);
  const int nv = integrator.num_jumps();
  if (nv > 3) throw std::invalid_argument("noise support too large to enumerate (num_jumps > 3)");
  const int d = static_cast<int>(psi0.size());
  Matrix sum = Matrix::Zero(d, d);

  if (order == 1) {
    // two-point +-sqrt(dt) substitute: matches the Gaussian first and second
    // moments, which are all that survive the expectation
    const double a = std::sqrt(dt);
    const long combos = 1L << nv;
    const double p = 1.0 / static_cast<double>(combos);
    NoiseDraw noise;
    noise.dW.resize(nv);
    for (long c = 0; c < combos; ++c) {
      for (int j = 0; j < nv; ++j) noise.dW(j) = (c >> j) & 1 ? a : -a;
      const Vector psi = integrator.step(psi0, noise);
      sum += p * (psi * psi.adjoint());
    }
    return sum;
  }

  const double a = std::sqrt(3.0 * dt);
  long w_combos = 1;
  for (int j = 0; j < nv; ++j) w_combos *= 3;
  const int n_pairs = nv * (nv - 1) / 2;
  const long u_combos = 1L << n_pairs;

  NoiseDraw noise;
  noise.dW.resize(nv);
  noise.U.resize(nv, nv);
  for (long wc = 0; wc < w_combos; ++wc) {
    double pw = 1.0;
    long rest = wc;
    for (int j = 0; j < nv; ++j) {
      const int digit = rest % 3;
      rest /= 3;
      if (digit == 0) {
        noise.dW(j) = 0.0;
        pw *= 2.0 / 3.0;
      } else {
        noise.dW(j) = digit == 1 ? a : -a;
        pw *= 1.0 / 6.0;
      }
    }
    for (long uc = 0; uc < u_combos; ++uc) {
      const double p = pw / static_cast<double>(u_combos);
      noise.U.setZero();
      int bit = 0;
      for (int j1 = 0; j1 < nv; ++j1) {
        noise.U(j1, j1) = -dt;
        for (int j2 = 0; j2 < j1; ++j2, ++bit) {
          const double u = (uc >> bit) & 1 ? dt : -dt;
          noise.U(j1, j2) = u;
          noise.U(j2, j1) = -u;
        }
      }
      const Vector psi = integrator.step(psi0, noise);
      sum += p * (psi * psi.adjoint());
    }
  }
  return sum;
}

}  // namespace qmelearn
