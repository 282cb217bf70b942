// Test-side oracles, independent of the library's production code paths:
// Gauss-Hermite quadrature over the Gaussian noise of the first-order SSE
// step, the literal objective-derivative double sum, and small random-input
// helpers shared across suites.

#pragma once

#include "qmelearn/learning.hpp"
#include "qmelearn/sse.hpp"

#include <random>
#include <vector>

namespace qmelearn::testing {

inline Matrix random_matrix(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> unit(0.0, 1.0);
  Matrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = Complex(unit(rng), unit(rng));
  return m;
}

inline Matrix random_hermitian(int d, std::mt19937_64& rng) {
  return hermitized(random_matrix(d, rng));
}

inline Matrix random_density(int d, std::mt19937_64& rng) {
  const Matrix m = random_matrix(d, rng);
  Matrix rho = m * m.adjoint();
  rho /= rho.trace().real();
  return rho;
}

inline Vector random_state(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> unit(0.0, 1.0);
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = Complex(unit(rng), unit(rng));
  return v / v.norm();
}

// E[|psi_1><psi_1|] of the first-order SSE step under a single Gaussian
// increment dW ~ N(0, dt), by Gauss-Hermite quadrature. The integrand is
// quadratic in dW, so any node count >= 2 integrates it exactly; several
// nodes are used anyway as a safeguard against that very assumption.
inline Matrix gauss_hermite_one_step(const Vector& psi0, const LindbladOperators& ops,
                                     double dt) {
  if (ops.V.size() != 1) {
    throw std::invalid_argument("quadrature oracle supports a single jump operator");
  }
  // 5-node Gauss-Hermite rule for weight exp(-x^2)
  const double nodes[5] = {-2.0201828704560856, -0.9585724646138185, 0.0,
                           0.9585724646138185, 2.0201828704560856};
  const double weights[5] = {0.019953242059045913, 0.39361932315224116, 0.9453087204829419,
                             0.39361932315224116, 0.019953242059045913};
  const double sqrt_pi = std::sqrt(std::acos(-1.0));

  const SseIntegrator integrator(ops, dt, 1);
  const int d = static_cast<int>(psi0.size());
  Matrix sum = Matrix::Zero(d, d);
  NoiseDraw noise;
  noise.dW.resize(1);
  for (int i = 0; i < 5; ++i) {
    // dW = sqrt(2 dt) x maps the N(0, dt) density onto the GH weight
    noise.dW(0) = std::sqrt(2.0 * dt) * nodes[i];
    const Vector psi = integrator.step(psi0, noise);
    sum += (weights[i] / sqrt_pi) * (psi * psi.adjoint());
  }
  return sum;
}

// The objective derivative evaluated exactly as stated: for every
// measurement (k, n) and every l = 1..nL, the inner product of the
// derivative map's adjoint acting on the (l-1)-times back-propagated
// observable with the stored forward state.
inline Eigen::VectorXd literal_gradient(const ModelSpec& spec, const MeasurementDataset& data,
                                        const SimOptions& sim, const Eigen::VectorXd& theta) {
  const LindbladOperators ops = build_operators(spec, theta);
  const KrausMap map = sim.order == 1 ? KrausMap::first_order(ops, sim.dt)
                                      : KrausMap::second_order(ops, sim.dt, sim.simplified);
  const int stride = static_cast<int>(std::lround(data.delta_t / sim.dt));
  const int start = static_cast<int>(std::lround(data.t_start / sim.dt));
  const int total = start + stride * data.num_times;

  std::vector<Matrix> states = {data.rho0};
  for (int m = 1; m <= total; ++m) states.push_back(map.apply(states.back()));

  const int n_obs = data.num_observables();
  Eigen::MatrixXd expectations(n_obs, data.num_times);
  for (int n = 1; n <= data.num_times; ++n)
    for (int k = 0; k < n_obs; ++k)
      expectations(k, n - 1) = expectation(data.observables[k], states[start + n * stride]);

  const int np = spec.size();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(np);
  for (int a = 0; a < np; ++a) {
    const KrausDerivative deriv(map, operator_derivative(spec, theta, a));
    const auto df = deriv.kraus_operators();
    const auto& f = map.kraus_operators();
    double sum = 0.0;
    for (int k = 0; k < n_obs; ++k) {
      for (int n = 1; n <= data.num_times; ++n) {
        const double r = expectations(k, n - 1) - data.values(k, n - 1);
        const int mn = start + n * stride;
        Matrix back = data.observables[k].op;  // (K*)^(l-1) A, starting at l = 1
        for (int l = 1; l <= mn; ++l) {
          // (d K)* applied to the back-propagated observable
          Matrix dk_adj = Matrix::Zero(back.rows(), back.cols());
          for (std::size_t j = 0; j < f.size(); ++j) {
            dk_adj += df[j].adjoint() * back * f[j] + f[j].adjoint() * back * df[j];
          }
          sum += r * expectation(dk_adj, states[mn - l]);
          if (l < mn) back = map.apply_adjoint(back);
        }
      }
    }
    grad(a) = sum / (static_cast<double>(n_obs) * data.num_times);
  }
  return grad;
}

}  // namespace qmelearn::testing
