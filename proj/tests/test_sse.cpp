#include "qmelearn/harness.hpp"
#include "qmelearn/rng.hpp"
#include "qmelearn/sse.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <random>

using namespace qmelearn;
using qmelearn::testing::gauss_hermite_one_step;
using qmelearn::testing::random_state;

namespace {

LindbladOperators family_model(ModelFamily family, int n, std::uint64_t seed) {
  ModelSpec spec;
  spec.family = family;
  spec.num_qubits = n;
  return build_operators(spec, random_true_model(seed, spec));
}

LindbladOperators dephasing_model(double lambda) {
  ModelSpec spec;
  spec.family = ModelFamily::pauli_jump;
  spec.num_qubits = 1;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(spec.size());
  theta(spec.hamiltonian_size() + 2) = std::sqrt(lambda);
  return build_operators(spec, theta);
}

}  // namespace

TEST_SUITE_BEGIN("unraveling");

TEST_CASE("deterministic limits of the steppers") {
  auto rng = std::mt19937_64(12);

  // V = 0: the first-order step is the implicit Euler resolvent
  const LindbladOperators coherent =
      LindbladOperators::from_parts(qmelearn::testing::random_hermitian(4, rng), {});
  const SseIntegrator euler(coherent, 0.02, 1);
  const Vector psi = random_state(4, rng);
  NoiseDraw empty;
  empty.dW.resize(0);
  const Vector advanced = euler.step(psi, empty);
  const Matrix resolvent =
      LuFactorization(Matrix(Matrix::Identity(4, 4) - 0.02 * coherent.G)).inverse();
  CHECK((advanced - resolvent * psi).norm() < 1e-13);

  // H = 0, V^dag V = I with zero noise: a pure contraction by 1/(1 + dt/2)
  const LindbladOperators unit_jump = dephasing_model(1.0);  // V = sigma^z
  const double dt = 0.05;
  const SseIntegrator first(unit_jump, dt, 1);
  NoiseDraw zero1;
  zero1.dW = Eigen::VectorXd::Zero(1);
  const Vector contracted = first.step(psi.head(2), zero1);
  CHECK((contracted - psi.head(2) / (1.0 + 0.5 * dt)).norm() < 1e-14);
  CHECK(contracted.norm() < psi.head(2).norm());

  // V = 0 with zero noise in the second-order scheme: the Cayley transform,
  // norm preserving for Hermitian H
  const SseIntegrator cayley(coherent, 0.05, 2);
  NoiseDraw zero2;
  zero2.dW = Eigen::VectorXd::Zero(0);
  zero2.U = Eigen::MatrixXd::Zero(0, 0);
  const Vector rotated = cayley.step(psi, zero2);
  CHECK(rotated.norm() == doctest::Approx(psi.norm()).epsilon(1e-12));
}

TEST_CASE("three-point noise moments") {
  const LindbladOperators ops = dephasing_model(0.5);
  const double dt = 0.01;
  const SseIntegrator integrator(ops, dt, 2);
  // enumerate the support {-a, 0, +a} with weights {1/6, 2/3, 1/6}
  const double a = std::sqrt(3.0 * dt);
  const double values[3] = {-a, 0.0, a};
  const double probs[3] = {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0};
  double m2 = 0.0, m4 = 0.0, m1 = 0.0, m3 = 0.0;
  for (int i = 0; i < 3; ++i) {
    m1 += probs[i] * values[i];
    m2 += probs[i] * values[i] * values[i];
    m3 += probs[i] * values[i] * values[i] * values[i];
    m4 += probs[i] * values[i] * values[i] * values[i] * values[i];
  }
  CHECK(m1 == doctest::Approx(0.0));
  CHECK(m3 == doctest::Approx(0.0));
  CHECK(m2 == doctest::Approx(dt));
  CHECK(m4 == doctest::Approx(3.0 * dt * dt));

  // the sampler hits exactly that support
  auto rng = seeded_engine(4);
  for (int rep = 0; rep < 50; ++rep) {
    const NoiseDraw draw = integrator.sample_noise(rng);
    const double w = draw.dW(0);
    CHECK((w == 0.0 || std::abs(std::abs(w) - a) < 1e-15));
    CHECK(draw.U(0, 0) == -dt);
  }
}

TEST_CASE("one-step enumeration equals the kraus maps") {
  auto rng = std::mt19937_64(31);
  struct Case {
    ModelFamily family;
    int n;
  };
  for (const auto& c : {Case{ModelFamily::pauli_jump, 1}, Case{ModelFamily::pauli_jump, 2},
                        Case{ModelFamily::pauli_jump, 3},
                        Case{ModelFamily::linear_dissipator, 1}}) {
    const LindbladOperators ops = family_model(c.family, c.n, 50 + c.n);
    const Vector psi0 = random_state(ops.dim(), rng);
    const Matrix rho0 = psi0 * psi0.adjoint();
    const double dt = 0.04;

    const Matrix enum2 = enumerate_one_step(psi0, ops, dt, 2);
    const Matrix kraus2 = KrausMap::second_order(ops, dt, false).apply(rho0);
    CHECK((enum2 - kraus2).norm() < 1e-12);

    // the simplified map agrees only to third order
    const auto simplified_gap = [&](double step) {
      return (KrausMap::second_order(ops, step, false).apply(rho0) -
              KrausMap::second_order(ops, step, true).apply(rho0))
          .norm();
    };
    CHECK(simplified_gap(dt) / simplified_gap(0.5 * dt) ==
          doctest::Approx(8.0).epsilon(0.3));

    const Matrix enum1 = enumerate_one_step(psi0, ops, dt, 1);
    const Matrix kraus1 = KrausMap::first_order(ops, dt).apply(rho0);
    CHECK((enum1 - kraus1).norm() < 1e-12);
  }

  // V = 0: both schemes reduce to deterministic conjugation
  const LindbladOperators coherent = LindbladOperators::from_parts(
      qmelearn::testing::random_hermitian(2, rng), {});
  const Vector psi0 = random_state(2, rng);
  const Matrix rho0 = psi0 * psi0.adjoint();
  CHECK((enumerate_one_step(psi0, coherent, 0.05, 2) -
         KrausMap::second_order(coherent, 0.05).apply(rho0))
            .norm() < 1e-13);
  CHECK((enumerate_one_step(psi0, coherent, 0.05, 1) -
         KrausMap::first_order(coherent, 0.05).apply(rho0))
            .norm() < 1e-13);

  // four jump operators exceed the enumerable support
  const LindbladOperators big = family_model(ModelFamily::linear_dissipator, 2, 3);
  CHECK_THROWS_AS(enumerate_one_step(random_state(4, rng), big, 0.01, 2),
                  std::invalid_argument);
}

TEST_CASE("gaussian noise expectation via quadrature") {
  auto rng = std::mt19937_64(13);
  const LindbladOperators ops = family_model(ModelFamily::pauli_jump, 1, 9);
  const Vector psi0 = random_state(2, rng);
  const double dt = 0.03;
  const Matrix gh = gauss_hermite_one_step(psi0, ops, dt);
  const Matrix kraus = KrausMap::first_order(ops, dt).apply(psi0 * psi0.adjoint());
  CHECK((gh - kraus).norm() < 1e-10);
}

TEST_CASE("monte carlo density estimation") {
  const double lambda = 0.5;
  const LindbladOperators ops = dephasing_model(lambda);
  Vector plus(2);
  plus << 1.0, 1.0;
  plus /= plus.norm();

  // zero steps: exactly the initial projector
  const auto frozen = mc_density(plus, ops, 0.01, 0, 16, 2, 99);
  CHECK((frozen.rho - plus * plus.adjoint()).norm() < 1e-14);
  CHECK(frozen.standard_error.maxCoeff() < 1e-7);

  // identical seeds reproduce bitwise; different seeds do not
  const auto a = mc_density(plus, ops, 0.01, 20, 64, 2, 7);
  const auto b = mc_density(plus, ops, 0.01, 20, 64, 2, 7);
  CHECK((a.rho - b.rho).norm() == 0.0);
  const auto c = mc_density(plus, ops, 0.01, 20, 64, 2, 8);
  CHECK((a.rho - c.rho).norm() > 0.0);

  CHECK_THROWS_AS(mc_density(plus, ops, 0.01, 10, 1, 2, 1), std::invalid_argument);

  // the estimate lands within a CLT band of the analytic dephasing value
  const double t = 0.5;
  const int steps = 50;
  const auto estimate = mc_density(plus, ops, t / steps, steps, 4000, 2, 21);
  const Matrix sx = embed_local(pauli(kAxisX), 0, 1);
  const double target = std::exp(-2.0 * lambda * t);
  const double got = expectation(sx, hermitized(estimate.rho));
  // <sigma^x> = 2 Re rho_01; its standard error follows from the entry's
  const double se = 2.0 * estimate.standard_error(0, 1) + 1e-4;
  CHECK(std::abs(got - target) < 3.0 * se);
}

TEST_SUITE_END();
