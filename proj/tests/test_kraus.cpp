#include "qmelearn/harness.hpp"
#include "qmelearn/kraus.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <random>

using namespace qmelearn;
using qmelearn::testing::random_density;
using qmelearn::testing::random_hermitian;
using qmelearn::testing::random_matrix;

namespace {

LindbladOperators dephasing_model(double lambda) {
  ModelSpec spec;
  spec.family = ModelFamily::linear_dissipator;
  spec.num_qubits = 1;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(spec.size());
  theta(spec.hamiltonian_size() + 1) = std::sqrt(lambda);
  return build_operators(spec, theta);
}

LindbladOperators family_model(ModelFamily family, int n, std::uint64_t seed) {
  ModelSpec spec;
  spec.family = family;
  spec.num_qubits = n;
  return build_operators(spec, random_true_model(seed, spec));
}

// literal Kraus-sum application, the reference for the structured fast paths
Matrix apply_via_list(const KrausMap& map, const Matrix& rho) {
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (const auto& f : map.kraus_operators()) out += f * rho * f.adjoint();
  return hermitized(out);
}

Matrix adjoint_via_list(const KrausMap& map, const Matrix& a) {
  Matrix out = Matrix::Zero(a.rows(), a.cols());
  for (const auto& f : map.kraus_operators()) out += f.adjoint() * a * f;
  return hermitized(out);
}

}  // namespace

TEST_SUITE_BEGIN("propagator");

TEST_CASE("trivial channels") {
  // H = 0, V = 0: the map is the identity
  const LindbladOperators zero =
      LindbladOperators::from_parts(Matrix::Zero(4, 4), {});
  const KrausMap map1 = KrausMap::first_order(zero, 0.01);
  CHECK(map1.kraus_operators().size() == 1);
  auto rng = std::mt19937_64(2);
  const Matrix rho = random_density(4, rng);
  CHECK((map1.apply(rho) - rho).norm() < 1e-14);

  // unitary channel keeps the maximally mixed state fixed
  const LindbladOperators coherent =
      LindbladOperators::from_parts(random_hermitian(4, rng), {});
  const Matrix mixed = 0.25 * Matrix::Identity(4, 4);
  CHECK((KrausMap::second_order(coherent, 0.05).apply(mixed) - mixed).norm() < 1e-13);
  // the first-order resolvent is unital only up to its O(dt^2) defect
  const double defect1 = KrausMap::first_order(coherent, 0.05).tp_defect();
  CHECK((KrausMap::first_order(coherent, 0.05).apply(mixed) - mixed).norm() <
        2.0 * defect1);
}

TEST_CASE("structured application matches the kraus operator list") {
  auto rng = std::mt19937_64(77);
  std::vector<LindbladOperators> models = {
      family_model(ModelFamily::linear_dissipator, 2, 1),
      family_model(ModelFamily::pauli_jump, 2, 2),
  };
  // a generic dense model exercises the fallback path
  models.push_back(LindbladOperators::from_parts(
      random_hermitian(4, rng), {0.4 * random_matrix(4, rng), 0.3 * random_matrix(4, rng)}));

  for (const auto& ops : models) {
    const Matrix rho = random_density(ops.dim(), rng);
    const Matrix a = random_hermitian(ops.dim(), rng);
    for (const bool simplified : {false, true}) {
      const KrausMap map2 = KrausMap::second_order(ops, 0.03, simplified);
      CHECK((map2.apply(rho) - apply_via_list(map2, rho)).norm() < 1e-13);
      CHECK((map2.apply_adjoint(a) - adjoint_via_list(map2, a)).norm() < 1e-12);
    }
    const KrausMap map1 = KrausMap::first_order(ops, 0.03);
    CHECK((map1.apply(rho) - apply_via_list(map1, rho)).norm() < 1e-13);
    CHECK((map1.apply_adjoint(a) - adjoint_via_list(map1, a)).norm() < 1e-12);
  }
}

TEST_CASE("adjoint pairing") {
  auto rng = std::mt19937_64(6);
  const auto ops = family_model(ModelFamily::pauli_jump, 2, 5);
  const Matrix rho = random_density(4, rng);
  const Matrix a = random_hermitian(4, rng);
  for (int order : {1, 2}) {
    const KrausMap map = order == 1 ? KrausMap::first_order(ops, 0.02)
                                    : KrausMap::second_order(ops, 0.02);
    CHECK(expectation(map.apply_adjoint(a), rho) ==
          doctest::Approx(expectation(a, map.apply(rho))).epsilon(1e-12));
    // identity observable maps to sum F^dag F = I up to the TP defect
    const Matrix id_image = map.apply_adjoint(Matrix::Identity(4, 4));
    CHECK((id_image - Matrix::Identity(4, 4)).norm() <= 4.1 * map.tp_defect());
  }

  // pure unitary case: Heisenberg evolution reproduces Schroedinger values
  const LindbladOperators coherent =
      LindbladOperators::from_parts(random_hermitian(4, rng), {});
  const KrausMap umap = KrausMap::second_order(coherent, 0.05);
  Matrix state = rho;
  Matrix heis = a;
  for (int m = 0; m < 20; ++m) {
    state = umap.apply(state);
    heis = umap.apply_adjoint(heis);
  }
  CHECK(expectation(heis, rho) == doctest::Approx(expectation(a, state)).epsilon(1e-10));
  // F0 of the coherent second-order map is a Cayley transform: exactly unitary
  const Matrix f0 = umap.kraus_operators()[0];
  CHECK((f0.adjoint() * f0 - Matrix::Identity(4, 4)).norm() < 1e-12);
}

TEST_CASE("dephasing decay against the analytic rate") {
  const double lambda = 0.5;
  const auto ops = dephasing_model(lambda);
  Matrix plus = Matrix::Zero(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;  // <sigma^x> = 1
  const Matrix sx = embed_local(pauli(kAxisX), 0, 1);
  const double target = std::exp(-2.0 * lambda * 1.0);

  Matrix rho = plus;
  const KrausMap map1 = KrausMap::first_order(ops, 1e-3);
  for (int m = 0; m < 1000; ++m) rho = map1.apply(rho);
  CHECK(std::abs(expectation(sx, rho) - target) / target < 2e-3);

  rho = plus;
  const KrausMap map2 = KrausMap::second_order(ops, 1e-2);
  for (int m = 0; m < 100; ++m) rho = map2.apply(rho);
  CHECK(std::abs(expectation(sx, rho) - target) / target < 1e-3);
}

TEST_CASE("trace preservation defect scaling") {
  const auto ops = family_model(ModelFamily::linear_dissipator, 2, 42);
  for (int order : {1, 2}) {
    const auto defect_at = [&](double dt) {
      return order == 1 ? KrausMap::first_order(ops, dt).tp_defect()
                        : KrausMap::second_order(ops, dt).tp_defect();
    };
    const double ratio = defect_at(0.02) / defect_at(0.01);
    const double target = order == 1 ? 4.0 : 8.0;
    CHECK(ratio > 0.7 * target);
    CHECK(ratio < 1.3 * target);
  }

  // coherent second-order map is exactly trace preserving (Cayley unitarity)
  auto rng = std::mt19937_64(1);
  const LindbladOperators coherent =
      LindbladOperators::from_parts(random_hermitian(4, rng), {});
  CHECK(KrausMap::second_order(coherent, 0.05).tp_defect() < 1e-12);
}

TEST_CASE("stability of the resolvent propagator") {
  auto rng = std::mt19937_64(14);
  for (const double scale : {1.0, 1e2, 1e3}) {
    const Matrix h = scale * random_hermitian(4, rng);
    const LindbladOperators ops =
        LindbladOperators::from_parts(h, {0.5 * random_matrix(4, rng)});
    CHECK(KrausMap::first_order(ops, 0.1).spectral_radius_f0() <= 1.0 + 1e-12);
    CHECK(KrausMap::second_order(ops, 0.1).spectral_radius_f0() <= 1.0 + 1e-12);
  }
}

TEST_CASE("positivity and trace drift over many steps") {
  const auto ops = family_model(ModelFamily::linear_dissipator, 2, 8);
  auto rng = std::mt19937_64(30);
  const Matrix rho0 = random_density(4, rng);
  const KrausMap map = KrausMap::second_order(ops, 0.01);
  Matrix rho = rho0;
  for (int m = 0; m < 100; ++m) {
    rho = map.apply(rho);
    CHECK(hermiticity_defect(rho) == 0.0);  // exact by construction
  }
  CHECK(min_eigenvalue_hermitian(rho) >= -1e-10);
  // one application drifts the trace by at most the map defect; a run of
  // n steps accumulates it linearly
  CHECK(std::abs(map.apply(rho0).trace().real() - 1.0) <= map.tp_defect());
  CHECK(std::abs(rho.trace().real() - 1.0) < 3.0 * 100.0 * map.tp_defect());

  // a mild-dissipation draw keeps a single step inside 1e-6
  const auto mild = family_model(ModelFamily::linear_dissipator, 2, 102);
  const KrausMap mild_map = KrausMap::second_order(mild, 0.01);
  CHECK(std::abs(mild_map.apply(rho0).trace().real() - 1.0) <= 1e-6);
}

TEST_CASE("simplified and full second-order maps differ at third order") {
  const auto ops = family_model(ModelFamily::pauli_jump, 2, 3);
  auto rng = std::mt19937_64(4);
  const Matrix rho = random_density(4, rng);
  const auto diff_at = [&](double dt) {
    return (KrausMap::second_order(ops, dt, false).apply(rho) -
            KrausMap::second_order(ops, dt, true).apply(rho))
        .norm();
  };
  const double d1 = diff_at(1e-2);
  const double d2 = diff_at(5e-3);
  CHECK(d1 / d2 == doctest::Approx(8.0).epsilon(0.25));
}

TEST_CASE("derivative map consistency") {
  for (const auto family : {ModelFamily::linear_dissipator, ModelFamily::pauli_jump}) {
    ModelSpec spec;
    spec.family = family;
    spec.num_qubits = 2;
    const Eigen::VectorXd theta = random_true_model(19, spec);
    const auto ops = build_operators(spec, theta);
    auto rng = std::mt19937_64(40);
    const Matrix rho = random_density(4, rng);

    for (const int order : {1, 2}) {
      for (const bool simplified : {false, true}) {
        if (order == 1 && simplified) continue;
        const KrausMap map = order == 1 ? KrausMap::first_order(ops, 0.02)
                                        : KrausMap::second_order(ops, 0.02, simplified);
        const auto& f = map.kraus_operators();
        for (const int alpha : {0, 4, spec.hamiltonian_size(), spec.size() - 1}) {
          const KrausDerivative deriv(map, operator_derivative(spec, theta, alpha));
          const auto df = deriv.kraus_operators();
          REQUIRE(df.size() == f.size());

          // structured application equals the literal operator-list sum
          Matrix literal = Matrix::Zero(4, 4);
          for (std::size_t j = 0; j < f.size(); ++j) {
            literal += df[j] * rho * f[j].adjoint() + f[j] * rho * df[j].adjoint();
          }
          CHECK((deriv.apply(rho) - literal).norm() < 1e-12);

          // dF matches central differences of the map builder
          const auto map_at = [&](double shift) {
            Eigen::VectorXd th = theta;
            th(alpha) += shift;
            const auto o = build_operators(spec, th);
            return order == 1 ? KrausMap::first_order(o, 0.02)
                              : KrausMap::second_order(o, 0.02, simplified);
          };
          const double h = 1e-5;
          const auto fp = map_at(h).kraus_operators();
          const auto fm = map_at(-h).kraus_operators();
          double worst = 0.0;
          for (std::size_t j = 0; j < f.size(); ++j) {
            worst = std::max(worst, ((fp[j] - fm[j]) / (2.0 * h) - df[j]).norm());
          }
          CHECK(worst < 5e-9);
        }
      }
    }
  }

  // a vanishing operator derivative produces a vanishing map derivative
  const auto ops = family_model(ModelFamily::pauli_jump, 1, 2);
  const KrausMap map = KrausMap::second_order(ops, 0.05);
  OperatorDerivative zero;
  zero.dH = Matrix::Zero(2, 2);
  zero.dG = Matrix::Zero(2, 2);
  const KrausDerivative dzero(map, zero);
  auto rng = std::mt19937_64(3);
  CHECK(dzero.apply(random_density(2, rng)).norm() < 1e-15);
  for (const auto& df : dzero.kraus_operators()) CHECK(df.norm() == 0.0);
}

TEST_CASE("second-order derivative against a closed form") {
  // coherent single qubit: dF0 = dt/2 (I - G dt/2)^-1 (-i sigma) (F0 + I)
  ModelSpec spec;
  spec.family = ModelFamily::linear_dissipator;
  spec.num_qubits = 1;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(spec.size());
  theta(0) = 0.3;  // e_(1,x)
  const auto ops = build_operators(spec, theta);
  const double dt = 0.05;
  const KrausMap map = KrausMap::second_order(ops, dt);
  const KrausDerivative deriv(map, operator_derivative(spec, theta, 2));  // e_(1,z)

  const Matrix pinv = LuFactorization(
      Matrix(Matrix::Identity(2, 2) - 0.5 * dt * ops.G)).inverse();
  const Matrix f0 = map.kraus_operators()[0];
  const Matrix expected = 0.5 * dt * pinv * (Complex(0, -1) * pauli(kAxisZ)) *
                          (f0 + Matrix::Identity(2, 2));
  CHECK((deriv.kraus_operators()[0] - expected).norm() < 1e-13);
}

TEST_CASE("expectation evolution") {
  const LindbladOperators zero = LindbladOperators::from_parts(Matrix::Zero(4, 4), {});
  const KrausMap map = KrausMap::second_order(zero, 0.01);
  const auto obs = observable_basis(ObservableSet::one_local, 2);
  const Eigen::MatrixXd y = evolve_expectations(map, all_up_state(2), obs, 10, 10);
  CHECK(y.rows() == 7);
  CHECK(y.cols() == 10);
  for (int n = 1; n < y.cols(); ++n) CHECK((y.col(n) - y.col(0)).norm() < 1e-14);

  CHECK_THROWS_AS(evolve_expectations(map, all_up_state(2), obs, 0, 10),
                  std::invalid_argument);
}

TEST_CASE("ehrenfest residual") {
  // commuting observable: both sides vanish
  const LindbladOperators zcoherent =
      LindbladOperators::from_parts(embed_local(pauli(kAxisZ), 0, 1), {});
  const KrausMap zmap = KrausMap::second_order(zcoherent, 1e-3);
  Matrix rho0 = Matrix::Zero(2, 2);
  rho0 << 0.7, Complex(0.2, 0.1), Complex(0.2, -0.1), 0.3;
  const Trajectory ztraj = evolve_trajectory(zmap, rho0, 200);
  CHECK(ehrenfest_residual(zcoherent, ztraj, embed_local(pauli(kAxisZ), 0, 1)) < 1e-8);

  // dephasing: the rate equation is recovered to O(dt^2)
  const auto ops = dephasing_model(0.5);
  const KrausMap map = KrausMap::second_order(ops, 1e-3);
  Matrix plus = Matrix::Zero(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  const Trajectory traj = evolve_trajectory(map, plus, 300);
  CHECK(ehrenfest_residual(ops, traj, embed_local(pauli(kAxisX), 0, 1)) < 1e-5);

  Trajectory tiny;
  tiny.times = {0.0, 1e-3};
  tiny.states = {plus, plus};
  CHECK_THROWS_AS(ehrenfest_residual(ops, tiny, plus), std::invalid_argument);
}

TEST_SUITE_END();
