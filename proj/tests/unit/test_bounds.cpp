#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qcausal/bounds.hpp"
#include "random.hpp"

using namespace qcausal;

TEST_CASE("Lieb-Robinson velocity") {
  const auto unit = lr_velocity(ChainModel{ModelKind::Xx, 8, 1.0, 0.3});
  CHECK(std::abs(unit.v_lr - 10.8731) <= 1e-4);
  CHECK(unit.v_lr == 4 * std::numbers::e);
  CHECK(unit.g == doctest::Approx(2.3));
  CHECK(unit.g_prop == 2.0);

  const auto free = lr_velocity(ChainModel{ModelKind::Tfim, 4, 0.0, 1.0});
  CHECK(free.v_lr == 0.0);
  CHECK(free.g == 1.0);

  const auto mixed = lr_velocity(ChainModel{ModelKind::Tfim, 4, 0.5, 2.0});
  CHECK(mixed.g == 3.0);
  CHECK(mixed.g_prop == 1.0);
  CHECK(mixed.v_lr == doctest::Approx(5.43656).epsilon(1e-6));

  // Sign of the couplings does not matter.
  CHECK(lr_velocity(ChainModel{ModelKind::Xx, 4, -1.0, -0.3}).v_lr == unit.v_lr);
}

TEST_CASE("group velocity") {
  CHECK(xx_group_velocity(1.0) == 2.0);
  CHECK(xx_group_velocity(0.0) == 0.0);
  CHECK(xx_group_velocity(-1.5) == 3.0);

  testing::Random rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    const double J = 5 * rng.normal();
    if (J == 0.0) continue;
    CHECK(xx_group_velocity(J) < lr_velocity(ChainModel{ModelKind::Xx, 4, J, 0.0}).v_lr);
  }
}

TEST_CASE("dispersion") {
  const auto flat = dispersion(0.0, 1.0);
  CHECK(flat.energy == 2.0);
  CHECK(flat.velocity == 0.0);
  const auto steep = dispersion(std::numbers::pi / 2, 1.0);
  CHECK(std::abs(steep.energy) <= 1e-15);
  CHECK(steep.velocity == -2.0);
  CHECK_THROWS_AS(dispersion(4.0, 1.0), Error);
  CHECK_THROWS_AS(dispersion(-3.2, 1.0), Error);
  CHECK_NOTHROW(dispersion(std::numbers::pi, 1.0));

  const double delta = 1e-4;
  testing::Random rng(52);
  for (int trial = 0; trial < 200; ++trial) {
    const double J = 2 * rng.normal();
    const double k = (2 * rng.uniform() - 1) * (std::numbers::pi - delta);
    const double fd = (dispersion(k + delta, J).energy - dispersion(k - delta, J).energy) / (2 * delta);
    CHECK(std::abs(dispersion(k, J).velocity - fd) <= 1e-6);
    CHECK(std::abs(dispersion(k, J).velocity) <= xx_group_velocity(J) + 1e-15);
  }
}

TEST_CASE("operator norm") {
  CHECK(operator_norm(oracle::X()) == doctest::Approx(1.0));
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(3, 3);
  d(0, 0) = 0.5;
  d(1, 1) = std::complex<double>(0, -3);
  CHECK(operator_norm(d) == doctest::Approx(3.0));
}

TEST_CASE("commutator front") {
  const auto H = build_xx(8, 1.0, 0.3);
  const Eigen::MatrixXcd z = oracle::Z();
  CHECK(commutator_front_norm(H, 0, z, 7, z, 0.0) == 0.0);
  CHECK(commutator_front_norm(build_xx(8, 1.0, 2.5), 0, z, 7, z, 0.0) == 0.0);

  const double early = commutator_front_norm(H, 0, z, 7, z, 0.2);
  const double late = commutator_front_norm(H, 0, z, 7, z, 3.0);
  CHECK(early < late);

  CHECK(commutator_front_norm(H, 0, z, 7, z, 0.3) <= commutator_front_norm(H, 0, z, 2, z, 0.3));
  CHECK_THROWS_AS(commutator_front_norm(H, 3, z, 3, z, 1.0), Error);
  CHECK_THROWS_AS(commutator_front_norm(H, 0, z, 8, z, 1.0), Error);

  testing::Random rng(53);
  const auto tfim = build_tfim(5, 1.0, 0.8);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXcd a = rng.gaussian(2, 2), b = rng.gaussian(2, 2);
    const double t = 10 * rng.uniform();
    const double value = commutator_front_norm(tfim, 0, a, 4, b, t);
    CHECK(value <= 2 * operator_norm(a) * operator_norm(b) + 1e-9);
  }
}

TEST_CASE("commutator front matches explicit Heisenberg evolution") {
  const auto H = build_tfim(4, 1.0, 0.6);
  const Eigen::MatrixXcd x = oracle::X(), z = oracle::Z();
  for (double t : {0.4, 1.3}) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(oracle::tfim(4, 1.0, 0.6));
    Eigen::VectorXcd ph(16);
    for (int i = 0; i < 16; ++i) ph(i) = std::polar(1.0, -es.eigenvalues()(i) * t);
    const Eigen::MatrixXcd U = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
    const Eigen::MatrixXcd A = U.adjoint() * oracle::kron_at(x, 1, 4) * U;
    const Eigen::MatrixXcd B = oracle::kron_at(z, 3, 4);
    const Eigen::MatrixXcd comm = A * B - B * A;
    const double expected = Eigen::JacobiSVD<Eigen::MatrixXcd>(comm).singularValues()(0);
    CHECK(std::abs(commutator_front_norm(H, 1, x, 3, z, t) - expected) <= 1e-10);
  }
}
