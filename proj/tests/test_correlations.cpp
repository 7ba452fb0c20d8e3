#include "doctest.h"

#include <array>
#include <cmath>
#include <random>

#include "spinpair/correlations.hpp"
#include "spinpair/types.hpp"

using namespace spinpair;

namespace {

const std::array<Eigen::Matrix2cd, 4> kPauli = [] {
  std::array<Eigen::Matrix2cd, 4> s;
  s[0] = Eigen::Matrix2cd::Identity();
  s[1] << 0, 1, 1, 0;
  s[2] << 0, cplx(0, -1), cplx(0, 1), 0;
  s[3] << 1, 0, 0, -1;
  return s;
}();

Eigen::Matrix4cd kron2(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd k;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) k.block(2 * i, 2 * j, 2, 2) = a(i, j) * b;
  return k;
}

// Moment state read off a two-qubit density matrix (sigma components).
MomentState moments_of(const Eigen::Matrix4cd& rho) {
  MomentState s;
  for (int a = 0; a < 3; ++a) {
    s.first(a) = (rho * kron2(kPauli[a + 1], kPauli[0])).trace().real();
    s.first(3 + a) = (rho * kron2(kPauli[0], kPauli[a + 1])).trace().real();
    s.second(a, a) = 1.0;
    s.second(3 + a, 3 + a) = 1.0;
    for (int b = 0; b < 3; ++b)
      s.second(a, 3 + b) = (rho * kron2(kPauli[a + 1], kPauli[b + 1])).trace().real();
  }
  return s;
}

Eigen::Matrix4cd random_state(std::mt19937& g) {
  std::normal_distribution<double> n(0, 1);
  Eigen::Matrix4cd A;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) A(i, j) = cplx(n(g), n(g));
  Eigen::Matrix4cd r = A * A.adjoint();
  return r / r.trace();
}

}  // namespace

TEST_SUITE("correlations") {

TEST_CASE("Bell state") {
  Eigen::Vector4cd psi(1, 0, 0, 1);
  psi /= std::sqrt(2.0);
  const TwoSpinState st = reduced_two_spin_state(moments_of(psi * psi.adjoint()));
  CHECK((st.rho12 - psi * psi.adjoint()).norm() < 1e-12);
  CHECK(concurrence(st) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(mutual_information(st) == doctest::Approx(2 * std::log(2.0)).epsilon(1e-10));
  CHECK(!st.clip_applied);
}

TEST_CASE("product states carry no correlation") {
  Eigen::Matrix2cd a, b;
  a << 0.7, cplx(0.1, 0.2), cplx(0.1, -0.2), 0.3;
  b << 0.4, 0.1, 0.1, 0.6;
  const TwoSpinState st = reduced_two_spin_state(moments_of(kron2(a, b)));
  CHECK(std::abs(mutual_information(st)) < 1e-12);
  CHECK(concurrence(st) < 1e-10);
  CHECK((partial_state(st.rho12, 1) - a).norm() < 1e-12);
  CHECK((partial_state(st.rho12, 2) - b).norm() < 1e-12);
}

TEST_CASE("tomography round trip and entropy properties") {
  std::mt19937 g(7);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Matrix4cd rho = random_state(g);
    const TwoSpinState st = reduced_two_spin_state(moments_of(rho));
    CHECK((st.rho12 - rho).norm() < 1e-10);
    const double I = mutual_information(st);
    CHECK(I >= -1e-12);  // subadditivity
    CHECK(I <= 2 * std::log(2.0) + 1e-12);
    const double C = concurrence(st);
    CHECK(C >= 0);
    CHECK(C <= 1 + 1e-12);
  }
}

TEST_CASE("entropy of simple states") {
  CHECK(entropy(Eigen::Matrix2d::Identity() / 2) == doctest::Approx(std::log(2.0)));
  CHECK(entropy(Eigen::Vector2d(1, 0).asDiagonal().toDenseMatrix()) == 0.0);
}

TEST_CASE("Werner-like mixtures cross the separability threshold") {
  Eigen::Vector4cd psi(0, 1, -1, 0);
  psi /= std::sqrt(2.0);
  const Eigen::Matrix4cd singlet = psi * psi.adjoint();
  for (double p : {0.2, 0.3, 0.5, 0.9}) {
    const Eigen::Matrix4cd rho = p * singlet + (1 - p) / 4 * Eigen::Matrix4cd::Identity();
    const double want = std::max(0.0, (3 * p - 1) / 2);
    CHECK(concurrence(reduced_two_spin_state(moments_of(rho))) == doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("positivity repair") {
  MomentState s = moments_of(Eigen::Matrix4cd::Identity() / 4);
  s.second(0, 3) = 1.0 + 4e-7;
  s.second(1, 4) = -1.0;
  s.second(2, 5) = 1.0;
  const TwoSpinState st = reduced_two_spin_state(s);
  CHECK(st.clip_applied);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(st.rho12);
  CHECK(es.eigenvalues().minCoeff() >= 0);
  CHECK(std::abs(st.rho12.trace() - 1.0) < 1e-12);
  s.second(0, 3) = 1.5;
  CHECK_THROWS_AS(reduced_two_spin_state(s), TomographyError);
}

TEST_CASE("macro steady state is separable with small mutual information") {
  const MacroParams p = MacroParams::from_temperatures(1, 3, 0.006, 0.001, 2, 22);
  const TwoSpinState st = reduced_two_spin_state(macro_steady_state(p).state);
  CHECK(concurrence(st) <= 1e-10);
  const double I = mutual_information(st);
  CHECK(I > 0);
  CHECK(I < 1e-2);
}

}
