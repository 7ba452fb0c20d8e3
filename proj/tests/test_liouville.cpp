#include "doctest.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "spinpair/liouville.hpp"

using namespace spinpair;

namespace {

EngineParams bias10(double Tbar, int N) {
  return EngineParams::from_temperatures(1.0, 10.0, 0.006, 0.001, Tbar - 5.0, Tbar + 5.0, N);
}

// Birth-death chain on the Dicke ladder: p_m proportional to exp(-beta E m).
Eigen::VectorXd gibbs_ladder(int N, double betaE) {
  Eigen::VectorXd p(N + 1);
  for (int k = 0; k <= N; ++k) p[k] = std::exp(-betaE * (0.5 * N - k));
  return p / p.sum();
}

double column_trace(const Eigen::MatrixXcd& M, int d, int col) {
  cplx s = 0;
  for (int i = 0; i < d; ++i) s += M(i + i * d, col);
  return std::abs(s);
}

}  // namespace

TEST_SUITE("liouville") {

TEST_CASE("thermal rates") {
  const Rates a = thermal_rates(0.001, 0.1);
  CHECK(a.n_th == doctest::Approx(9.5083).epsilon(1e-5));
  CHECK(a.n_th == doctest::Approx(1.0 / (std::exp(0.1) - 1.0)).epsilon(1e-14));
  const Rates b = thermal_rates(1.0, std::log(2.0));
  CHECK(b.n_th == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(b.down / b.up == doctest::Approx(2.0).epsilon(1e-14));
  const Rates c = thermal_rates(0.3, 50.0);
  CHECK(c.up < 1e-20);
  CHECK(c.down == doctest::Approx(0.3).epsilon(1e-15));
  for (double x : {0.01, 0.3, 1.0, 4.0, 20.0}) {
    const Rates r = thermal_rates(0.7, x);
    CHECK(r.down / r.up == doctest::Approx(std::exp(x)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(thermal_rates(1.0, 0.0), InvalidParameter);
  CHECK_THROWS_AS(thermal_rates(1.0, -1.0), InvalidParameter);
}

TEST_CASE("parameter validation lists every violation") {
  EngineParams p;
  p.N = 0;
  p.gamma0 = -1;
  p.beta1 = 0.1;
  p.beta2 = 0.5;
  const auto v = p.violations();
  CHECK(v.size() == 3);
  CHECK(std::find(v.begin(), v.end(), "beta1 must be ≥ beta2") != v.end());
  CHECK_THROWS_AS(p.validate(), InvalidParameter);
  CHECK(bias10(11, 1).violations().empty());
}

TEST_CASE("high-temperature scaling") {
  auto p = EngineParams::from_temperatures(1, 2, 0.006, 0.001, 2, 22, 5, Scaling::high_temperature);
  CHECK(p.omega_eff() == doctest::Approx(0.0012));
  CHECK(p.gamma_eff() == doctest::Approx(0.0002));
  CHECK(p.beta_eff(1) == doctest::Approx(0.1));
  CHECK(p.beta_eff(2) == doctest::Approx(1.0 / 110.0));
}

TEST_CASE("superoperator dimensions") {
  CHECK(build(bias10(11, 1)).matrix().rows() == 16);
  CHECK(build(bias10(11, 2)).matrix().rows() == 81);
  auto big = bias10(11, 1);
  big.N = 65;
  CHECK_THROWS_AS(build(big), ResourceError);
}

TEST_CASE("trace preservation of the generator") {
  for (int N : {1, 2, 3}) {
    const auto L = build(bias10(11, N));
    const Eigen::MatrixXcd M = Eigen::MatrixXcd(L.matrix());
    double worst = 0;
    for (int c = 0; c < M.cols(); ++c) worst = std::max(worst, column_trace(M, L.d, c));
    CHECK(worst < 1e-15);
  }
}

TEST_CASE("sectors tile the generator") {
  const auto L = build(bias10(11, 2));
  const Eigen::MatrixXcd M = Eigen::MatrixXcd(L.matrix());
  int covered = 0;
  for (int q = -L.max_charge(); q <= L.max_charge(); ++q) {
    const Sector s = L.sector(q);
    covered += static_cast<int>(s.index.size());
    const Eigen::MatrixXcd S = Eigen::MatrixXcd(s.matrix);
    for (size_t a = 0; a < s.index.size(); ++a)
      for (size_t b = 0; b < s.index.size(); ++b)
        CHECK(std::abs(S(a, b) - M(s.index[a], s.index[b])) < 1e-15);
  }
  CHECK(covered == L.dim());
}

TEST_CASE("undriven steady state is the product of Gibbs ladders") {
  for (int N = 1; N <= 6; ++N) {
    CAPTURE(N);
    EngineParams p = EngineParams::from_temperatures(1.0, 3.0, 0.0, 0.001, 0.8, 5.0, N);
    const auto L = build(p);
    const SteadyState ss = steady_state(L);
    const Eigen::VectorXd p1 = gibbs_ladder(N, p.beta1 * p.E1), p2 = gibbs_ladder(N, p.beta2 * p.E2);
    double err = 0;
    for (int a = 0; a <= N; ++a)
      for (int b = 0; b <= N; ++b)
        for (int c = 0; c <= N; ++c)
          for (int e = 0; e <= N; ++e) {
            const cplx want = (a == c && b == e) ? p1[a] * p2[b] : 0.0;
            err = std::max(err, std::abs(ss.rho(a * (N + 1) + b, c * (N + 1) + e) - want));
          }
    CHECK(err < 1e-12);
  }
}

TEST_CASE("single-ensemble thermal ladder") {
  for (int N = 1; N <= 6; ++N) {
    const auto L = build_single({N, 2.0, 0.01, 0.7, Scaling::none});
    const SteadyState ss = steady_state(L);
    const Eigen::VectorXd want = gibbs_ladder(N, 1.4);
    CHECK((ss.rho.diagonal().real() - want).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((ss.rho - MatC(ss.rho.diagonal().asDiagonal())).norm() < 1e-12);
  }
}

TEST_CASE("steady state invariants and dense/sparse agreement") {
  for (int N = 1; N <= 4; ++N) {
    CAPTURE(N);
    for (double Tbar : {8.0, 11.0}) {
      const auto L = build(bias10(Tbar, N));
      const SteadyState a = steady_state(L, SteadyMethod::sparse_lu);
      CHECK(a.residual < 1e-10);
      CHECK(std::abs(a.rho.trace() - 1.0) < 1e-10);
      CHECK((a.rho - a.rho.adjoint()).norm() < 1e-10);
      Eigen::SelfAdjointEigenSolver<MatC> es(a.rho);
      CHECK(es.eigenvalues().minCoeff() > -1e-8);
      if (L.dim() <= 4096) {
        const SteadyState b = steady_state(L, SteadyMethod::dense_null_space);
        CHECK(trace_distance(a.rho, b.rho) < 1e-8);
      }
    }
  }
}

TEST_CASE("gap of a driven-less two-level system") {
  const SingleParams sp{1, 1.0, 0.01, 0.9, Scaling::none};
  const Rates r = thermal_rates(0.01, 0.9);
  const auto L = build_single(sp);
  CHECK(gap(L) == doctest::Approx((r.up + r.down) / 2).epsilon(1e-10));
  // full spectrum of amplitude damping: 0, -(up+down)/2 (x2), -(up+down)
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(Eigen::MatrixXcd(L.matrix()));
  std::vector<double> re;
  for (int i = 0; i < 4; ++i) re.push_back(es.eigenvalues()[i].real());
  std::sort(re.begin(), re.end());
  CHECK(re[0] == doctest::Approx(-(r.up + r.down)).epsilon(1e-10));
  CHECK(std::abs(re[3]) < 1e-14);
}

TEST_CASE("gap is positive and Arnoldi agrees with dense") {
  const auto L = build(EngineParams::from_temperatures(1, 3, 0.006, 0.001, 2, 22, 3,
                                                       Scaling::high_temperature));
  const double dense = gap(L, 6, 1 << 20);
  const double arnoldi = gap(L, 6, 0);
  CHECK(dense > 0);
  CHECK(arnoldi == doctest::Approx(dense).epsilon(1e-8));
}

TEST_CASE("shift-invert eigenvalues match the dense spectrum") {
  const auto L = build(bias10(11, 3));
  const Sector s = L.sector(1);
  const Eigen::MatrixXcd S = Eigen::MatrixXcd(s.matrix);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(S);
  const cplx sigma(-0.004, 0.001);
  const auto got = shift_invert_eigs(s.matrix, sigma, 4);
  std::vector<cplx> all(es.eigenvalues().data(), es.eigenvalues().data() + S.rows());
  std::sort(all.begin(), all.end(),
            [&](cplx a, cplx b) { return std::abs(a - sigma) < std::abs(b - sigma); });
  for (const cplx& z : got) {
    double best = 1e300;
    for (const cplx& w : all) best = std::min(best, std::abs(z - w));
    CHECK(best < 1e-9);
  }
  // the nearest eigenvalue is always found
  double best = 1e300;
  for (const cplx& z : got) best = std::min(best, std::abs(z - all[0]));
  CHECK(best < 1e-9);
}

TEST_CASE("evolve: identity at t=0, invariants, long-time limit") {
  const auto L = build(bias10(11, 2));
  const int d = L.d;
  MatC rho0 = MatC::Zero(d, d);
  rho0(d - 1, d - 1) = 1.0;
  const auto traj = evolve(L, rho0, {0.0, 10.0, 1e3, 1e4, 1e6});
  CHECK(traj[0] == rho0);
  for (const MatC& r : traj) {
    CHECK(std::abs(r.trace() - 1.0) < 1e-8);
    CHECK((r - r.adjoint()).norm() < 1e-8);
  }
  CHECK(trace_distance(traj.back(), steady_state(L).rho) < 1e-6);
}

TEST_CASE("evolve: excited ensemble relaxes monotonically") {
  const auto L = build_single({4, 1.0, 0.01, 10.0, Scaling::none});
  MatC rho0 = MatC::Zero(5, 5);
  rho0(0, 0) = 1.0;
  std::vector<double> t;
  for (int k = 0; k <= 60; ++k) t.push_back(10.0 * k);
  const auto traj = evolve(L, rho0, t);
  const SpMatC& z = L.ops.z;
  double prev = 1e9;
  for (const MatC& r : traj) {
    const double mz = expect(z, r).real();
    CHECK(mz <= prev + 1e-12);
    prev = mz;
  }
  const double thermal = expect(z, steady_state(L).rho).real();
  CHECK(prev > thermal);
  CHECK(prev - thermal < 0.05);
}

TEST_CASE("evolve: integrator path against a Taylor series") {
  const auto L = build(bias10(11, 7));
  REQUIRE(L.dim() > 2500);
  const int d = L.d;
  MatC rho0 = MatC::Zero(d, d);
  rho0(0, 0) = 0.5;
  rho0(d - 1, d - 1) = 0.5;
  rho0(0, d - 1) = rho0(d - 1, 0) = 0.3;
  const double T = 20.0;
  const auto traj = evolve(L, rho0, {T}, 1e-10, 1e-12);
  // exp(T M) x by 10 steps of a 30-term series
  const SpMatC M = L.matrix();
  VecC x = Eigen::Map<const VecC>(rho0.data(), L.dim());
  for (int s = 0; s < 10; ++s) {
    VecC term = x, sum = x;
    for (int k = 1; k < 30; ++k) {
      term = (M * term).eval() * (T / 10.0 / k);
      sum += term;
    }
    x = sum;
  }
  const MatC want = Eigen::Map<MatC>(x.data(), d, d);
  CHECK((traj[0] - want).norm() < 1e-7);
}

TEST_CASE("evolve rejects mismatched states") {
  const auto L = build(bias10(11, 1));
  CHECK_THROWS_AS(evolve(L, MatC::Identity(3, 3) / 3.0, {1.0}), InvalidParameter);
}

}
