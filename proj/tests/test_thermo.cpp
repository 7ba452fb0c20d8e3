#include "doctest.h"

#include <cmath>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "spinpair/thermo.hpp"

using namespace spinpair;

namespace {

EngineParams point(double E1, double E2, double omega0, double gamma0, double T1, double T2,
                   int N) {
  return EngineParams::from_temperatures(E1, E2, omega0, gamma0, T1, T2, N);
}

// 2 * integral_0^inf Re Tr[P e^{L t} X0] dt by Simpson on a dense propagator.
double variance_by_quadrature(const EngineLiouvillian& L, const SteadyState& ss, bool symmetric,
                              double dt, int steps) {
  const SpMatC P = power_operator(L);
  const double mean = expect(P, ss.rho).real();
  const MatC X0 = symmetric ? MatC(0.5 * (P * ss.rho + ss.rho * P) - mean * ss.rho)
                            : MatC(P * ss.rho - mean * ss.rho);
  const MatC U = (MatC(L.matrix()) * dt).exp();
  VecC x = Eigen::Map<const VecC>(X0.data(), L.dim());
  auto corr = [&](const VecC& v) {
    return expect(P, MatC(Eigen::Map<const MatC>(v.data(), L.d, L.d))).real();
  };
  double s = corr(x);
  for (int k = 1; k <= steps; ++k) {
    x = (U * x).eval();
    s += (k == steps ? 1.0 : (k % 2 ? 4.0 : 2.0)) * corr(x);
  }
  return 2.0 * s * dt / 3.0;
}

}  // namespace

TEST_SUITE("thermo") {

TEST_CASE("closed-form efficiencies") {
  const Efficiencies e = efficiency_cop(point(1, 10, 0.006, 0.001, 6, 16, 1));
  CHECK(e.eta == doctest::Approx(0.9));
  CHECK(e.eps == doctest::Approx(1.0 / 9.0));
  CHECK(e.eta_C == doctest::Approx(1.0 - 6.0 / 16.0));
  CHECK(e.eps_C == doctest::Approx(6.0 / 10.0));
  // at the boundary the machine efficiency equals Carnot
  const double T1 = 2, T2 = 22, dE = delta_E_star(1, T1, T2);
  CHECK(dE == doctest::Approx(10.0));
  const Efficiencies b = efficiency_cop(point(1, 1 + dE, 0.006, 0.001, T1, T2, 1));
  CHECK(b.eta == doctest::Approx(b.eta_C).epsilon(1e-14));
  CHECK_THROWS_AS(efficiency_cop(point(1, 1, 0.006, 0.001, T1, T2, 1)), InvalidParameter);
}

TEST_CASE("undriven engine carries no power or variance") {
  const auto p = point(1, 3, 0.0, 0.001, 2, 22, 2);
  const ThermoReport r = thermo_report(p);
  CHECK(std::abs(r.power) < 1e-15);
  CHECK(std::abs(r.variance) < 1e-15);
  CHECK(r.mode == Mode::dud);
}

TEST_CASE("first law and current proportionality") {
  for (int N = 1; N <= 6; ++N)
    for (double dE : {0.5, 2.0, 15.0}) {
      CAPTURE(N);
      CAPTURE(dE);
      const auto p = point(1, 1 + dE, 0.006, 0.001, 2, 22, N);
      const auto L = build(p);
      const SteadyState ss = steady_state(L);
      const double P = power(L, ss);
      const HeatCurrents q = heat_currents(L, ss);
      CHECK(std::abs(P - q.q_cold - q.q_hot) <= 1e-8 * std::abs(P));
      CHECK(-q.q_cold / p.E1 == doctest::Approx(P / dE).epsilon(1e-8));
      CHECK(q.q_hot / p.E2 == doctest::Approx(P / dE).epsilon(1e-8));
      CHECK(entropy_rate(p, q) >= -1e-10);
    }
}

TEST_CASE("engine and refrigerator points") {
  // Delta E* = 100 at Tbar = 150, Delta T = 100, E1 = 100 (units of omega0)
  const auto engine = thermo_report(point(100, 150, 1, 1, 100, 200, 1), false);
  CHECK(engine.power > 0);
  CHECK(engine.mode == Mode::heat_engine);
  CHECK(engine.q_hot > 0);
  CHECK(engine.q_cold < 0);
  CHECK(engine.power / engine.q_hot == doctest::Approx(50.0 / 150.0).epsilon(1e-8));
  CHECK(engine.efficiency <= efficiency_cop(point(100, 150, 1, 1, 100, 200, 1)).eta_C + 1e-10);
  CHECK(engine.entropy_rate > 0);

  const auto fridge = thermo_report(point(100, 225, 1, 1, 100, 200, 1), false);
  CHECK(fridge.power < 0);
  CHECK(fridge.mode == Mode::refrigerator);
  CHECK(fridge.q_cold > 0);
  CHECK(fridge.cop <= efficiency_cop(point(100, 225, 1, 1, 100, 200, 1)).eps_C + 1e-10);
}

TEST_CASE("power vanishes at the boundary") {
  const double T1 = 6, T2 = 16;
  const double dEs = delta_E_star(1, T1, T2);
  for (int N : {1, 3}) {
    const auto on = thermo_report(point(1, 1 + dEs, 0.006, 0.001, T1, T2, N), false);
    const auto off = thermo_report(point(1, 1 + 0.5 * dEs, 0.006, 0.001, T1, T2, N), false);
    CHECK(std::abs(on.power) < 1e-12 * std::abs(off.power) + 1e-16);
  }
}

TEST_CASE("equilibrium point carries no current") {
  const ThermoReport r = thermo_report(point(1, 2, 0.006, 0.001, 3, 6, 2), false);
  CHECK(std::abs(r.q_cold) < 1e-10);
  CHECK(std::abs(r.q_hot) < 1e-10);
  CHECK(std::abs(r.entropy_rate) < 1e-10);
}

TEST_CASE("a single temperature cannot produce work") {
  for (double dE : {0.5, 3.0}) {
    const auto p = point(1, 1 + dE, 0.01, 0.001, 4, 4, 2);
    const ThermoReport r = thermo_report(p, false);
    CHECK(r.power <= 1e-15);
    CHECK(r.entropy_rate >= -1e-10);
    CHECK(r.entropy_rate == doctest::Approx(-p.beta1 * r.power).epsilon(1e-8));
  }
}

TEST_CASE("mode classification follows the sign pattern") {
  for (double T2 : {5.0, 12.0, 30.0})
    for (double dE : {0.3, 2.0, 8.0}) {
      const ThermoReport r = thermo_report(point(1, 1 + dE, 0.006, 0.001, 2, T2, 2), false);
      if (r.mode == Mode::heat_engine) CHECK((r.power > 0 && r.q_hot > 0));
      if (r.mode == Mode::refrigerator) CHECK((r.power < 0 && r.q_cold > 0));
      if (r.power > 0) CHECK(r.mode == Mode::heat_engine);
    }
  CHECK(classify(-1, {-1, 2}, 1e-12) == Mode::dud);
  CHECK(to_string(Mode::refrigerator) == "refrigerator");
}

TEST_CASE("resolvent variance against time-domain quadrature") {
  for (int N : {1, 2})
    for (double Tbar : {9.0, 11.0}) {
      CAPTURE(N);
      CAPTURE(Tbar);
      const auto L = build(point(1, 10, 0.006, 0.001, Tbar - 5, Tbar + 5, N));
      const SteadyState ss = steady_state(L);
      const double var = power_variance(L, ss);
      const double g = gap(L);
      const int steps = 2 * static_cast<int>(std::ceil(30.0 / g / 2.0 / 4.0));
      const double quad = variance_by_quadrature(L, ss, true, 4.0, steps);
      CHECK(var > 0);
      CHECK(quad == doctest::Approx(var).epsilon(1e-2));
      if (N == 1) {
        const double unsym = variance_by_quadrature(L, ss, false, 4.0, steps);
        CHECK(unsym == doctest::Approx(var).epsilon(1e-2));
      }
    }
}

TEST_CASE("constancy requires engine mode") {
  const auto fridge_p = point(1, 10, 0.006, 0.001, 6, 16, 1);
  const ThermoReport fridge = thermo_report(fridge_p);
  CHECK(fridge.mode == Mode::refrigerator);
  CHECK_THROWS_AS(constancy(fridge, fridge_p), ModeError);

  const auto eng_p = point(1, 3, 0.006, 0.001, 2, 22, 1);
  const ThermoReport eng = thermo_report(eng_p);
  CHECK(constancy(eng, eng_p) == doctest::Approx(eng.constancy));
  CHECK(eng.fano == doctest::Approx(eng.variance / eng.power));
}

TEST_CASE("constancy has a finite limit at vanishing efficiency") {
  // P and Var scale as dE and dE^2, so P/Var * eta stays finite
  const ThermoReport a = thermo_report(point(1, 1 + 1e-5, 0.006, 0.001, 2, 22, 1));
  const ThermoReport b = thermo_report(point(1, 1 + 1e-6, 0.006, 0.001, 2, 22, 1));
  CHECK(a.mode == Mode::heat_engine);
  CHECK(b.mode == Mode::heat_engine);
  CHECK(b.variance / a.variance == doctest::Approx(1e-2).epsilon(1e-3));
  CHECK(b.constancy == doctest::Approx(a.constancy).epsilon(1e-4));
  CHECK(b.constancy > 0);
}

TEST_CASE("semiclassical regime respects the classical bound") {
  for (int N : {1, 2, 3}) {
    const auto p = point(1, 1.5, 0.006, 0.001, 30, 60, N);
    const ThermoReport r = thermo_report(p);
    CHECK(r.mode == Mode::heat_engine);
    CHECK(r.variance >= 0);
    CHECK(constancy(r, p) <= 1.0);
  }
}

}
