#include "spinpair/macrofluct.hpp"

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

namespace spinpair {

namespace {
constexpr int x1 = 0, y1 = 1, x2 = 2, y2 = 3;
constexpr std::array<int, 4> kVar = {0, 1, 3, 4};
}  // namespace

TwoTimeSystem build_two_time_system(const MomentState& ss, const MacroParams& p, double mean_tol) {
  for (int a : kVar)
    if (std::abs(ss.first(a)) > mean_tol)
      throw InconsistentSteadyState("transverse mean <m^{x,y}> is nonzero: " +
                                    std::to_string(ss.first(a)));
  TwoTimeSystem sys;
  sys.M.setZero();
  const double w = p.omega0, G = p.gamma0;
  for (int l = 1; l <= 2; ++l) {
    const int lb = 3 - l;
    const int xi = 2 * (l - 1), yi = xi + 1, xb = 2 * (lb - 1), yb = xb + 1;
    const double z = ss.first(MomentState::var(l, Z));
    const double diag = G / 2 * z - G / p.betaE(l);
    sys.M(xi, yb) = w / 2 * z;
    sys.M(xi, xi) = diag;
    sys.M(yi, xb) = -w / 2 * z;
    sys.M(yi, yi) = diag;
  }
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) sys.c0(a, b) = ss.second(kVar[a], kVar[b]);
  return sys;
}

Eigen::Matrix4d correlation_integrals(const TwoTimeSystem& sys) {
  return -sys.M.partialPivLu().solve(sys.c0);
}

double product_integral(const TwoTimeSystem& sys, int a, int b, int c, int d) {
  const Eigen::Matrix4d I = Eigen::Matrix4d::Identity();
  const Eigen::Matrix<double, 16, 16> K =
      Eigen::kroneckerProduct(sys.M, I) + Eigen::kroneckerProduct(I, sys.M);
  const Eigen::Matrix<double, 16, 1> uv = Eigen::kroneckerProduct(sys.c0.col(b), sys.c0.col(d));
  const Eigen::Matrix<double, 16, 1> r = -K.partialPivLu().solve(uv);
  return r[a * 4 + c];
}

double macro_power_variance(const MomentState& ss, const MacroParams& p) {
  const TwoTimeSystem sys = build_two_time_system(ss, p);
  if (sys.M.eigenvalues().real().maxCoeff() >= 0)
    throw DivergentIntegral("two-time system is not stable");
  auto I = [&](int a, int b, int c, int d) { return product_integral(sys, a, b, c, d); };
  const double s = I(x1, x1, y2, y2) + I(y2, x1, x1, y2) - I(y1, x1, x2, y2) - I(x2, x1, y1, y2) -
                   I(x1, y1, y2, x2) - I(y2, y1, x1, x2) + I(y1, y1, x2, x2) + I(x2, y1, y1, x2);
  const double dE = p.delta_E();
  return p.omega0 * p.omega0 * dE * dE / 8.0 * s;
}

double macro_constancy_value(double power, double variance, const MacroParams& p) {
  const double eta = p.delta_E() / p.E2;
  const double etaC = 1.0 - p.T1() / p.T2();
  return power / variance * 2.0 * eta * p.T1() / (etaC - eta);
}

double macro_constancy(const MomentState& ss, const MacroParams& p) {
  const double P = macro_power(ss, p);
  const double eta = p.delta_E() / p.E2;
  const double etaC = 1.0 - p.T1() / p.T2();
  if (!(P > 0) || !(eta < etaC)) throw ModeError("macro constancy requires heat-engine mode");
  return macro_constancy_value(P, macro_power_variance(ss, p), p);
}

}  // namespace spinpair
