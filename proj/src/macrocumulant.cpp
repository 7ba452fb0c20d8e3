#include "spinpair/macrocumulant.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <boost/numeric/odeint.hpp>
#include <boost/numeric/odeint/external/eigen/eigen.hpp>

#include "spinpair/liouville.hpp"

namespace spinpair {

namespace {

constexpr std::array<std::array<int, 6>, 6> make_pair_table() {
  std::array<std::array<int, 6>, 6> t{};
  int k = 6;
  for (int a = 0; a < 6; ++a)
    for (int b = a; b < 6; ++b) {
      t[a][b] = k;
      t[b][a] = k;
      ++k;
    }
  return t;
}

constexpr auto kPair = make_pair_table();

double coth(double x) { return 1.0 / std::tanh(x); }

}  // namespace

int MomentState::pair_index(int a, int b) { return kPair[a][b]; }

MomentState MomentState::product(const Eigen::Matrix<double, 6, 1>& mean,
                                 const Eigen::Matrix<double, 6, 1>& square) {
  MomentState s;
  for (int a = 0; a < 6; ++a) s.first(a) = mean[a];
  for (int a = 0; a < 6; ++a)
    for (int b = a; b < 6; ++b) s.second(a, b) = a == b ? square[a] : mean[a] * mean[b];
  return s;
}

MomentState MomentState::polarized_down(double spread) {
  Eigen::Matrix<double, 6, 1> mean, sq;
  mean << 0, 0, -1, 0, 0, -1;
  sq << spread, spread, 1 - 2 * spread, spread, spread, 1 - 2 * spread;
  return product(mean, sq);
}

std::array<double, 2> MomentState::quadrature_sum() const {
  std::array<double, 2> q{};
  for (int l = 1; l <= 2; ++l)
    for (int a = 0; a < 3; ++a) q[l - 1] += second(var(l, a), var(l, a));
  return q;
}

std::vector<std::string> MacroParams::violations() const {
  std::vector<std::string> v;
  if (!(E1 > 0)) v.push_back("E1 must be > 0");
  if (!(E2 >= E1)) v.push_back("E2 must be ≥ E1");
  if (!(omega0 >= 0)) v.push_back("omega0 must be ≥ 0");
  if (!(gamma0 > 0)) v.push_back("gamma0 must be > 0");
  if (!(beta1E1 > 0)) v.push_back("beta1*E1 must be > 0");
  if (!(beta2E2 > 0)) v.push_back("beta2*E2 must be > 0");
  if (beta1E1 > 0 && beta2E2 > 0 && !(beta1E1 / E1 >= beta2E2 / E2))
    v.push_back("beta1 must be ≥ beta2");
  return v;
}

void MacroParams::validate() const {
  const auto v = violations();
  if (v.empty()) return;
  std::ostringstream os;
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "; " : "") << v[i];
  throw InvalidParameter(os.str());
}

MacroParams MacroParams::from_temperatures(double E1, double E2, double omega0, double gamma0,
                                           double T1, double T2) {
  return {E1, E2, omega0, gamma0, E1 / T1, E2 / T2};
}

DissipativeMoments dissipative_ss_analytic(double betaE) {
  if (!(betaE > 0)) throw InvalidParameter("beta*E must be > 0");
  const double x = betaE;
  DissipativeMoments m;
  if (x < 0.1) {
    // coth(x/2) - 2/x = x/6 - x^3/360 + x^5/15120 - x^7/604800 + ...
    const double x2 = x * x;
    m.mz = -x / 6.0 * (1.0 - x2 / 60.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 40.0)));
    m.mz2 = 1.0 / 3.0 + x2 / 90.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 40.0));
  } else {
    m.mz = 2.0 / x - coth(0.5 * x);
    m.mz2 = 1.0 + 4.0 * m.mz / x;
  }
  m.mx2 = 0.5 * (1.0 - m.mz2);
  return m;
}

Eigen::Vector2d dissipative_rhs(const Eigen::Vector2d& s, double betaE, double gamma0) {
  const double mz = s[0], mz2 = s[1], x = betaE;
  Eigen::Vector2d d;
  d[0] = 0.5 * gamma0 * (-(1.0 - mz2) - 4.0 / x * mz);
  d[1] = gamma0 * (mz * (-1.0 + 3.0 * mz2 - 2.0 * mz * mz) + 2.0 / x * (1.0 - 3.0 * mz2));
  return d;
}

DissipativeMoments dissipative_steady_state(double betaE, double gamma0, double tol) {
  if (!(betaE > 0)) throw InvalidParameter("beta*E must be > 0");
  namespace ode = boost::numeric::odeint;
  Eigen::Vector2d s(-1.0, 1.0);
  auto rhs = [&](const Eigen::Vector2d& y, Eigen::Vector2d& dy, double) {
    dy = dissipative_rhs(y, betaE, gamma0);
  };
  auto stepper = ode::make_controlled(1e-14, 1e-12,
                                      ode::runge_kutta_dopri5<Eigen::Vector2d, double, Eigen::Vector2d,
                                                              double, ode::vector_space_algebra>());
  double t = 0.0, span = 1.0 / gamma0;
  for (int k = 0; k < 60; ++k) {
    ode::integrate_adaptive(stepper, rhs, s, t, t + span, span / 100.0);
    t += span;
    span *= 2.0;
    if (dissipative_rhs(s, betaE, gamma0).cwiseAbs().maxCoeff() < 1e-9 * gamma0) break;
  }
  for (int it = 0; it < 30; ++it) {
    const Eigen::Vector2d f = dissipative_rhs(s, betaE, gamma0);
    if (f.cwiseAbs().maxCoeff() < tol * gamma0) break;
    const double mz = s[0], mz2 = s[1], x = betaE;
    Eigen::Matrix2d J;
    J << -2.0 * gamma0 / x, 0.5 * gamma0,
        gamma0 * (-1.0 + 3.0 * mz2 - 6.0 * mz * mz), 3.0 * gamma0 * (mz - 2.0 / x);
    s -= J.partialPivLu().solve(f);
  }
  const double res = dissipative_rhs(s, betaE, gamma0).cwiseAbs().maxCoeff();
  if (!(res < 1e-9 * gamma0)) throw ConvergenceError("dissipative closure did not converge", res);
  return {s[0], s[1], 0.5 * (1.0 - s[1])};
}

DissipativeJacobian jacobian_dissipative(double betaE, double gamma0) {
  const auto a = dissipative_ss_analytic(betaE);
  const double x = betaE, G = gamma0;
  DissipativeJacobian r;
  r.J << -2.0 * G / x, 0.5 * G,
      G * (-1.0 + 3.0 * a.mz2 - 6.0 * a.mz * a.mz), 3.0 * G * (a.mz - 2.0 / x);
  Eigen::EigenSolver<Eigen::Matrix2d> es(r.J, false);
  auto ev = es.eigenvalues();
  if (ev[1].real() > ev[0].real()) std::swap(ev[0], ev[1]);
  r.eigenvalues = {ev[0], ev[1]};
  const double c = coth(0.5 * x);
  r.A = 4.0 + 4.0 / (x * x) + 12.0 * c / x - 3.0 * c * c;
  const std::complex<double> sq = std::sqrt(std::complex<double>(r.A));
  r.closed_form = {0.5 * G * (-2.0 / x - 3.0 * c + sq), 0.5 * G * (-2.0 / x - 3.0 * c - sq)};
  r.gap = -std::max(ev[0].real(), ev[1].real());
  return r;
}

Vector27d engine_rhs(const MomentState& s, const MacroParams& p) {
  const double w = p.omega0, G = p.gamma0;
  auto M = [&](int a, int b) { return s.second(a, b); };
  MomentState d;
  for (int l = 1; l <= 2; ++l) {
    const int lb = 3 - l;
    const double k = G / p.betaE(l), kb = G / p.betaE(lb);
    const int x = MomentState::var(l, X), y = MomentState::var(l, Y), z = MomentState::var(l, Z);
    const int xb = MomentState::var(lb, X), yb = MomentState::var(lb, Y), zb = MomentState::var(lb, Z);
    const double Xv = s.first(x), Yv = s.first(y), Zv = s.first(z);
    const double XB = s.first(xb), YB = s.first(yb), ZB = s.first(zb);

    d.first(x) = w / 2 * M(z, yb) + G / 2 * M(x, z) - k * Xv;
    d.first(y) = -w / 2 * M(z, xb) + G / 2 * M(y, z) - k * Yv;
    d.first(z) = w / 2 * (M(y, xb) - M(x, yb)) - G / 2 * (M(x, x) + M(y, y)) - 2 * k * Zv;

    d.second(x, x) = w * (M(x, z) * YB + (M(z, yb) - Zv * YB) * Xv + (M(x, yb) - Xv * YB) * Zv) +
                     G * (M(x, x) * Zv + 2 * (M(x, z) - Xv * Zv) * Xv) + 2 * k * (M(z, z) - M(x, x));
    d.second(x, y) =
        w / 2 * (M(z, y) * YB + M(y, yb) * Zv + M(z, yb) * Yv - 2 * Yv * Zv * YB -
                 (M(x, z) * XB + M(x, xb) * Zv + M(z, xb) * Xv - 2 * Xv * Zv * XB)) +
        G / 2 * (2 * M(z, y) * Xv + 2 * M(x, z) * Yv + 2 * M(x, y) * Zv - 4 * Xv * Yv * Zv) -
        2 * k * M(x, y);
    d.second(x, z) =
        w / 2 * ((M(z, z) - M(x, x)) * YB + 2 * (M(z, yb) - Zv * YB) * Zv -
                 2 * (M(x, yb) - Xv * YB) * Xv + M(x, y) * XB + M(x, xb) * Yv + M(y, xb) * Xv -
                 2 * Yv * Xv * XB) -
        G / 2 * ((1 - 2 * M(z, z)) * Xv - 4 * (M(x, z) - Xv * Zv) * Zv) - 5 * k * M(x, z);
    d.second(y, y) = -w * (M(y, z) * XB + (M(z, xb) - Zv * XB) * Yv + (M(y, xb) - Yv * XB) * Zv) +
                     G * (M(y, y) * Zv + 2 * (M(y, z) - Yv * Zv) * Yv) + 2 * k * (M(z, z) - M(y, y));
    d.second(y, z) =
        -w / 2 * ((M(z, z) - M(y, y)) * XB + 2 * (M(z, xb) - Zv * XB) * Zv -
                  2 * (M(y, xb) - Yv * XB) * Yv + M(y, x) * YB + M(y, yb) * Xv + M(x, yb) * Yv -
                  2 * Xv * Yv * YB) -
        G / 2 * ((1 - 2 * M(z, z)) * Yv - 4 * (M(y, z) - Yv * Zv) * Zv) - 5 * k * M(y, z);
    d.second(z, z) =
        w * (M(y, z) * XB + (M(z, xb) - Zv * XB) * Yv + (M(y, xb) - Yv * XB) * Zv - M(x, z) * YB -
             (M(z, yb) - Zv * YB) * Xv - (M(x, yb) - Xv * YB) * Zv) -
        G * ((M(x, x) + M(y, y)) * Zv + 2 * (M(x, z) - Xv * Zv) * Xv + 2 * (M(y, z) - Yv * Zv) * Yv) -
        2 * k * (3 * M(z, z) - 1);

    if (l == 1) {
      d.second(x, xb) =
          w / 2 * (M(y, x) * ZB + M(y, zb) * Xv + M(x, zb) * Yv - 2 * Yv * Xv * ZB + M(xb, yb) * Zv +
                   M(z, yb) * XB + M(z, xb) * YB - 2 * Zv * XB * YB) +
          G / 2 * (M(x, z) * XB + M(x, xb) * Zv + M(z, xb) * Xv - 2 * Xv * Zv * XB + M(xb, zb) * Xv +
                   M(x, xb) * ZB + M(x, zb) * XB - 2 * Xv * ZB * XB) -
          (k + kb) * M(x, xb);
      d.second(y, yb) =
          -w / 2 * (M(x, y) * ZB + M(x, zb) * Yv + M(y, zb) * Xv - 2 * Xv * Yv * ZB + M(yb, xb) * Zv +
                    M(z, xb) * YB + M(z, yb) * XB - 2 * Zv * XB * YB) +
          G / 2 * (M(y, z) * YB + M(y, yb) * Zv + M(z, yb) * Yv - 2 * Yv * Zv * YB + M(yb, zb) * Yv +
                   M(y, yb) * ZB + M(y, zb) * YB - 2 * Yv * YB * ZB) -
          (k + kb) * M(y, yb);
      d.second(z, zb) =
          w / 2 * ((M(x, z) - M(x, zb)) * YB + (M(zb, xb) - M(z, xb)) * Yv +
                   (M(y, zb) - M(y, z)) * XB + (M(z, yb) - M(zb, yb)) * Xv +
                   (M(x, yb) - M(y, xb) - 2 * Xv * YB + 2 * Yv * XB) * (Zv - ZB)) -
          G / 2 * ((M(x, x) + M(y, y)) * ZB + 2 * (M(x, zb) - Xv * ZB) * Xv +
                   2 * (M(y, zb) - Yv * ZB) * Yv + (M(xb, xb) + M(yb, yb)) * Zv +
                   2 * (M(z, xb) - Zv * XB) * XB + 2 * (M(z, yb) - Zv * YB) * YB) -
          2 * (k + kb) * M(z, zb);
    }
    d.second(x, yb) =
        w / 2 * (M(yb, yb) * Zv - M(x, x) * ZB + 2 * (M(z, yb) - Zv * YB) * YB -
                 2 * (M(x, zb) - Xv * ZB) * Xv) +
        G / 2 * (M(x, z) * YB + M(x, yb) * Zv + M(z, yb) * Xv - 2 * Xv * Zv * YB + M(yb, zb) * Xv +
                 M(x, yb) * ZB + M(x, zb) * YB - 2 * Xv * YB * ZB) -
        (k + kb) * M(x, yb);
    d.second(x, zb) =
        w / 2 * ((M(x, x) - 2 * Xv * Xv) * YB + (M(yb, zb) - 2 * YB * ZB) * Zv -
                 (M(x, y) - 2 * Xv * Yv) * XB + M(z, yb) * ZB + M(z, zb) * YB - M(x, xb) * Yv -
                 M(y, xb) * Xv + 2 * M(x, yb) * Xv) +
        G / 2 * (M(x, z) * ZB + M(x, zb) * Zv + M(z, zb) * Xv - 2 * Xv * Zv * ZB -
                 (M(xb, xb) + M(yb, yb)) * Xv - 2 * (M(x, xb) - Xv * XB) * XB -
                 2 * (M(x, yb) - Xv * YB) * YB) -
        (k + 2 * kb) * M(x, zb);
    d.second(y, zb) =
        -w / 2 * ((M(y, y) - 2 * Yv * Yv) * XB + (M(zb, xb) - 2 * ZB * XB) * Zv -
                  (M(x, y) - 2 * Xv * Yv) * YB + M(z, xb) * ZB + M(z, zb) * XB - M(y, yb) * Xv -
                  M(x, yb) * Yv + 2 * M(y, xb) * Yv) +
        G / 2 * (M(y, z) * ZB + M(y, zb) * Zv + M(z, zb) * Yv - 2 * Yv * Zv * ZB -
                 (M(xb, xb) + M(yb, yb)) * Yv - 2 * (M(y, xb) - Yv * XB) * XB -
                 2 * (M(y, yb) - Yv * YB) * YB) -
        (k + 2 * kb) * M(y, zb);
  }
  return d.v;
}

double macro_power(const MomentState& s, const MacroParams& p) {
  const int x1 = MomentState::var(1, X), y1 = MomentState::var(1, Y);
  const int x2 = MomentState::var(2, X), y2 = MomentState::var(2, Y);
  return p.omega0 * p.delta_E() / 4.0 * (s.second(y1, x2) - s.second(x1, y2));
}

Matrix27d engine_jacobian(const MomentState& s, const MacroParams& p, double h) {
  Matrix27d J;
  for (int i = 0; i < 27; ++i) {
    MomentState a = s, b = s;
    a.v[i] += h;
    b.v[i] -= h;
    J.col(i) = (engine_rhs(a, p) - engine_rhs(b, p)) / (2.0 * h);
  }
  return J;
}

MacroSteadyState macro_steady_state(const MacroParams& p, const MomentState& init, double t_max,
                                    double tol) {
  p.validate();
  namespace ode = boost::numeric::odeint;
  Vector27d y = init.v;
  auto rhs = [&](const Vector27d& v, Vector27d& dv, double) {
    MomentState s;
    s.v = v;
    dv = engine_rhs(s, p);
  };
  auto residual = [&](const Vector27d& v) {
    MomentState s;
    s.v = v;
    return engine_rhs(s, p).cwiseAbs().maxCoeff();
  };
  auto stepper = ode::make_controlled(1e-14, 1e-11,
                                      ode::runge_kutta_dopri5<Vector27d, double, Vector27d, double,
                                                              ode::vector_space_algebra>());
  const double switch_to_newton = std::max(tol, 1e-10 * p.gamma0);
  double t = 0.0, span = 1.0 / p.gamma0;
  std::vector<double> history;
  while (t < t_max) {
    const double stop = std::min(t + span, t_max);
    ode::integrate_adaptive(stepper, rhs, y, t, stop, (stop - t) / 1000.0);
    t = stop;
    span *= 2.0;
    if (!y.allFinite()) throw ConvergenceError("macro integration diverged", INFINITY);
    history.push_back(residual(y));
    if (history.back() < switch_to_newton) break;
  }

  MacroSteadyState out;
  out.t_final = t;
  MomentState s;
  s.v = y;
  double res = residual(y);
  if (res >= tol) {
    MomentState trial = s;
    for (int it = 0; it < 25 && res >= tol; ++it) {
      const Matrix27d J = engine_jacobian(trial, p);
      trial.v -= J.fullPivLu().solve(engine_rhs(trial, p));
      res = residual(trial.v);
    }
    if (res < tol) {
      s = trial;
      out.newton = true;
    } else {
      res = residual(y);
      const size_t n = history.size();
      const bool stalled = n >= 4 && history[n - 1] > 0.5 * history[n - 4];
      if (stalled) throw LimitCycleError("macro residual is not decreasing", res);
      throw ConvergenceError("macro steady state not reached by t_max", res);
    }
  }
  out.state = s;
  out.residual = res;
  return out;
}

EngineGap jacobian_gap_engine(const MacroParams& p, const MacroSteadyState& ss) {
  const Matrix27d J = engine_jacobian(ss.state, p);
  Eigen::EigenSolver<Matrix27d> es(J, false);
  EngineGap g;
  g.eigenvalues = es.eigenvalues();
  g.gap = -g.eigenvalues.real().maxCoeff();
  g.stable = g.gap > 0;
  return g;
}

EngineGap jacobian_gap_engine(const MacroParams& p) {
  return jacobian_gap_engine(p, macro_steady_state(p));
}

double finite_thermal_mz(double betaE, int N) {
  if (N < 1) throw InvalidParameter("N must be ≥ 1");
  const double a = betaE / N;
  const double S = 0.5 * N;
  // weights exp(-a m), m = S - k, shifted by the largest exponent (m = -S)
  double z = 0.0, zm = 0.0;
  for (int k = 0; k <= N; ++k) {
    const double m = S - k;
    const double wgt = std::exp(-a * (m + S));
    z += wgt;
    zm += wgt * m;
  }
  return 2.0 * (zm / z) / N;
}

int transient_size(double betaE, double eps, TransientObservable obs, int n_max) {
  if (!(eps > 0)) throw InvalidParameter("eps must be > 0");
  if (!(betaE > 0)) throw InvalidParameter("beta*E must be > 0");
  for (int N = 1; N <= n_max; ++N) {
    double diff;
    if (obs == TransientObservable::magnetization) {
      diff = std::abs(finite_thermal_mz(betaE, N) + 1.0);
    } else {
      SingleParams sp{N, 1.0, 1.0, betaE, Scaling::high_temperature};
      SingleParams zero = sp;
      zero.beta = std::numeric_limits<double>::infinity();
      diff = std::abs(gap(build_single(sp)) - gap(build_single(zero)));
    }
    if (diff > eps) return N;
  }
  throw RangeError("transient size not reached within N <= " + std::to_string(n_max));
}

}  // namespace spinpair
