#include "spinpair/studies.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "spinpair/correlations.hpp"
#include "spinpair/macrofluct.hpp"
#include "spinpair/thermo.hpp"

namespace spinpair {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SPINPAIR_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int n, const std::function<void(int)>& f, int threads) {
  const int workers = std::min(resolve_threads(threads), std::max(n, 1));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex m;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(m);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  if (n < 2 || y.size() != n) throw InvalidParameter("fit_line needs >= 2 matching points");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy == 0 ? 1.0 : sxy * sxy / (sxx * syy);
  return f;
}

PiecewiseFit fit_piecewise(const std::vector<double>& x, const std::vector<double>& y,
                           int min_points) {
  const int n = static_cast<int>(x.size());
  if (n < 2 * min_points) throw InvalidParameter("fit_piecewise: too few points");
  auto sse = [&](int a, int b, const LinearFit& f) {
    double s = 0;
    for (int i = a; i < b; ++i) s += std::pow(y[i] - f.slope * x[i] - f.intercept, 2);
    return s;
  };
  PiecewiseFit best;
  double best_err = INFINITY;
  for (int k = min_points; k <= n - min_points; ++k) {
    std::vector<double> xl(x.begin(), x.begin() + k), yl(y.begin(), y.begin() + k);
    std::vector<double> xr(x.begin() + k, x.end()), yr(y.begin() + k, y.end());
    const LinearFit l = fit_line(xl, yl), r = fit_line(xr, yr);
    const double e = sse(0, k, l) + sse(k, n, r);
    if (e < best_err) {
      best_err = e;
      best = {k, l, r};
    }
  }
  return best;
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (size_t i = 0; i < idx.size();) {
    size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    for (size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * (i + j);
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw InvalidParameter("spearman: size mismatch");
  const auto ra = ranks(a), rb = ranks(b);
  return std::sqrt(fit_line(ra, rb).r_squared) * (fit_line(ra, rb).slope < 0 ? -1.0 : 1.0);
}

ScalingFit fit_scaling(const std::vector<int>& n_values, const std::vector<double>& ratios,
                       double stability, int min_fit_points) {
  const size_t n = n_values.size();
  if (ratios.size() != n) throw InvalidParameter("fit_scaling: size mismatch");
  ScalingFit f;
  f.n_values = n_values;
  f.ratios = ratios;
  std::vector<double> slope;
  for (size_t i = 0; i + 1 < n; ++i)
    slope.push_back(std::log(ratios[i + 1] / ratios[i]) /
                    std::log(double(n_values[i + 1]) / n_values[i]));
  size_t start = n;
  for (size_t i = 0; i + 2 < slope.size(); ++i) {
    const auto [lo, hi] = std::minmax({slope[i], slope[i + 1], slope[i + 2]});
    const double mean = (slope[i] + slope[i + 1] + slope[i + 2]) / 3.0;
    if (hi - lo < stability * std::abs(mean)) {
      start = i;
      break;
    }
  }
  if (start == n) throw RangeError("local slope never stabilizes; cannot determine n_sat");
  f.n_sat = n_values[start];
  std::vector<double> lx, ly;
  for (size_t i = 0; i < n; ++i)
    if (n_values[i] > f.n_sat) {
      lx.push_back(std::log(double(n_values[i])));
      ly.push_back(std::log(ratios[i]));
    }
  if (static_cast<int>(lx.size()) < min_fit_points)
    throw RangeError("only " + std::to_string(lx.size()) + " points beyond n_sat=" +
                     std::to_string(f.n_sat));
  const LinearFit lf = fit_line(lx, ly);
  f.alpha = lf.slope;
  f.r_squared = lf.r_squared;
  return f;
}

double finite_power(const EngineParams& p) {
  const EngineLiouvillian L = build(p);
  return power(L, steady_state(L));
}

ScalingFit scaling_exponent(const EngineParams& p, const std::vector<int>& n_values,
                            double stability, int threads) {
  std::vector<double> P(n_values.size());
  parallel_for(static_cast<int>(n_values.size()), [&](int i) {
    EngineParams q = p;
    q.N = n_values[i];
    P[i] = finite_power(q);
  }, threads);
  EngineParams one = p;
  one.N = 1;
  const double P1 = n_values.front() == 1 ? P.front() : finite_power(one);
  if (std::abs(P1) < 1e-12 * p.gamma0 * p.E1) throw DegenerateBaseline("P_1 is zero");
  std::vector<double> ratios;
  for (double v : P) {
    if (v * P1 <= 0) throw ModeMixing("power changes sign across the N range");
    ratios.push_back(v / P1);
  }
  return fit_scaling(n_values, ratios, stability);
}

ScanGrid scan(const std::string& name1, const std::vector<double>& axis1, const std::string& name2,
              const std::vector<double>& axis2, const CellFunction& cell, int threads) {
  ScanGrid g{name1, name2, axis1, axis2, {}};
  g.cells.resize(axis1.size() * axis2.size());
  parallel_for(static_cast<int>(g.cells.size()), [&](int k) {
    const size_t i = k / axis2.size(), j = k % axis2.size();
    try {
      g.cells[k] = cell(axis1[i], axis2[j]);
    } catch (const Error& e) {
      g.cells[k].error = std::string(e.kind()) + ": " + e.what();
    } catch (const std::exception& e) {
      g.cells[k].error = e.what();
    }
  }, threads);
  return g;
}

CellResult exact_cell(EngineParams p, double dE, double Tbar, double dT, bool with_variance) {
  const double T1 = Tbar - dT / 2, T2 = Tbar + dT / 2;
  if (!(T1 > 0)) throw InvalidParameter("Tbar - dT/2 must be > 0");
  p.E2 = p.E1 + dE;
  p.beta1 = 1.0 / T1;
  p.beta2 = 1.0 / T2;
  const ThermoReport r = thermo_report(p, with_variance);
  CellResult c;
  c.mode = to_string(r.mode);
  c.values = {{"power", r.power},
              {"q_cold", r.q_cold},
              {"q_hot", r.q_hot},
              {"entropy_rate", r.entropy_rate},
              {"delta_E_star", delta_E_star(p.E1, T1, T2)}};
  if (with_variance) {
    c.values["variance"] = r.variance;
    c.values["constancy"] = r.constancy;
  }
  return c;
}

double single_pair_power(const MacroParams& p) {
  EngineParams e;
  e.E1 = p.E1;
  e.E2 = p.E2;
  e.omega0 = p.omega0;
  e.gamma0 = p.gamma0;
  e.beta1 = p.beta1E1 / p.E1;
  e.beta2 = p.beta2E2 / p.E2;
  e.N = 1;
  return finite_power(e);
}

double gain_ratio(const MacroParams& p, const MomentState& ss) {
  const double P1 = single_pair_power(p);
  if (std::abs(P1) < 1e-15 * p.gamma0 * p.E1) throw DegenerateBaseline("single-pair power is zero");
  return macro_power(ss, p) / P1;
}

double gain_ratio(const MacroParams& p) { return gain_ratio(p, macro_steady_state(p).state); }

CellResult macro_cell(const MacroParams& tmpl, double dE, double Tbar, double dT) {
  const double T1 = Tbar - dT / 2, T2 = Tbar + dT / 2;
  if (!(T1 > 0)) throw InvalidParameter("Tbar - dT/2 must be > 0");
  const MacroParams p =
      MacroParams::from_temperatures(tmpl.E1, tmpl.E1 + dE, tmpl.omega0, tmpl.gamma0, T1, T2);
  const MacroSteadyState ss = macro_steady_state(p);
  CellResult c;
  const double P = macro_power(ss.state, p);
  const double zero = 1e-12 * p.gamma0 * p.E1;
  const bool engine = P > zero && dE < delta_E_star(p.E1, T1, T2);
  c.mode = engine ? "heat_engine" : (P < -zero ? "refrigerator" : "dud");
  c.values["power"] = P;
  c.values["residual"] = ss.residual;
  c.values["delta_E_star"] = delta_E_star(p.E1, T1, T2);
  c.values["jacobian_gap"] = jacobian_gap_engine(p, ss).gap;
  const double P1 = single_pair_power(p);
  c.values["power_single"] = P1;
  if (std::abs(P1) > 1e-15 * p.gamma0 * p.E1) c.values["gain"] = P / P1;
  const double var = macro_power_variance(ss.state, p);
  c.values["variance"] = var;
  if (engine) c.values["constancy"] = macro_constancy_value(P, var, p);
  const TwoSpinState st = reduced_two_spin_state(ss.state);
  c.values["mutual_information"] = mutual_information(st);
  c.values["concurrence"] = concurrence(st);
  c.values["clip"] = st.clip_applied ? 1.0 : 0.0;
  return c;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

}  // namespace spinpair
