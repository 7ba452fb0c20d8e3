#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spinpair/liouville.hpp"
#include "spinpair/macrocumulant.hpp"

namespace spinpair {

// Worker count: explicit value if > 0, else SPINPAIR_THREADS, else hardware concurrency.
int resolve_threads(int requested = 0);

// Calls f(i) for i in [0, n) on up to `threads` workers; exceptions are rethrown after joining.
void parallel_for(int n, const std::function<void(int)>& f, int threads = 0);

struct LinearFit {
  double slope = 0, intercept = 0, r_squared = 0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Two linear pieces joined at the sample that minimizes the total squared error.
struct PiecewiseFit {
  int split = 0;  // first index of the right piece
  LinearFit left, right;
};

PiecewiseFit fit_piecewise(const std::vector<double>& x, const std::vector<double>& y,
                           int min_points = 3);

double spearman(const std::vector<double>& a, const std::vector<double>& b);

struct ScalingFit {
  std::vector<int> n_values;
  std::vector<double> ratios;  // P_N / P_1
  int n_sat = 0;
  double alpha = 0;
  double r_squared = 0;
};

// Fit log(ratio) vs log N for N > n_sat; n_sat is the first N whose next three local slopes
// agree within `stability`.
ScalingFit fit_scaling(const std::vector<int>& n_values, const std::vector<double>& ratios,
                       double stability = 0.05, int min_fit_points = 6);

double finite_power(const EngineParams& p);

ScalingFit scaling_exponent(const EngineParams& p, const std::vector<int>& n_values,
                            double stability = 0.05, int threads = 0);

struct CellResult {
  std::map<std::string, double> values;
  std::string mode;
  std::optional<std::string> error;
};

struct ScanGrid {
  std::string axis1_name, axis2_name;
  std::vector<double> axis1, axis2;
  std::vector<CellResult> cells;  // row-major: axis1 outer
  const CellResult& at(size_t i, size_t j) const { return cells[i * axis2.size() + j]; }
};

using CellFunction = std::function<CellResult(double, double)>;

// Failed cells carry the error text; the scan continues.
ScanGrid scan(const std::string& name1, const std::vector<double>& axis1, const std::string& name2,
              const std::vector<double>& axis2, const CellFunction& cell, int threads = 0);

// Exact finite-N cell on the (Delta E, Tbar) plane with fixed Delta T.
CellResult exact_cell(EngineParams tmpl, double dE, double Tbar, double dT, bool with_variance);

// Macroscopic cell on the (Delta E, Tbar) plane: power, gain, gap, constancy, correlations.
CellResult macro_cell(const MacroParams& tmpl, double dE, double Tbar, double dT);

// Single-pair power with the same parameters as the macroscopic point.
double single_pair_power(const MacroParams& p);

double gain_ratio(const MacroParams& p, const MomentState& ss);
double gain_ratio(const MacroParams& p);

std::vector<double> linspace(double a, double b, int n);

}  // namespace spinpair
