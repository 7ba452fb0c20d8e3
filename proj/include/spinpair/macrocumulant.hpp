#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spinpair/errors.hpp"

namespace spinpair {

using Vector27d = Eigen::Matrix<double, 27, 1>;
using Matrix27d = Eigen::Matrix<double, 27, 27>;

// Variables 0..5 are m1x, m1y, m1z, m2x, m2y, m2z.
enum Axis { X = 0, Y = 1, Z = 2 };

// First moments followed by the 21 symmetrized second moments <v_a v_b>, a <= b.
struct MomentState {
  Vector27d v = Vector27d::Zero();

  static int var(int ensemble, int axis) { return 3 * (ensemble - 1) + axis; }
  static int pair_index(int a, int b);

  double first(int a) const { return v[a]; }
  double& first(int a) { return v[a]; }
  double second(int a, int b) const { return v[pair_index(a, b)]; }
  double& second(int a, int b) { return v[pair_index(a, b)]; }

  // Both ensembles fully polarized along -z, product second moments, no coherence.
  static MomentState polarized_down(double spread = 0.0);
  // Uncorrelated state with the given means and per-ensemble <(m^a)^2>.
  static MomentState product(const Eigen::Matrix<double, 6, 1>& mean,
                             const Eigen::Matrix<double, 6, 1>& square);

  // <(m^x)^2> + <(m^y)^2> + <(m^z)^2> per ensemble.
  std::array<double, 2> quadrature_sum() const;
};

struct MacroParams {
  double E1 = 1.0;
  double E2 = 1.0;
  double omega0 = 0.0;
  double gamma0 = 1e-3;
  double beta1E1 = 1.0;
  double beta2E2 = 1.0;

  std::vector<std::string> violations() const;
  void validate() const;
  double delta_E() const { return E2 - E1; }
  double T1() const { return E1 / beta1E1; }
  double T2() const { return E2 / beta2E2; }
  double betaE(int l) const { return l == 1 ? beta1E1 : beta2E2; }

  static MacroParams from_temperatures(double E1, double E2, double omega0, double gamma0,
                                       double T1, double T2);
};

struct DissipativeMoments {
  double mz, mz2, mx2;
};

DissipativeMoments dissipative_ss_analytic(double betaE);

// Closed two-moment dissipative dynamics for (<m^z>, <(m^z)^2>).
Eigen::Vector2d dissipative_rhs(const Eigen::Vector2d& s, double betaE, double gamma0);

// Fixed point of dissipative_rhs reached by integration from the polarized state.
DissipativeMoments dissipative_steady_state(double betaE, double gamma0, double tol = 1e-13);

struct DissipativeJacobian {
  Eigen::Matrix2d J;
  std::array<std::complex<double>, 2> eigenvalues;  // numerical, sorted by real part desc
  std::array<std::complex<double>, 2> closed_form;  // lambda_+, lambda_-
  double A;
  double gap;
};

DissipativeJacobian jacobian_dissipative(double betaE, double gamma0);

Vector27d engine_rhs(const MomentState& s, const MacroParams& p);

struct MacroSteadyState {
  MomentState state;
  double residual = 0.0;
  double t_final = 0.0;
  bool newton = false;
};

MacroSteadyState macro_steady_state(const MacroParams& p,
                                    const MomentState& init = MomentState::polarized_down(0.01),
                                    double t_max = 1e10, double tol = 1e-12);

double macro_power(const MomentState& s, const MacroParams& p);

Matrix27d engine_jacobian(const MomentState& s, const MacroParams& p, double h = 1e-6);

struct EngineGap {
  double gap;
  bool stable;
  Eigen::Matrix<std::complex<double>, 27, 1> eigenvalues;
};

EngineGap jacobian_gap_engine(const MacroParams& p, const MacroSteadyState& ss);
EngineGap jacobian_gap_engine(const MacroParams& p);

// Finite-N single-ensemble thermal <m^z> with beta scaled by N (exact Gibbs ladder).
double finite_thermal_mz(double betaE, int N);

enum class TransientObservable { magnetization, gap };

// Smallest N whose observable differs from the zero-temperature value by more than eps.
int transient_size(double betaE, double eps, TransientObservable obs = TransientObservable::magnetization,
                   int n_max = 400);

}  // namespace spinpair
