#pragma once

#include <string>
#include <vector>

#include "spinpair/dicke.hpp"
#include "spinpair/types.hpp"

namespace spinpair {

enum class Scaling { none, high_temperature };

struct EngineParams {
  double E1 = 1.0;
  double E2 = 1.0;
  double omega0 = 0.0;
  double gamma0 = 1e-3;
  double beta1 = 1.0;
  double beta2 = 1.0;
  int N = 1;
  Scaling scaling = Scaling::none;

  // Every violated constraint, in a stable order; empty when valid.
  std::vector<std::string> violations() const;
  void validate() const;

  double scale() const { return scaling == Scaling::high_temperature ? double(N) : 1.0; }
  double omega_eff() const { return omega0 / scale(); }
  double gamma_eff() const { return gamma0 / scale(); }
  double beta_eff(int i) const { return (i == 1 ? beta1 : beta2) / scale(); }
  double energy(int i) const { return i == 1 ? E1 : E2; }
  double delta_E() const { return E2 - E1; }

  static EngineParams from_temperatures(double E1, double E2, double omega0, double gamma0,
                                        double T1, double T2, int N,
                                        Scaling s = Scaling::none);
};

struct Rates {
  double n_th, up, down;
};

Rates thermal_rates(double gamma0, double betaE);
Rates rates(const EngineParams& p, int i);

// rho -> coeff * left * rho * right
struct SuperTerm {
  cplx coeff;
  SpMatC left, right;
};

// Block of the generator with fixed charge difference q = c(i) - c(j).
struct Sector {
  int q = 0;
  std::vector<int> index;  // column-stacked positions i + j*d
  SpMatC matrix;
};

struct Liouvillian {
  int d = 0;
  std::vector<int> charge;
  std::vector<SuperTerm> terms;

  int dim() const { return d * d; }
  int max_charge() const;
  SpMatC matrix() const;
  Sector sector(int q) const;
};

struct EngineLiouvillian : Liouvillian {
  EngineParams params;
  CollectiveOps<cplx> ops;
};

struct SingleParams {
  int N = 1;
  double E = 1.0;
  double gamma0 = 1e-3;
  double beta = 1.0;
  Scaling scaling = Scaling::none;
  double scale() const { return scaling == Scaling::high_temperature ? double(N) : 1.0; }
};

// One ensemble with only its thermal dissipator (no drive).
struct SingleLiouvillian : Liouvillian {
  SingleParams params;
  SpinOps<cplx> ops;
};

EngineLiouvillian build(const EngineParams& p, int max_N = 64);
SingleLiouvillian build_single(const SingleParams& p);

struct SteadyState {
  MatC rho;
  double residual = 0.0;
  bool clipped = false;
};

enum class SteadyMethod { dense_null_space, sparse_lu };

SteadyState steady_state(const Liouvillian& L, SteadyMethod method = SteadyMethod::sparse_lu);

// Solves L X = rhs with Tr X = 0 inside the q = 0 sector; rhs must be traceless.
MatC solve_traceless(const Liouvillian& L, const MatC& rhs);

// -max Re over all nonzero eigenvalues, all sectors.
double gap(const Liouvillian& L, int k = 6, int dense_cap = 900);

// Eigenvalues of a sector nearest sigma by shift-invert Arnoldi.
std::vector<cplx> shift_invert_eigs(const SpMatC& A, cplx sigma, int k,
                                    double tol = 1e-10, int max_dim = 160);

std::vector<MatC> evolve(const Liouvillian& L, const MatC& rho0, const std::vector<double>& t,
                         double rtol = 1e-8, double atol = 1e-10);

MatC vec_to_mat(const Liouvillian& L, const Sector& s, const VecC& x);

double trace_distance(const MatC& a, const MatC& b);

}  // namespace spinpair
