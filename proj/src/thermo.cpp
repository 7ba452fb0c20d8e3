#include "spinpair/thermo.hpp"

#include <cmath>
#include <limits>

namespace spinpair {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::heat_engine: return "heat_engine";
    case Mode::refrigerator: return "refrigerator";
    case Mode::dud: return "dud";
  }
  return "?";
}

SpMatC power_operator(const EngineLiouvillian& L) {
  const auto& p = L.params;
  const auto& o = L.ops;
  SpMatC X = o[1].plus * o[2].minus;
  SpMatC Xd = X.adjoint();
  return cplx(0.0, -0.5 * p.omega_eff() * p.delta_E()) * SpMatC(X - Xd);
}

namespace {

double real_checked(cplx v, double scale, const char* what) {
  if (std::abs(v.imag()) > 1e-6 * std::max(scale, 1e-300) && std::abs(v.imag()) > 1e-14)
    throw NumericalInconsistency(std::string(what) + " has imaginary part " +
                                 std::to_string(v.imag()));
  return v.real();
}

}  // namespace

double power(const EngineLiouvillian& L, const SteadyState& ss) {
  const SpMatC P = power_operator(L);
  const cplx v = expect(P, ss.rho);
  return real_checked(v, std::abs(v), "power");
}

HeatCurrents heat_currents(const EngineLiouvillian& L, const SteadyState& ss) {
  const auto& p = L.params;
  double q[2];
  for (int i = 1; i <= 2; ++i) {
    const auto& o = L.ops[i];
    const Rates r = rates(p, i);
    const cplx v = expect(SpMatC(o.plus * o.minus), ss.rho) + 2.0 * r.n_th * expect(o.z, ss.rho);
    q[i - 1] = -p.energy(i) * p.gamma_eff() * real_checked(v, std::abs(v), "heat current");
  }
  return {q[0], q[1]};
}

Efficiencies efficiency_cop(const EngineParams& p) {
  const double dE = p.delta_E();
  if (dE == 0.0) throw InvalidParameter("coefficient of performance undefined for E2 == E1");
  Efficiencies e;
  e.eta = dE / p.E2;
  e.eps = p.E1 / dE;
  e.eta_C = 1.0 - p.beta2 / p.beta1;
  e.eps_C = p.beta1 == p.beta2 ? std::numeric_limits<double>::infinity()
                               : p.beta2 / (p.beta1 - p.beta2);
  return e;
}

double entropy_rate(const EngineParams& p, const HeatCurrents& q) {
  const double s = -p.beta_eff(1) * q.q_cold - p.beta_eff(2) * q.q_hot;
  const double scale = std::abs(p.beta_eff(1) * q.q_cold) + std::abs(p.beta_eff(2) * q.q_hot);
  if (s < -1e-10 && s < -1e-8 * scale)
    throw NumericalInconsistency("negative entropy production " + std::to_string(s));
  return s;
}

Mode classify(double power, const HeatCurrents& q, double zero) {
  if (power > zero && q.q_hot > zero) return Mode::heat_engine;
  if (power < -zero && q.q_cold > zero) return Mode::refrigerator;
  return Mode::dud;
}

double power_variance(const EngineLiouvillian& L, const SteadyState& ss) {
  const SpMatC P = power_operator(L);
  const double mean = expect(P, ss.rho).real();
  MatC C0 = 0.5 * (P * ss.rho + ss.rho * P) - mean * ss.rho;
  MatC X = solve_traceless(L, -C0);
  X -= X.trace() * ss.rho;
  const double var = 2.0 * expect(P, X).real();
  if (var < -1e-8 * std::max(1.0, std::abs(mean)))
    throw NumericalInconsistency("negative power variance " + std::to_string(var));
  return var;
}

double bound_temperature(const EngineParams& p) { return p.scale() / p.beta1; }

double constancy_value(double power, double variance, const EngineParams& p) {
  const Efficiencies e = efficiency_cop(p);
  return power / variance * 2.0 * e.eta * bound_temperature(p) / (e.eta_C - e.eta);
}

double constancy(const ThermoReport& r, const EngineParams& p) {
  if (r.mode != Mode::heat_engine)
    throw ModeError("constancy requires heat-engine mode (got " + to_string(r.mode) + ")");
  return constancy_value(r.power, r.variance, p);
}

double delta_E_star(double E1, double T1, double T2) { return E1 * (T2 - T1) / T1; }

ThermoReport thermo_report(const EngineParams& p, bool with_variance) {
  const EngineLiouvillian L = build(p);
  const SteadyState ss = steady_state(L);
  ThermoReport r;
  r.power = power(L, ss);
  const HeatCurrents q = heat_currents(L, ss);
  r.q_cold = q.q_cold;
  r.q_hot = q.q_hot;
  r.entropy_rate = entropy_rate(p, q);
  r.mode = classify(r.power, q, 1e-12 * p.gamma_eff() * p.E1);
  if (p.delta_E() != 0.0) {
    const Efficiencies e = efficiency_cop(p);
    r.efficiency = e.eta;
    r.cop = e.eps;
  }
  if (with_variance && p.omega0 > 0 && p.delta_E() != 0.0) {
    r.variance = power_variance(L, ss);
    r.fano = r.variance / r.power;
    r.constancy = constancy_value(r.power, r.variance, p);
  }
  return r;
}

}  // namespace spinpair
