#pragma once

#include <string>

#include "spinpair/liouville.hpp"

namespace spinpair {

enum class Mode { heat_engine, refrigerator, dud };

std::string to_string(Mode m);

struct HeatCurrents {
  double q_cold, q_hot;  // flowing into the system
};

struct Efficiencies {
  double eta, eps, eta_C, eps_C;
};

struct ThermoReport {
  double power = 0, q_cold = 0, q_hot = 0;
  double efficiency = 0, cop = 0, entropy_rate = 0;
  double variance = 0, fano = 0, constancy = 0;
  Mode mode = Mode::dud;
};

SpMatC power_operator(const EngineLiouvillian& L);

double power(const EngineLiouvillian& L, const SteadyState& ss);
HeatCurrents heat_currents(const EngineLiouvillian& L, const SteadyState& ss);
Efficiencies efficiency_cop(const EngineParams& p);
double entropy_rate(const EngineParams& p, const HeatCurrents& q);
Mode classify(double power, const HeatCurrents& q, double zero);

// 2 * integral of the connected, symmetrized power autocorrelation.
double power_variance(const EngineLiouvillian& L, const SteadyState& ss);

// Temperature entering the bound; scaled with N under high-temperature scaling.
double bound_temperature(const EngineParams& p);

// (P/Var) * 2 eta T1 / (eta_C - eta), no mode check.
double constancy_value(double power, double variance, const EngineParams& p);
// Same, but requires heat-engine mode.
double constancy(const ThermoReport& r, const EngineParams& p);

// Heat-engine / refrigerator boundary Delta E* = E1 (T2 - T1) / T1.
double delta_E_star(double E1, double T1, double T2);

ThermoReport thermo_report(const EngineParams& p, bool with_variance = true);

}  // namespace spinpair
