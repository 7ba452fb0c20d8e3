#pragma once

#include <Eigen/Dense>

#include "spinpair/macrocumulant.hpp"

namespace spinpair {

// Linear regression dynamics of u = (m1x, m1y, m2x, m2y): du/dtau = M u.
struct TwoTimeSystem {
  Eigen::Matrix4d M;
  Eigen::Matrix4d c0;  // c0(a, b) = <u_a u_b>_ss, column b is the initial operator
};

TwoTimeSystem build_two_time_system(const MomentState& ss, const MacroParams& p,
                                    double mean_tol = 1e-8);

// integral_0^inf <u_a(tau) u_b(0)> dtau = (-M^{-1} c0)(a, b)
Eigen::Matrix4d correlation_integrals(const TwoTimeSystem& sys);

// integral_0^inf C_ab(tau) C_cd(tau) dtau with C(tau) = exp(M tau) c0
double product_integral(const TwoTimeSystem& sys, int a, int b, int c, int d);

double macro_power_variance(const MomentState& ss, const MacroParams& p);

// Requires heat-engine mode (positive power and Delta E below the Carnot boundary).
double macro_constancy(const MomentState& ss, const MacroParams& p);
double macro_constancy_value(double power, double variance, const MacroParams& p);

}  // namespace spinpair
