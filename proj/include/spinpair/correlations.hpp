#pragma once

#include <Eigen/Dense>

#include "spinpair/macrocumulant.hpp"

namespace spinpair {

struct TwoSpinState {
  Eigen::Matrix4cd rho12;
  bool clip_applied = false;
};

// Pauli tomography from <sigma_1^a> = <m_1^a> and <sigma_1^a sigma_2^b> = <m_1^a m_2^b>.
TwoSpinState reduced_two_spin_state(const MomentState& ss, double clip_tol = 1e-6);

// Reduced single-spin state of spin 1 or 2.
Eigen::Matrix2cd partial_state(const Eigen::Matrix4cd& rho12, int spin);

// von Neumann entropy in nats.
template <typename Derived>
double entropy(const Eigen::MatrixBase<Derived>& rho) {
  Eigen::SelfAdjointEigenSolver<typename Derived::PlainObject> es(rho, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double p = es.eigenvalues()[i];
    if (p > 1e-300) s -= p * std::log(p);
  }
  return s;
}

double mutual_information(const TwoSpinState& st);
double concurrence(const TwoSpinState& st);

}  // namespace spinpair
