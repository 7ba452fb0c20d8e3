#include "spinpair/correlations.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

namespace spinpair {

namespace {

using M2 = Eigen::Matrix2cd;

std::array<M2, 4> pauli() {
  const std::complex<double> i(0, 1);
  M2 s0 = M2::Identity(), sx, sy, sz;
  sx << 0, 1, 1, 0;
  sy << 0, -i, i, 0;
  sz << 1, 0, 0, -1;
  return {s0, sx, sy, sz};
}

}  // namespace

TwoSpinState reduced_two_spin_state(const MomentState& ss, double clip_tol) {
  const auto s = pauli();
  TwoSpinState st;
  st.rho12.setZero();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double c;
      if (a == 0 && b == 0) c = 1.0;
      else if (b == 0) c = ss.first(MomentState::var(1, a - 1));
      else if (a == 0) c = ss.first(MomentState::var(2, b - 1));
      else c = ss.second(MomentState::var(1, a - 1), MomentState::var(2, b - 1));
      st.rho12 += 0.25 * c * Eigen::Matrix4cd(Eigen::kroneckerProduct(s[a], s[b]));
    }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(st.rho12);
  const double mn = es.eigenvalues().minCoeff();
  if (mn < -clip_tol)
    throw TomographyError("reconstructed state has eigenvalue " + std::to_string(mn));
  if (mn < 0) {
    const Eigen::Vector4d ev = es.eigenvalues().cwiseMax(0.0);
    st.rho12 = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    st.rho12 /= st.rho12.trace().real();
    st.clip_applied = true;
  }
  return st;
}

Eigen::Matrix2cd partial_state(const Eigen::Matrix4cd& rho12, int spin) {
  Eigen::Matrix2cd r = Eigen::Matrix2cd::Zero();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int k = 0; k < 2; ++k)
        r(a, b) += spin == 1 ? rho12(2 * a + k, 2 * b + k) : rho12(2 * k + a, 2 * k + b);
  return r;
}

double mutual_information(const TwoSpinState& st) {
  return entropy(partial_state(st.rho12, 1)) + entropy(partial_state(st.rho12, 2)) -
         entropy(st.rho12);
}

double concurrence(const TwoSpinState& st) {
  const auto s = pauli();
  const Eigen::Matrix4cd yy = Eigen::kroneckerProduct(s[2], s[2]);
  const Eigen::Matrix4cd R = st.rho12 * yy * st.rho12.conjugate() * yy;
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(R, false);
  std::array<double, 4> l;
  for (int i = 0; i < 4; ++i) l[i] = std::sqrt(std::max(0.0, es.eigenvalues()[i].real()));
  std::sort(l.begin(), l.end(), std::greater<>());
  return std::max(0.0, l[0] - l[1] - l[2] - l[3]);
}

}  // namespace spinpair
