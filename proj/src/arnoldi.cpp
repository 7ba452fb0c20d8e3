#include <algorithm>
#include <random>

#include <Eigen/SparseLU>

#include "spinpair/liouville.hpp"

namespace spinpair {

std::vector<cplx> shift_invert_eigs(const SpMatC& A, cplx sigma, int k, double tol, int max_dim) {
  const int n = static_cast<int>(A.rows());
  SpMatC S = A;
  for (int i = 0; i < n; ++i) S.coeffRef(i, i) -= sigma;
  S.makeCompressed();
  Eigen::SparseLU<SpMatC, Eigen::COLAMDOrdering<int>> lu(S);
  if (lu.info() != Eigen::Success) throw ConvergenceError("shift-invert factorization failed", 0.0);

  const int m_max = std::min(max_dim, n);
  MatC V(n, m_max + 1);
  MatC H = MatC::Zero(m_max + 1, m_max);
  std::mt19937 rng(12345);
  std::normal_distribution<double> g;
  VecC v0(n);
  for (int i = 0; i < n; ++i) v0[i] = cplx(g(rng), g(rng));
  V.col(0) = v0.normalized();

  double worst = 0.0;
  for (int m = 0; m < m_max; ++m) {
    VecC w = lu.solve(V.col(m));
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j <= m; ++j) {
        const cplx h = V.col(j).dot(w);
        H(j, m) += h;
        w -= h * V.col(j);
      }
    }
    H(m + 1, m) = w.norm();
    const bool breakdown = std::abs(H(m + 1, m)) < 1e-14;
    if (!breakdown) V.col(m + 1) = w / H(m + 1, m);

    const int dim = m + 1;
    if (dim < std::min(2 * k + 10, m_max) && !breakdown) continue;
    Eigen::ComplexEigenSolver<MatC> es(H.topLeftCorner(dim, dim));
    std::vector<int> order(dim);
    for (int i = 0; i < dim; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return std::abs(es.eigenvalues()[a]) > std::abs(es.eigenvalues()[b]);
    });
    const int want = std::min(k, dim);
    worst = 0.0;
    for (int i = 0; i < want; ++i) {
      const int r = order[i];
      const double res = std::abs(H(m + 1, m)) * std::abs(es.eigenvectors()(dim - 1, r));
      worst = std::max(worst, res / std::abs(es.eigenvalues()[r]));
    }
    if (worst < tol || breakdown) {
      std::vector<cplx> out;
      for (int i = 0; i < want; ++i) out.push_back(sigma + 1.0 / es.eigenvalues()[order[i]]);
      return out;
    }
  }
  throw ConvergenceError("shift-invert Arnoldi did not converge", worst);
}

}  // namespace spinpair
