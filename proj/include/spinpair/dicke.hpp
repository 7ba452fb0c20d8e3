#pragma once

#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Sparse>

#include "spinpair/errors.hpp"

namespace spinpair {

// Maximal-spin sector S = N/2. Index k = 0..N holds m = S - k (row 0 is m = +S).
struct SpinBasis {
  int N = 1;
  double S() const { return 0.5 * N; }
  int dim() const { return N + 1; }
  double m(int k) const { return S() - k; }
};

template <typename Scalar>
struct SpinOps {
  SpinBasis basis;
  Eigen::SparseMatrix<Scalar> plus, minus, z;
};

template <typename Scalar = double>
SpinOps<Scalar> build_single_ensemble_ops(int N) {
  if (N < 1) throw InvalidParameter("N must be ≥ 1");
  SpinOps<Scalar> ops;
  ops.basis.N = N;
  const int d = N + 1;
  const double S = ops.basis.S();
  std::vector<Eigen::Triplet<Scalar>> tp, tz;
  for (int k = 1; k <= N; ++k) {
    const double m = ops.basis.m(k);
    tp.emplace_back(k - 1, k, Scalar(std::sqrt(S * (S + 1) - m * (m + 1))));
  }
  for (int k = 0; k < d; ++k) tz.emplace_back(k, k, Scalar(ops.basis.m(k)));
  ops.plus.resize(d, d);
  ops.plus.setFromTriplets(tp.begin(), tp.end());
  ops.minus = ops.plus.adjoint();
  ops.z.resize(d, d);
  ops.z.setFromTriplets(tz.begin(), tz.end());
  return ops;
}

template <typename Scalar>
Eigen::SparseMatrix<Scalar> kron(const Eigen::SparseMatrix<Scalar>& A,
                                 const Eigen::SparseMatrix<Scalar>& B) {
  std::vector<Eigen::Triplet<Scalar>> t;
  t.reserve(static_cast<size_t>(A.nonZeros()) * B.nonZeros());
  for (int ka = 0; ka < A.outerSize(); ++ka)
    for (typename Eigen::SparseMatrix<Scalar>::InnerIterator a(A, ka); a; ++a)
      for (int kb = 0; kb < B.outerSize(); ++kb)
        for (typename Eigen::SparseMatrix<Scalar>::InnerIterator b(B, kb); b; ++b)
          t.emplace_back(a.row() * B.rows() + b.row(), a.col() * B.cols() + b.col(),
                         a.value() * b.value());
  Eigen::SparseMatrix<Scalar> K(A.rows() * B.rows(), A.cols() * B.cols());
  K.setFromTriplets(t.begin(), t.end());
  return K;
}

template <typename Scalar>
Eigen::SparseMatrix<Scalar> sparse_identity(int d) {
  Eigen::SparseMatrix<Scalar> I(d, d);
  I.setIdentity();
  return I;
}

// Two ensembles in the product space; pair index is k1 * (N+1) + k2.
template <typename Scalar>
struct CollectiveOps {
  SpinBasis basis;
  std::array<SpinOps<Scalar>, 2> ens;
  int dim() const { return basis.dim() * basis.dim(); }
  const SpinOps<Scalar>& operator[](int i) const { return ens[i - 1]; }
};

template <typename Scalar>
CollectiveOps<Scalar> embed_pair(const SpinOps<Scalar>& a, const SpinOps<Scalar>& b) {
  if (a.basis.N != b.basis.N) throw InvalidParameter("embed_pair: ensembles must have equal N");
  const auto I = sparse_identity<Scalar>(a.basis.dim());
  CollectiveOps<Scalar> c;
  c.basis = a.basis;
  c.ens[0] = {a.basis, kron(a.plus, I), kron(a.minus, I), kron(a.z, I)};
  c.ens[1] = {b.basis, kron(I, b.plus), kron(I, b.minus), kron(I, b.z)};
  return c;
}

template <typename Scalar = double>
CollectiveOps<Scalar> build_collective_ops(int N) {
  const auto s = build_single_ensemble_ops<Scalar>(N);
  return embed_pair(s, s);
}

}  // namespace spinpair
