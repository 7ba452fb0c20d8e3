#pragma once

#include <complex>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace spinpair {

using cplx = std::complex<double>;
using SpMatC = Eigen::SparseMatrix<cplx>;
using SpMatR = Eigen::SparseMatrix<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;

// Tr[A rho] for sparse A.
template <typename Scalar>
cplx expect(const Eigen::SparseMatrix<Scalar>& A, const MatC& rho) {
  cplx acc = 0.0;
  for (int k = 0; k < A.outerSize(); ++k)
    for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(A, k); it; ++it)
      acc += cplx(it.value()) * rho(it.col(), it.row());
  return acc;
}

}  // namespace spinpair
