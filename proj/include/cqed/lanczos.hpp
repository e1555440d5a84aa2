#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>

namespace cqed {

using SparseHermitian = Eigen::SparseMatrix<std::complex<double>>;

struct LanczosOptions {
  double tol = 1e-12;        // relative residual of the shifted-inverse operator
  int max_restarts = 400;
  int krylov_dim = 0;        // 0: chosen from k
  unsigned long seed = 12345;
};

struct EigenPairs {
  Eigen::VectorXd values;      // ascending
  Eigen::MatrixXcd vectors;    // columns, orthonormal
};

// Lowest k eigenpairs of a Hermitian sparse matrix by shift-invert Lanczos
// with thick restarts and full reorthogonalization. A deflated second pass
// picks up eigenvalue copies missed by a single Krylov sequence.
EigenPairs lowest_eigenpairs(const SparseHermitian& H, int k, const LanczosOptions& opt = {});

// Lower bound of the spectrum from Gershgorin discs.
double gershgorin_lower_bound(const SparseHermitian& H);

}  // namespace cqed
