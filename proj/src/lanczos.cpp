#include "cqed/lanczos.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <random>

#include "cqed/errors.hpp"

namespace cqed {

namespace {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

// (H - sigma)^-1 with a Cholesky-type factorization, LU as fallback.
class ShiftInverse {
 public:
  ShiftInverse(const SparseHermitian& H, double sigma) {
    SparseHermitian A = H;
    for (int i = 0; i < A.rows(); ++i) A.coeffRef(i, i) -= sigma;
    A.makeCompressed();
    ldlt_.compute(A);
    if (ldlt_.info() != Eigen::Success) {
      lu_ = std::make_unique<Eigen::SparseLU<SparseHermitian>>();
      lu_->analyzePattern(A);
      lu_->factorize(A);
      if (lu_->info() != Eigen::Success) throw ConvergenceFailure("shift-invert factorization failed");
    }
  }
  Vec apply(const Vec& v) const { return lu_ ? Vec(lu_->solve(v)) : Vec(ldlt_.solve(v)); }

 private:
  Eigen::SimplicialLDLT<SparseHermitian, Eigen::Lower> ldlt_;
  std::unique_ptr<Eigen::SparseLU<SparseHermitian>> lu_;
};

void orthogonalize(Vec& w, const Mat& Q) {
  if (Q.cols() == 0) return;
  for (int pass = 0; pass < 2; ++pass) w -= Q * (Q.adjoint() * w);
}

Vec random_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(nd(rng), nd(rng));
  return v;
}

struct RitzResult {
  Eigen::VectorXd theta;  // descending
  Mat vectors;
  bool converged = false;
};

// Thick-restart Lanczos for the nev largest eigenvalues of op restricted to
// the orthogonal complement of Q.
RitzResult restarted_lanczos(const std::function<Vec(const Vec&)>& op, int n, int nev, const Mat& Q,
                             const LanczosOptions& opt, std::mt19937_64& rng) {
  const int avail = n - static_cast<int>(Q.cols());
  nev = std::min(nev, avail);
  int m = opt.krylov_dim > 0 ? opt.krylov_dim : std::max(2 * nev + 20, 40);
  m = std::min(m, avail);
  m = std::max(m, nev);

  Mat V(n, m + 1);
  Mat S = Mat::Zero(m, m);
  Vec v0 = random_vector(n, rng);
  orthogonalize(v0, Q);
  V.col(0) = v0.normalized();

  int p = 0;
  RitzResult res;
  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    double beta = 0.0;
    for (int j = p; j < m; ++j) {
      Vec w = op(V.col(j));
      orthogonalize(w, Q);
      Vec h = V.leftCols(j + 1).adjoint() * w;
      w -= V.leftCols(j + 1) * h;
      Vec h2 = V.leftCols(j + 1).adjoint() * w;
      w -= V.leftCols(j + 1) * h2;
      orthogonalize(w, Q);
      h += h2;
      h(j) = h(j).real();
      S.col(j).head(j + 1) = h;
      S.row(j).head(j + 1) = h.adjoint();
      beta = w.norm();
      const double hn = h.norm();
      if (beta <= 1e-13 * std::max(hn, 1e-300)) {
        // Invariant subspace reached; continue with a fresh direction.
        beta = 0.0;
        Vec r = random_vector(n, rng);
        orthogonalize(r, Q);
        for (int pass = 0; pass < 2; ++pass) r -= V.leftCols(j + 1) * (V.leftCols(j + 1).adjoint() * r);
        V.col(j + 1) = r.normalized();
      } else {
        V.col(j + 1) = w / beta;
      }
    }

    Eigen::SelfAdjointEigenSolver<Mat> es(S);
    const Eigen::VectorXd& th = es.eigenvalues();  // ascending
    const Mat& Y = es.eigenvectors();

    bool ok = true;
    for (int i = 0; i < nev; ++i) {
      const int c = m - 1 - i;
      const double r = beta * std::abs(Y(m - 1, c));
      if (r > opt.tol * std::abs(th(c))) ok = false;
    }

    const bool last = restart == opt.max_restarts;
    if (ok || last || m == avail) {
      res.theta.resize(nev);
      res.vectors.resize(n, nev);
      for (int i = 0; i < nev; ++i) {
        const int c = m - 1 - i;
        res.theta(i) = th(c);
        res.vectors.col(i) = V.leftCols(m) * Y.col(c);
      }
      res.converged = ok || m == avail;
      return res;
    }

    p = std::min(nev + (m - nev) / 2, m - 1);
    Mat keep(n, p);
    S.setZero();
    for (int i = 0; i < p; ++i) {
      const int c = m - 1 - i;
      keep.col(i) = V.leftCols(m) * Y.col(c);
      S(i, i) = th(c);
    }
    Vec next = V.col(m);
    V.leftCols(p) = keep;
    V.col(p) = next;
  }
  return res;
}

}  // namespace

double gershgorin_lower_bound(const SparseHermitian& H) {
  double lo = std::numeric_limits<double>::infinity();
  for (int c = 0; c < H.outerSize(); ++c) {
    double diag = 0.0, off = 0.0;
    for (SparseHermitian::InnerIterator it(H, c); it; ++it) {
      if (it.row() == c) diag = it.value().real();
      else off += std::abs(it.value());
    }
    lo = std::min(lo, diag - off);
  }
  return lo;
}

EigenPairs lowest_eigenpairs(const SparseHermitian& H, int k, const LanczosOptions& opt) {
  const int n = static_cast<int>(H.rows());
  if (H.cols() != n) throw DimensionMismatch("operator is not square");
  if (k < 1 || k >= n) throw ValueError("requested eigenpair count must satisfy 1 <= k < dimension");

  double hi = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < H.outerSize(); ++c) {
    double diag = 0.0, off = 0.0;
    for (SparseHermitian::InnerIterator it(H, c); it; ++it) {
      if (it.row() == c) diag = it.value().real();
      else off += std::abs(it.value());
    }
    hi = std::max(hi, diag + off);
  }
  const double lo = gershgorin_lower_bound(H);
  const double spread = std::max(hi - lo, 1e-300);
  const double sigma = lo - 1e-3 * spread;
  ShiftInverse inv(H, sigma);
  auto op = [&inv](const Vec& v) { return inv.apply(v); };

  std::mt19937_64 rng(opt.seed);
  Mat found(n, 0);
  Eigen::VectorXd values;
  for (int sweep = 0; sweep < 8; ++sweep) {
    RitzResult rr = restarted_lanczos(op, n, sweep == 0 ? k : std::min(k, n - (int)found.cols()), found, opt, rng);
    if (!rr.converged) throw ConvergenceFailure("Lanczos iteration did not converge");
    if (sweep > 0) {
      const double lam_new = sigma + 1.0 / rr.theta(0);
      if (lam_new > values(k - 1) + 1e-10 * spread) break;
    }
    Mat all(n, found.cols() + rr.vectors.cols());
    all << found, rr.vectors;
    Eigen::HouseholderQR<Mat> qr(all);
    Mat B = qr.householderQ() * Mat::Identity(n, all.cols());
    Mat P = B.adjoint() * (H * B);
    P = 0.5 * (P + P.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(P);
    found = B * es.eigenvectors();
    values = es.eigenvalues();
    if (found.cols() >= n) break;
  }

  EigenPairs out;
  out.values = values.head(k);
  out.vectors = found.leftCols(k);
  for (int i = 0; i < k; ++i) {
    const Vec r = H * out.vectors.col(i) - out.values(i) * out.vectors.col(i);
    if (r.norm() > 1e-7 * spread) throw ConvergenceFailure("eigenpair residual above tolerance");
  }
  return out;
}

}  // namespace cqed
