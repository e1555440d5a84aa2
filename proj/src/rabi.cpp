#include "cqed/rabi.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "cqed/constants.hpp"
#include "cqed/errors.hpp"

namespace cqed {

namespace {

using cplx = std::complex<double>;
using Triplet = Eigen::Triplet<cplx>;

std::vector<std::size_t> strides_of(const std::vector<int>& dims) {
  std::vector<std::size_t> s(dims.size(), 1);
  for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k) s[k] = s[k + 1] * dims[k + 1];
  return s;
}

}  // namespace

std::size_t TruncationSpec::dimension() const {
  std::size_t d = static_cast<std::size_t>(std::max(N_q, 0));
  for (int c : photon_caps) d *= static_cast<std::size_t>(std::max(c, 0));
  return d;
}

std::vector<int> TruncationSpec::dims() const {
  std::vector<int> d{N_q};
  d.insert(d.end(), photon_caps.begin(), photon_caps.end());
  return d;
}

void TruncationSpec::validate() const {
  if (N_q < 2) throw ValueError("N_q must be at least 2");
  for (int c : photon_caps)
    if (c < 1) throw ValueError("every photon cap must be at least 1");
  if (dimension() > max_dimension)
    throw DimensionError("Hilbert-space dimension " + std::to_string(dimension()) + " exceeds the budget " +
                         std::to_string(max_dimension));
}

RabiCoefficients rabi_coefficients(const QuantizedSystem& qs, const CpbSpectrum& cpb) {
  if (qs.q_zpf_m.size() != qs.M || qs.omega_m.size() != qs.M)
    throw DimensionMismatch("quantized system has inconsistent mode arrays");
  RabiCoefficients c;
  c.mode_freq_hz = qs.omega_m / constants::two_pi;
  c.transmon_levels_hz = cpb.energies_hz;
  const Eigen::MatrixXcd Nh = 0.5 * (cpb.charge_matrix + cpb.charge_matrix.adjoint());
  for (int m = 0; m < qs.M; ++m)
    c.g_hz.push_back(Nh * (qs.q_zpf_m(m) * 2.0 * constants::e * qs.inv_cap_transmon_mode / constants::h));
  c.G_hz = qs.G / constants::two_pi;
  return c;
}

SparseHermitian assemble(const RabiCoefficients& c, const TruncationSpec& t) {
  t.validate();
  const int M = c.M();
  if (static_cast<int>(t.photon_caps.size()) != M)
    throw DimensionMismatch("photon caps count differs from the number of modes");
  if (c.N_q() < t.N_q) throw DimensionMismatch("fewer transmon levels than N_q");
  if (static_cast<int>(c.g_hz.size()) != M || c.G_hz.rows() != M || c.G_hz.cols() != M)
    throw DimensionMismatch("coupling arrays do not match the mode count");
  for (const auto& g : c.g_hz)
    if (g.rows() < t.N_q || g.cols() < t.N_q) throw DimensionMismatch("coupling matrix smaller than N_q");

  const std::vector<int> dims = t.dims();
  const std::vector<std::size_t> st = strides_of(dims);
  const std::size_t n = t.dimension();
  const int Nq = t.N_q;

  std::vector<Triplet> trip;
  trip.reserve(n * (1 + 2 * M * Nq + 2 * M * M));
  std::vector<int> occ(dims.size(), 0);
  for (std::size_t idx = 0; idx < n; ++idx) {
    std::size_t r = idx;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      occ[k] = static_cast<int>(r / st[k]);
      r %= st[k];
    }
    const int i = occ[0];
    double diag = c.transmon_levels_hz(i);
    for (int m = 0; m < M; ++m) diag += occ[m + 1] * c.mode_freq_hz(m);
    trip.emplace_back(idx, idx, diag);

    // Raising a photon in mode m while the transmon goes i -> j.
    for (int m = 0; m < M; ++m) {
      const int nm = occ[m + 1];
      if (nm + 1 >= dims[m + 1]) continue;
      const double amp = std::sqrt(nm + 1.0);
      const std::size_t base = idx - i * st[0] + st[m + 1];
      for (int j = 0; j < Nq; ++j) {
        const cplx v = c.g_hz[m](j, i) * amp;
        if (v == cplx(0.0)) continue;
        const std::size_t to = base + j * st[0];
        trip.emplace_back(to, idx, v);
        trip.emplace_back(idx, to, std::conj(v));
      }
    }

    for (int m = 0; m < M; ++m) {
      const int nm = occ[m + 1];
      if (nm + 1 >= dims[m + 1]) continue;
      for (int q = m + 1; q < M; ++q) {
        const double G = c.G_hz(m, q);
        if (G == 0.0) continue;
        const int nq = occ[q + 1];
        if (nq + 1 < dims[q + 1]) {
          const double v = G * std::sqrt((nm + 1.0) * (nq + 1.0));
          const std::size_t to = idx + st[m + 1] + st[q + 1];
          trip.emplace_back(to, idx, v);
          trip.emplace_back(idx, to, v);
        }
        if (nq > 0) {
          const double v = G * std::sqrt((nm + 1.0) * nq);
          const std::size_t to = idx + st[m + 1] - st[q + 1];
          trip.emplace_back(to, idx, v);
          trip.emplace_back(idx, to, v);
        }
      }
    }
  }

  SparseHermitian H(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  H.setFromTriplets(trip.begin(), trip.end());
  H.makeCompressed();
  return H;
}

SparseHermitian assemble(const QuantizedSystem& qs, const CpbSpectrum& cpb, const TruncationSpec& t) {
  RabiCoefficients c = rabi_coefficients(qs, cpb);
  if (c.N_q() < t.N_q) throw DimensionMismatch("CPB spectrum has fewer levels than N_q");
  return assemble(c, t);
}

std::string BasisLabel::to_string() const {
  std::string s = "|";
  for (std::size_t k = 0; k < n.size(); ++k) {
    if (k) s += ",";
    s += std::to_string(n[k]);
  }
  return s + ">";
}

BasisLabel unflatten(std::size_t index, const std::vector<int>& dims) {
  const auto st = strides_of(dims);
  BasisLabel l;
  l.n.resize(dims.size());
  for (std::size_t k = 0; k < dims.size(); ++k) {
    l.n[k] = static_cast<int>(index / st[k]);
    index %= st[k];
  }
  return l;
}

std::size_t flatten(const BasisLabel& l, const std::vector<int>& dims) {
  if (l.n.size() != dims.size()) throw DimensionMismatch("label rank differs from the tensor rank");
  const auto st = strides_of(dims);
  std::size_t idx = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (l.n[k] < 0 || l.n[k] >= dims[k]) throw ValueError("label " + l.to_string() + " is outside the truncation");
    idx += l.n[k] * st[k];
  }
  return idx;
}

int HamiltonianModel::track(const BasisLabel& bare) const {
  const std::size_t idx = flatten(bare, dims);
  int best = 0;
  double bw = -1.0;
  for (int c = 0; c < eigenvectors.cols(); ++c) {
    const double w = std::norm(eigenvectors(idx, c));
    if (w > bw) {
      bw = w;
      best = c;
    }
  }
  return best;
}

HamiltonianModel diagonalize(const SparseHermitian& H, int k, const std::vector<int>& dims,
                             const DiagonalizeOptions& opt) {
  const int n = static_cast<int>(H.rows());
  if (H.cols() != n) throw DimensionMismatch("operator is not square");
  const std::size_t prod = std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                                           [](std::size_t a, int b) { return a * static_cast<std::size_t>(b); });
  if (prod != static_cast<std::size_t>(n)) throw DimensionMismatch("tensor dimensions do not match the operator");
  if (k < 1 || k > n) throw ValueError("k must satisfy 1 <= k <= dimension");

  HamiltonianModel out;
  out.dimension = n;
  out.dims = dims;
  Eigen::VectorXd vals;
  Eigen::MatrixXcd vecs;
  if ((!opt.force_iterative && n <= opt.dense_threshold) || k == n) {
    Eigen::MatrixXcd D = Eigen::MatrixXcd(H);
    Eigen::VectorXd w(n);
    const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                                           reinterpret_cast<lapack_complex_double*>(D.data()), n, w.data());
    if (info != 0) throw ConvergenceFailure("dense eigensolver failed (zheevd info " + std::to_string(info) + ")");
    vals = w.head(k);
    vecs = D.leftCols(k);
  } else {
    EigenPairs ep = lowest_eigenpairs(H, k, opt.lanczos);
    vals = ep.values;
    vecs = ep.vectors;
  }

  out.ground_energy_hz = vals(0);
  out.eigenvalues_hz = vals.array() - vals(0);
  out.eigenvalues_hz(0) = 0.0;
  for (int c = 0; c < k; ++c) {
    auto col = vecs.col(c);
    fix_phase(col);
  }
  out.eigenvectors = std::move(vecs);
  out.labels.reserve(k);
  for (int c = 0; c < k; ++c) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < n; ++r) {
      const double w = std::norm(out.eigenvectors(r, c));
      if (w > best) {
        best = w;
        arg = r;
      }
    }
    out.labels.push_back(unflatten(static_cast<std::size_t>(arg), dims));
  }
  return out;
}

HamiltonianModel diagonalize(const SparseHermitian& H, int k, const DiagonalizeOptions& opt) {
  return diagonalize(H, k, std::vector<int>{static_cast<int>(H.rows())}, opt);
}

ConvergenceReport check_convergence(const QuantizedSystem& qs, const CpbParams& p, const TruncationSpec& t,
                                    std::vector<BasisLabel> tracked, const DiagonalizeOptions& opt) {
  if (!(t.linewidth_hz > 0)) throw ValueError("linewidth_hz must be positive");
  const int M = qs.M;
  if (tracked.empty()) {
    BasisLabel l;
    l.n.assign(M + 1, 0);
    l.n[0] = 1;
    tracked.push_back(l);
    for (int m = 0; m < M; ++m) {
      BasisLabel b;
      b.n.assign(M + 1, 0);
      b.n[m + 1] = 1;
      tracked.push_back(b);
    }
  }

  auto run = [&](const TruncationSpec& ts) {
    const CpbSpectrum cpb = cpb_diagonalize(p, ts.N_q);
    const SparseHermitian H = assemble(qs, cpb, ts);
    const int n = static_cast<int>(ts.dimension());
    const int k = std::min(n - 1, std::max<int>(4 * static_cast<int>(tracked.size()) + 4, 12));
    const HamiltonianModel hm = diagonalize(H, std::max(k, 1), ts.dims(), opt);
    std::vector<double> f;
    for (const auto& l : tracked) f.push_back(hm.transition_hz(l));
    return f;
  };

  ConvergenceReport rep;
  rep.tracked = tracked;
  rep.threshold_hz = t.linewidth_hz / 10.0;
  rep.reference_hz = run(t);

  auto compare = [&](const TruncationSpec& ts, const std::string& name) {
    const auto f = run(ts);
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s = std::max(s, std::abs(f[i] - rep.reference_hz[i]));
    rep.varied.push_back(name);
    rep.shift_hz.push_back(s);
    rep.max_shift_hz = std::max(rep.max_shift_hz, s);
  };

  TruncationSpec tq = t;
  tq.N_q += 1;
  compare(tq, "N_q");
  for (int m = 0; m < M; ++m) {
    TruncationSpec tm = t;
    tm.photon_caps[m] += 1;
    compare(tm, "N_" + std::to_string(m));
  }
  rep.pass = rep.max_shift_hz < rep.threshold_hz;
  return rep;
}

Eigen::MatrixXd harmonic_two_mode_hamiltonian(double f_a, double E_C_over_h, double f_r, double g_hz, int dim_a,
                                              int dim_r) {
  if (dim_a < 2 || dim_r < 2) throw ValueError("each mode needs at least two levels");
  auto lowering = [](int d) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
    for (int k = 1; k < d; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return a;
  };
  // Quartic term built with headroom so the retained block is exact.
  const int big = dim_a + 4;
  const Eigen::MatrixXd ab = lowering(big);
  const Eigen::MatrixXd xb = ab + ab.transpose();
  const Eigen::MatrixXd x4full = (xb * xb) * (xb * xb);
  const Eigen::MatrixXd x4 = (0.5 * (x4full + x4full.transpose())).topLeftCorner(dim_a, dim_a);

  const Eigen::MatrixXd a = lowering(dim_a);
  const Eigen::MatrixXd b = lowering(dim_r);
  const Eigen::MatrixXd na = a.transpose() * a;
  const Eigen::MatrixXd nb = b.transpose() * b;
  const Eigen::MatrixXd Ha = (f_a + E_C_over_h) * na - (E_C_over_h / 12.0) * x4;
  const Eigen::MatrixXd pa = a - a.transpose();
  const Eigen::MatrixXd pb = b - b.transpose();

  const int n = dim_a * dim_r;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < dim_a; ++i)
    for (int j = 0; j < dim_a; ++j)
      for (int r = 0; r < dim_r; ++r)
        for (int s = 0; s < dim_r; ++s) {
          double v = g_hz * pa(i, j) * pb(r, s);
          if (r == s) v += Ha(i, j);
          if (i == j) v += f_r * nb(r, s);
          H(i * dim_r + r, j * dim_r + s) += v;
        }
  return H;
}

}  // namespace cqed
