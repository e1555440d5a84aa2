#include "cqed/spectro.hpp"

#include <Eigen/SparseLU>
#include <Eigen/SparseQR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <unsupported/Eigen/IterativeSolvers>

#include "cqed/designer.hpp"
#include "cqed/errors.hpp"
#include "cqed/parallel.hpp"

namespace cqed {

namespace {

using cplx = std::complex<double>;
using Triplet = Eigen::Triplet<cplx>;

SparseC sparse_identity(int n) {
  SparseC I(n, n);
  I.setIdentity();
  return I;
}

}  // namespace

SparseC kron(const SparseC& A, const SparseC& B) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(A.nonZeros()) * B.nonZeros());
  for (int ca = 0; ca < A.outerSize(); ++ca)
    for (SparseC::InnerIterator ia(A, ca); ia; ++ia)
      for (int cb = 0; cb < B.outerSize(); ++cb)
        for (SparseC::InnerIterator ib(B, cb); ib; ++ib)
          t.emplace_back(ia.row() * B.rows() + ib.row(), ia.col() * B.cols() + ib.col(), ia.value() * ib.value());
  SparseC K(A.rows() * B.rows(), A.cols() * B.cols());
  K.setFromTriplets(t.begin(), t.end());
  return K;
}

SparseC local_annihilator(int dim) {
  if (dim < 2) throw DimensionError("each Fock factor needs dimension >= 2");
  SparseC a(dim, dim);
  std::vector<Triplet> t;
  for (int n = 1; n < dim; ++n) t.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

FockSpace::FockSpace(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw DimensionError("Fock space needs at least one factor");
  for (int d : dims_) {
    if (d < 2) throw DimensionError("each Fock factor needs dimension >= 2");
    dimension_ *= d;
  }
}

SparseC FockSpace::identity() const { return sparse_identity(dimension_); }

SparseC FockSpace::embed(int k, const SparseC& local) const {
  if (k < 0 || k >= static_cast<int>(dims_.size())) throw DimensionError("factor index out of range");
  if (local.rows() != dims_[k] || local.cols() != dims_[k]) throw DimensionError("local operator size mismatch");
  int before = 1, after = 1;
  for (int i = 0; i < k; ++i) before *= dims_[i];
  for (std::size_t i = k + 1; i < dims_.size(); ++i) after *= dims_[i];
  return kron(kron(sparse_identity(before), local), sparse_identity(after));
}

SparseC FockSpace::annihilator(int k) const {
  if (k < 0 || k >= static_cast<int>(dims_.size())) throw DimensionError("factor index out of range");
  return embed(k, local_annihilator(dims_[k]));
}

SparseC FockSpace::number(int k) const {
  const SparseC a = annihilator(k);
  return SparseC(a.adjoint()) * a;
}

SparseC liouvillian(const LindbladModel& m) {
  const int n = static_cast<int>(m.H.rows());
  if (m.H.cols() != n) throw DimensionError("Hamiltonian is not square");
  const SparseC I = sparse_identity(n);
  const cplx mi(0.0, -1.0);
  SparseC Ht = m.H.transpose();
  SparseC L = mi * (kron(I, m.H) - kron(Ht, I));
  for (const auto& C : m.collapse) {
    if (C.rows() != n || C.cols() != n) throw DimensionError("collapse operator size mismatch");
    const SparseC Cd = C.adjoint();
    const SparseC CdC = Cd * C;
    const SparseC CdCt = CdC.transpose();
    const SparseC Cc = C.conjugate();
    L += kron(Cc, C) - 0.5 * kron(I, CdC) - 0.5 * kron(CdCt, I);
  }
  L.makeCompressed();
  return L;
}

Eigen::MatrixXcd steady_state(const LindbladModel& m, const SteadyStateOptions& opt) {
  if (m.collapse.empty()) throw SingularLiouvillian("no collapse operators: the steady state is not unique");
  const int n = static_cast<int>(m.H.rows());
  const SparseC L = liouvillian(m);
  const int N = n * n;

  // Replace the first equation with the unit-trace constraint.
  std::vector<Triplet> t;
  t.reserve(L.nonZeros() + n);
  for (int c = 0; c < L.outerSize(); ++c)
    for (SparseC::InnerIterator it(L, c); it; ++it)
      if (it.row() != 0) t.emplace_back(it.row(), it.col(), it.value());
  for (int i = 0; i < n; ++i) t.emplace_back(0, i * n + i, 1.0);
  SparseC A(N, N);
  A.setFromTriplets(t.begin(), t.end());
  A.makeCompressed();
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(N);
  rhs(0) = 1.0;

  Eigen::VectorXcd x;
  bool solved = false;
  if (static_cast<std::size_t>(N) > opt.iterative_threshold) {
    Eigen::GMRES<SparseC, Eigen::IncompleteLUT<cplx>> gm;
    gm.setTolerance(opt.gmres_tol);
    gm.setMaxIterations(opt.gmres_max_iter);
    gm.set_restart(200);
    gm.compute(A);
    if (gm.info() == Eigen::Success) {
      x = gm.solve(rhs);
      solved = gm.info() == Eigen::Success && (A * x - rhs).norm() < 1e-9;
    }
  }
  if (!solved) {
    Eigen::SparseLU<SparseC> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() == Eigen::Success) {
      x = lu.solve(rhs);
      solved = lu.info() == Eigen::Success && x.allFinite();
    }
  }
  if (!solved) {
    Eigen::SparseQR<SparseC, Eigen::COLAMDOrdering<int>> qr(L);
    const long nullity = N - static_cast<long>(qr.rank());
    throw SingularLiouvillian("Liouvillian solve is singular; null-space dimension estimate " +
                              std::to_string(nullity));
  }

  Eigen::MatrixXcd rho = Eigen::Map<Eigen::MatrixXcd>(x.data(), n, n);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return rho;
}

void SpectroModel::validate() const {
  if (modes.empty()) throw ValueError("model has no modes");
  for (const auto& md : modes) {
    if (md.dim < 2) throw DimensionError("mode " + md.name + " needs dimension >= 2");
    if (md.kappa < 0 || md.n_th < 0) throw ValueError("mode " + md.name + " has negative rate or occupation");
  }
  const int M = static_cast<int>(modes.size());
  for (const auto& c : couplings)
    if (c.a < 0 || c.a >= M || c.b < 0 || c.b >= M || c.a == c.b) throw ValueError("coupling references invalid modes");
  if (drive_mode < 0 || drive_mode >= M) throw ValueError("drive mode out of range");
  if (sweep_points < 1) throw ValueError("sweep needs at least one point");
}

std::vector<double> SpectroModel::sweep_grid() const {
  std::vector<double> w(sweep_points);
  for (int i = 0; i < sweep_points; ++i)
    w[i] = sweep_points == 1 ? sweep_start : sweep_start + (sweep_stop - sweep_start) * i / (sweep_points - 1.0);
  return w;
}

LindbladModel build_lindblad(const SpectroModel& m, double omega_d) {
  m.validate();
  std::vector<int> dims;
  for (const auto& md : m.modes) dims.push_back(md.dim);
  const FockSpace fs(dims);
  std::vector<SparseC> a, ad;
  for (std::size_t k = 0; k < m.modes.size(); ++k) {
    a.push_back(fs.annihilator(static_cast<int>(k)));
    ad.push_back(a.back().adjoint());
  }

  LindbladModel L;
  SparseC H(fs.dimension(), fs.dimension());
  for (std::size_t k = 0; k < m.modes.size(); ++k) {
    const auto& md = m.modes[k];
    const SparseC n = ad[k] * a[k];
    const double w = md.freq - (md.rotating ? omega_d : 0.0);
    H += w * n;
    if (md.anharmonicity != 0.0) H -= (md.anharmonicity / 2.0) * SparseC(ad[k] * ad[k] * a[k] * a[k]);
    if (md.kappa > 0) {
      L.collapse.push_back(std::sqrt(md.kappa * (1.0 + md.n_th)) * a[k]);
      if (md.n_th > 0) L.collapse.push_back(std::sqrt(md.kappa * md.n_th) * ad[k]);
    }
  }
  for (const auto& c : m.couplings) {
    switch (c.kind) {
      case CouplingKind::Exchange: H += c.strength * SparseC(ad[c.a] * a[c.b] + a[c.a] * ad[c.b]); break;
      case CouplingKind::CounterRotating: H += c.strength * SparseC(ad[c.a] * ad[c.b] + a[c.a] * a[c.b]); break;
      case CouplingKind::CrossKerr: H -= c.strength * SparseC(ad[c.a] * a[c.a] * ad[c.b] * a[c.b]); break;
    }
  }
  const int dm = m.drive_mode;
  if (m.drive_amplitude != 0.0) H += m.drive_amplitude * SparseC(a[dm] + ad[dm]);
  H.makeCompressed();
  L.H = H;
  return L;
}

double response(const SpectroModel& m, const Eigen::MatrixXcd& rho) {
  std::vector<int> dims;
  for (const auto& md : m.modes) dims.push_back(md.dim);
  const FockSpace fs(dims);
  const SparseC a = fs.annihilator(m.drive_mode);
  const SparseC op = cplx(0.0, 1.0) * SparseC(a - SparseC(a.adjoint()));
  return (op * rho).trace().real();
}

SpectroscopyTrace sweep(const SpectroModel& m, const std::vector<double>& omega_d, unsigned jobs,
                        const SteadyStateOptions& opt) {
  m.validate();
  struct Point {
    double r = 0.0;
    bool ok = false;
    std::string err;
  };
  const auto pts = parallel_map(omega_d.size(), jobs, [&](std::size_t i) {
    Point p;
    try {
      const Eigen::MatrixXcd rho = steady_state(build_lindblad(m, omega_d[i]), opt);
      p.r = response(m, rho);
      p.ok = std::isfinite(p.r);
      if (!p.ok) p.err = "non-finite response";
    } catch (const Error& e) {
      p.err = e.kind() + ": " + e.what();
    }
    return p;
  });
  SpectroscopyTrace t;
  t.omega_d = omega_d;
  for (const auto& p : pts) {
    t.response.push_back(p.ok ? p.r : std::nan(""));
    t.ok.push_back(p.ok);
    t.errors.push_back(p.err);
  }
  return t;
}

std::vector<std::string> preset_names() { return {"g_A", "A_g", "chi_g_A", "g_A_chi", "A_chi_g", "A_g_chi"}; }

namespace {

SpectroModel transmon_drum(int Na, double Ec, double ka, double g, double start, double stop, const std::string& name) {
  const double wa = 1.0, ntha = 1.2;
  SpectroModel m;
  m.name = name;
  m.units = "transmon frequency";
  m.modes.push_back({"a", Na, wa, Ec, ka, ntha, true});
  m.modes.push_back({"c", 6, wa, 0.0, 1e-7, ntha, true});
  m.couplings.push_back({CouplingKind::Exchange, 0, 1, g});
  m.drive_mode = 0;
  m.drive_amplitude = ka / 1e3;
  m.sweep_start = start;
  m.sweep_stop = stop;
  m.sweep_points = 201;
  return m;
}

struct RfParams {
  double chi, g, Al, kb, nthb, wa, Ah, ka, ntha, wc, kc, nthc, wb;
  int Na, Nb, Nc;
};

SpectroModel rfcqed_drum(const RfParams& p, double start, double stop, const std::string& name,
                         const std::string& units) {
  SpectroModel m;
  m.name = name;
  m.units = units;
  m.modes.push_back({"a", p.Na, p.wa, p.Ah, p.ka, p.ntha, true});
  m.modes.push_back({"b", p.Nb, p.wb, p.Al, p.kb, p.nthb, false});
  m.modes.push_back({"c", p.Nc, p.wc, 0.0, p.kc, p.nthc, false});
  m.couplings.push_back({CouplingKind::CrossKerr, 0, 1, p.chi});
  m.couplings.push_back({CouplingKind::Exchange, 2, 1, p.g});
  m.couplings.push_back({CouplingKind::CounterRotating, 2, 1, p.g});
  m.drive_mode = 0;
  m.drive_amplitude = p.ka / 1e3;
  m.sweep_start = start;
  m.sweep_stop = stop;
  m.sweep_points = 201;
  return m;
}

}  // namespace

SpectroModel preset(const std::string& name) {
  if (name == "g_A") {
    const double Ec = 0.05, g = Ec / 10;
    return transmon_drum(4, Ec, 1e-4, g, 1 - 5 * g, 1 + 5 * g, name);
  }
  if (name == "A_g") {
    const double Ec = 0.005, g = Ec * 15;
    return transmon_drum(6, Ec, 4e-5, g, 1 - g - 2.5 * Ec, 1 - g + 0.5 * Ec, name);
  }
  const std::string lf = "low-mode frequency";
  if (name == "A_chi_g") {
    RfParams p{};
    p.chi = 0.01;
    p.g = 0.1;
    p.Nb = 4;
    p.wb = 1;
    p.Al = 0.001;
    p.kb = 0.001 * p.chi;
    p.nthb = 0.5;
    p.Na = 3;
    p.wa = 50 * p.wb;
    p.Ah = 0.05 * p.wa;
    p.ka = 0.01 * p.chi;
    p.ntha = 0;
    p.Nc = p.Nb;
    p.wc = p.wb + 2 * p.g;
    p.kc = 0.001 * p.chi;
    p.nthc = 0.5;
    return rfcqed_drum(p, p.wa - 2 * p.chi, p.wa + 0.2 * p.chi, name, lf);
  }
  if (name == "g_A_chi") {
    RfParams p{};
    p.chi = 0.1;
    p.g = 0.001;
    p.Nb = 4;
    p.wb = 1;
    p.Al = 0.05;
    p.kb = 0.001 * p.g;
    p.nthb = 0.5;
    p.Na = 3;
    p.wa = 50 * p.wb;
    p.Ah = 0.05 * p.wa;
    p.ka = 0.1 * p.g;
    p.ntha = 0;
    p.Nc = p.Nb;
    p.wc = p.wb + 0;
    p.kc = 0.001 * p.g;
    p.nthc = 0.5;
    return rfcqed_drum(p, p.wa - 2.5 * p.g, p.wa + 2.5 * p.g, name, lf);
  }
  if (name == "chi_g_A") {
    RfParams p{};
    p.chi = 0.0005;
    p.g = 0.005;
    p.Nb = 4;
    p.wb = 1;
    p.Al = 0.05;
    p.kb = 0.001 * p.chi;
    p.nthb = 0.5;
    p.Na = 3;
    p.wa = 50 * p.wb;
    p.Ah = 0.05 * p.wa;
    p.ka = 0.01 * p.chi;
    p.ntha = 0;
    p.Nc = p.Nb;
    p.wc = p.wb + p.g / 0.6 - p.chi;
    p.kc = 0.001 * p.chi;
    p.nthc = 0.5;
    return rfcqed_drum(p, p.wa - p.chi, p.wa + 0.3 * p.chi, name, lf);
  }
  if (name == "A_g_chi") {
    const double nth = thermal_occupation(100e6, 20e-3);
    RfParams p{};
    p.chi = 15e6;
    p.g = 2e6;
    p.Na = 3;
    p.wa = 5e9;
    p.Ah = 0.05 * p.wa;
    p.ka = 500e3;
    p.ntha = 0;
    p.Nb = 4;
    p.wb = 100e6;
    p.Al = p.chi * p.chi / 4 / p.Ah;
    p.kb = p.wb / 1e4;
    p.nthb = nth;
    p.Nc = p.Nb;
    p.wc = p.wb - p.chi;
    p.kc = p.wc / 1e5;
    p.nthc = p.nthb;
    return rfcqed_drum(p, p.wa - 3.5 * p.g, p.wa + 3.5 * p.g, name, "Hz");
  }
  throw ValueError("unknown preset '" + name + "'");
}

namespace {

// Distance from the peak to the half-height crossing on one side, or NaN.
double half_width_side(const SpectroscopyTrace& t, std::size_t i, int dir) {
  const double half = 0.5 * t.response[i];
  std::size_t j = i;
  while (true) {
    const std::ptrdiff_t k = static_cast<std::ptrdiff_t>(j) + dir;
    if (k < 0 || k >= static_cast<std::ptrdiff_t>(t.response.size())) return std::nan("");
    const double yj = t.response[j], yk = t.response[k];
    if (!std::isfinite(yk) || yk > yj) return std::nan("");
    if (yk <= half) {
      const double x = t.omega_d[j] + (t.omega_d[k] - t.omega_d[j]) * (yj - half) / (yj - yk);
      return std::abs(x - t.omega_d[i]);
    }
    j = static_cast<std::size_t>(k);
  }
}

double peak_width(const SpectroscopyTrace& t, std::size_t i) {
  const double l = half_width_side(t, i, -1), r = half_width_side(t, i, +1);
  if (std::isfinite(l) && std::isfinite(r)) return l + r;
  if (std::isfinite(l)) return 2 * l;
  if (std::isfinite(r)) return 2 * r;
  return std::nan("");
}

}  // namespace

std::vector<Peak> find_peaks(const SpectroscopyTrace& t, double rel_threshold) {
  std::vector<Peak> out;
  const std::size_t n = t.response.size();
  if (n < 3) return out;
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : t.response)
    if (std::isfinite(v)) mx = std::max(mx, v);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double y0 = t.response[i - 1], y1 = t.response[i], y2 = t.response[i + 1];
    if (!(std::isfinite(y0) && std::isfinite(y1) && std::isfinite(y2))) continue;
    if (!(y1 > y0 && y1 >= y2) || y1 < rel_threshold * mx) continue;
    Peak p;
    p.index = i;
    p.height = y1;
    const double den = y0 - 2 * y1 + y2;
    const double shift = den != 0.0 ? 0.5 * (y0 - y2) / den : 0.0;
    const double h = t.omega_d[i + 1] - t.omega_d[i];
    p.position = t.omega_d[i] + std::clamp(shift, -0.5, 0.5) * h;
    p.fwhm = peak_width(t, i);
    out.push_back(p);
  }
  return out;
}

}  // namespace cqed
