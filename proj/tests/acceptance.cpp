// Acceptance suite: one PASS/FAIL line per check, grouped by criterion.
//
//   cqed_acceptance                  every check
//   cqed_acceptance --skip-blocked   checks expected to pass
//   cqed_acceptance --only-blocked   checks that fail for documented reasons
//
// Exit status is 0 when every evaluated check passes, 1 otherwise.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cqed/constants.hpp"
#include "cqed/designer.hpp"
#include "cqed/electromech.hpp"
#include "cqed/errors.hpp"
#include "cqed/fitkit.hpp"
#include "cqed/normalmodes.hpp"
#include "cqed/parallel.hpp"
#include "cqed/quantizer.hpp"
#include "cqed/rabi.hpp"
#include "cqed/spectro.hpp"

using namespace cqed;

namespace {

constexpr double kTwoPi = constants::two_pi;
using cplx = std::complex<double>;

enum class Mode { All, SkipBlocked, OnlyBlocked };

class Report {
 public:
  explicit Report(Mode m) : mode_(m) {}

  // Whether checks of this kind run in the current mode.
  bool runs(bool blocked) const {
    return mode_ == Mode::All || (blocked ? mode_ == Mode::OnlyBlocked : mode_ == Mode::SkipBlocked);
  }

  void check(int criterion, const std::string& name, bool pass, const std::string& detail, bool blocked = false) {
    if (!runs(blocked)) return;
    std::printf("%s  [%d] %s: %s%s\n", pass ? "PASS" : "FAIL", criterion, name.c_str(), detail.c_str(),
                blocked ? " (blocked)" : "");
    std::fflush(stdout);
    (pass ? passed_ : failed_)++;
  }

  int failed() const { return failed_; }
  int passed() const { return passed_; }

 private:
  Mode mode_;
  int passed_ = 0, failed_ = 0;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- 1
void table_rows(Report& r) {
  if (!r.runs(false)) return;
  const auto t0 = std::chrono::steady_clock::now();
  struct Row {
    double f_r, ratio, chi, tol;
  };
  const Row rows[] = {{0.2e9, 0.01, 5.9, 0.02},
                      {0.2e9, 0.2, 2.38e3, 0.02},
                      {0.2e9, 0.45, 12.0e3, 0.02},
                      {0.5e9, 0.45, 190.1e3, 0.015},
                      {1.0e9, 0.49, 1.9e6, 0.02}};
  for (const Row& row : rows) {
    const DesignDerived d = evaluate_frequencies(6e9, row.f_r, 200e6, row.ratio);
    r.check(1, fmt("chi at f_r %.1f GHz, g-ratio %.2f", row.f_r / 1e9, row.ratio),
            rel(d.chi_over_h, row.chi) <= row.tol,
            fmt("%.6g Hz vs %.6g Hz, rel %.3g <= %.3g", d.chi_over_h, row.chi, rel(d.chi_over_h, row.chi), row.tol));
  }
  const DesignDerived low = evaluate_frequencies(6e9, 0.2e9, 200e6, 0.45);
  const double f_lo = low.omega_tilde_r / kTwoPi;
  r.check(1, "dressed low-mode frequency at g-ratio 0.45", std::abs(f_lo - 87e6) <= 2e6,
          fmt("%.6g Hz vs 87 MHz, |diff| %.3g <= 2 MHz", f_lo, std::abs(f_lo - 87e6)));
  const DesignDerived last = evaluate_frequencies(4.76e9, 3.93e9, 200e6, 0.4991);
  r.check(1, "final table row flags dispersive breakdown", last.breakdown && last.chi_is_lower_bound,
          fmt("breakdown %d, chi lower bound %d", last.breakdown, last.chi_is_lower_bound));
  const double dt = seconds(t0);
  r.check(1, "runtime", dt < 1.0, fmt("%.3g s < 1 s", dt));
}

// ---------------------------------------------------------------- 2
void thermal_anchors(Report& r) {
  if (!r.runs(false)) return;
  const double f = 5e9;
  const double n = thermal_occupation(f, temperature_for_frequency(f));
  r.check(2, "occupation at T = hf/k_B", std::abs(n - 0.582) <= 1e-3, fmt("%.6f vs 0.582 +- 1e-3", n));
  const double f20 = thermal_frequency(20e-3), f110 = thermal_frequency(110e-3);
  r.check(2, "k_B T/h at 20 mK", rel(f20, 416e6) <= 0.01, fmt("%.6g Hz vs 416 MHz, rel %.3g <= 1%%", f20, rel(f20, 416e6)));
  r.check(2, "k_B T/h at 110 mK", rel(f110, 2.3e9) <= 0.01,
          fmt("%.6g Hz vs 2.3 GHz, rel %.3g <= 1%%", f110, rel(f110, 2.3e9)));
}

// ---------------------------------------------------------------- 3
void symplectic_suite(Report& r) {
  if (!r.runs(false)) return;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  auto U = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto LU = [&](double lo, double hi) { return std::exp(U(std::log(lo), std::log(hi))); };
  const Eigen::Matrix4d J = symplectic_form();
  double worst_sym = 0.0, worst_freq = 0.0;
  for (int i = 0; i < 1000; ++i) {
    TwoModeSystem s;
    s.omega_a = kTwoPi * LU(1e8, 2e10);
    s.E_C_over_h = LU(1e6, 5e8);
    s.omega_r = kTwoPi * LU(1e8, 2e10);
    s.g = U(0.0, 0.49) * std::sqrt(s.omega_a_bar() * s.omega_r);
    const SymplecticTransform t = symplectic_diagonalize(s);
    worst_sym = std::max(worst_sym, (t.F.transpose() * J * t.F - J).norm());
    Eigen::EigenSolver<Eigen::Matrix4d> es(quadratic_hamiltonian(s.omega_a_bar(), s.omega_r, s.g) * J);
    std::vector<double> pos;
    for (int k = 0; k < 4; ++k)
      if (es.eigenvalues()(k).real() > 0) pos.push_back(2 * es.eigenvalues()(k).real());
    std::sort(pos.begin(), pos.end());
    const auto [wa, wr] = exact_normal_frequencies(s);
    worst_freq = std::max({worst_freq, rel(std::min(wa, wr), pos.at(0)), rel(std::max(wa, wr), pos.at(1))});
  }
  r.check(3, "F^T J F = J over 1000 systems", worst_sym < 1e-10, fmt("max Frobenius %.3g < 1e-10", worst_sym));
  r.check(3, "exact frequencies vs HJ eigenvalues", worst_freq < 1e-12, fmt("max rel %.3g < 1e-12", worst_freq));
  const SymplecticTransform id = symplectic_diagonalize(kTwoPi * 6.2e9, kTwoPi * 4e9, 0.0);
  const double dev = (id.F - Eigen::Matrix4d::Identity()).norm();
  r.check(3, "g = 0 gives the identity transform", dev < 1e-12, fmt("|F - I| %.3g < 1e-12", dev));
  const double dt = seconds(t0);
  r.check(3, "runtime", dt < 10.0, fmt("%.3g s < 10 s", dt));
}

// ---------------------------------------------------------------- 4
void oracle_equivalence(Report& r) {
  if (!r.runs(false)) return;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(99);
  auto U = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto LU = [&](double lo, double hi) { return std::exp(U(std::log(lo), std::log(hi))); };

  double worst = 0.0;
  for (int n : {16, 64, 128, 256}) {
    std::vector<Eigen::Triplet<cplx>> t;
    for (int i = 0; i < n; ++i) {
      t.emplace_back(i, i, U(-5, 5));
      for (int j = i + 1; j < n; ++j)
        if (U(0, 1) < 0.03) {
          const cplx v(U(-1, 1), U(-1, 1));
          t.emplace_back(i, j, v);
          t.emplace_back(j, i, std::conj(v));
        }
    }
    SparseHermitian H(n, n);
    H.setFromTriplets(t.begin(), t.end());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es{Eigen::MatrixXcd(H)};
    DiagonalizeOptions opt;
    opt.force_iterative = true;
    const int k = std::min(12, n - 1);
    const HamiltonianModel iter = diagonalize(H, k, opt);
    const HamiltonianModel dense = diagonalize(H, k);
    for (int i = 0; i < k; ++i) {
      worst = std::max(worst, std::abs(iter.eigenvalues_hz[i] + iter.ground_energy_hz - es.eigenvalues()[i]));
      worst = std::max(worst, std::abs(dense.eigenvalues_hz[i] + dense.ground_energy_hz - es.eigenvalues()[i]));
    }
  }
  r.check(4, "diagonalize vs dense eigensolver, dimension <= 256", worst < 1e-9, fmt("max |diff| %.3g < 1e-9", worst));

  double worst_q = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    ReducedCircuit rc;
    rc.C_a = LU(5e-15, 2e-13);
    rc.C_c = LU(1e-15, 2e-13);
    rc.C_r = LU(5e-14, 2e-12);
    rc.L_0 = LU(5e-10, 5e-8);
    rc.E_J_max_over_h = LU(5e9, 5e10);
    const int M = 1 + trial % 4;
    const QuantizedSystem q = quantize(rc, M);
    // Quantum side: H/hbar = 1/2 (X^T W X + P^T K P) with K_ij = 2 g_ij.
    Eigen::VectorXd w(M + 1);
    w[0] = q.omega_a_bar;
    w.tail(M) = q.omega_m;
    Eigen::MatrixXd K = w.asDiagonal();
    for (int m = 0; m < M; ++m) {
      K(0, m + 1) = K(m + 1, 0) = 2 * q.g_m[m];
      for (int k = 0; k < M; ++k)
        if (k != m) K(m + 1, k + 1) = 2 * q.G(m, k);
    }
    const Eigen::VectorXd s = w.cwiseSqrt();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> qe(Eigen::MatrixXd(s.asDiagonal() * K * s.asDiagonal()));
    // Classical side: small oscillations of the linearized circuit.
    Eigen::VectorXd invL(M + 1);
    invL[0] = 1.0 / q.L_J;
    for (int m = 0; m < M; ++m) invL[m + 1] = (2.0 * m + 1) * (2.0 * m + 1) / rc.L_0;
    const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ce(Eigen::MatrixXd(invL.asDiagonal()),
                                                                       build_capacitance_matrix(rc, M));
    for (int i = 0; i <= M; ++i)
      worst_q = std::max(worst_q, rel(std::sqrt(qe.eigenvalues()[i]), std::sqrt(ce.eigenvalues()[i])));
  }
  r.check(4, "quantized couplings vs classical generalized eigenproblem", worst_q < 1e-9,
          fmt("max rel %.3g < 1e-9", worst_q));

  DrumSpec d;
  d.m = 1e-13;
  d.k = d.m * std::pow(kTwoPi * 1e7, 2);
  d.A = constants::pi * 15e-6 * 15e-6;
  d.d = 50e-9;
  const double vp = pull_in_voltage(d);
  double worst_y = 0.0;
  for (int i = 1; i <= 40; ++i) {
    d.V0 = vp * 0.98 * i / 40.0;
    const DrumEquivalent e = equivalent_circuit(d);
    for (int j = 0; j < 20; ++j) {
      const double om = kTwoPi * (1e5 + j * 1.1e6);
      const cplx jw(0.0, om);
      const cplx mech = jw * (d.V0 * d.V0 * e.C_d * e.C_d / (e.D * e.D)) / (e.k_eff - om * om * d.m);
      const cplx direct = jw * e.C_d + mech;
      // Normalized by the branch sizes, which cancel at the antiresonance.
      worst_y = std::max(worst_y, std::abs(admittance(e, om) - direct) / (om * e.C_d + std::abs(mech)));
    }
  }
  r.check(4, "drum admittance vs direct formula across bias", worst_y < 1e-10, fmt("max rel %.3g < 1e-10", worst_y));
  const double dt = seconds(t0);
  r.check(4, "runtime", dt < 30.0, fmt("%.3g s < 30 s", dt));
}

// ---------------------------------------------------------------- 5
void resonant_forms(Report& r) {
  if (!r.runs(false)) return;
  const double f = 5e9, g = 2e6;
  RabiCoefficients c;
  c.mode_freq_hz = Eigen::VectorXd::Constant(1, f);
  c.transmon_levels_hz = Eigen::Vector2d(0, f);
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(2, 2);
  x(0, 1) = x(1, 0) = g;
  c.g_hz = {x};
  c.G_hz = Eigen::MatrixXd::Zero(1, 1);
  TruncationSpec t;
  t.N_q = 2;
  t.photon_caps = {6};
  const HamiltonianModel m = diagonalize(assemble(c, t), 6, t.dims());
  const double s1 = m.eigenvalues_hz[2] - m.eigenvalues_hz[1];
  const double s2 = m.eigenvalues_hz[4] - m.eigenvalues_hz[3];
  const auto lad = resonant_small_g({kTwoPi * f, 300e6, kTwoPi * f, kTwoPi * g}, 2);
  const double split = (lad[0].E_plus - lad[0].E_minus) / kTwoPi;
  const double spacing = s2 / 2 - s1 / 2;
  r.check(5, "JC splitting 2g", rel(s1, split) < 1e-6 && rel(split, 2 * g) < 1e-12,
          fmt("numeric %.10g Hz vs closed form %.10g Hz, rel %.3g < 1e-6", s1, split, rel(s1, split)));
  r.check(5, "JC doublet spacing (sqrt 2 - 1) g", rel(spacing, (std::sqrt(2.0) - 1) * g) < 1e-6,
          fmt("%.10g Hz vs %.10g Hz, rel %.3g < 1e-6", spacing, (std::sqrt(2.0) - 1) * g,
              rel(spacing, (std::sqrt(2.0) - 1) * g)));

  const double fr = 20e9, Ec = 20e6, G = 500e6;
  const Eigen::MatrixXd H = harmonic_two_mode_hamiltonian(fr - Ec, Ec, fr, G, 10, 10);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  const Eigen::VectorXd e = es.eigenvalues().array() - es.eigenvalues()(0);
  const double A_minus = 2 * e[1] - e[3], chi = e[1] + e[2] - e[4], A_plus = 2 * e[2] - e[5];
  const DispersiveShifts d = resonant_large_g({kTwoPi * (fr - Ec), Ec, kTwoPi * fr, kTwoPi * G});
  const double tol = Ec / G;
  r.check(5, "large-g A_+ = E_C/4", std::abs(A_plus / d.A_a_over_h - 1) < tol && rel(d.A_a_over_h, Ec / 4) < 1e-12,
          fmt("numeric %.6g Hz vs %.6g Hz, rel %.3g < E_C/g = %.3g", A_plus, d.A_a_over_h,
              std::abs(A_plus / d.A_a_over_h - 1), tol));
  r.check(5, "large-g A_- = E_C/4", std::abs(A_minus / d.A_r_over_h - 1) < tol && rel(d.A_r_over_h, Ec / 4) < 1e-12,
          fmt("numeric %.6g Hz vs %.6g Hz, rel %.3g < %.3g", A_minus, d.A_r_over_h,
              std::abs(A_minus / d.A_r_over_h - 1), tol));
  r.check(5, "large-g chi = E_C/2", std::abs(chi / d.chi_over_h - 1) < tol && rel(d.chi_over_h, Ec / 2) < 1e-12,
          fmt("numeric %.6g Hz vs %.6g Hz, rel %.3g < %.3g", chi, d.chi_over_h, std::abs(chi / d.chi_over_h - 1), tol));
}

// ---------------------------------------------------------------- 6
double truncated_thermal_mean(double n_th, int dim) {
  const double q = n_th / (n_th + 1.0);
  double num = 0.0, den = 0.0, p = 1.0;
  for (int k = 0; k < dim; ++k, p *= q) {
    num += k * p;
    den += p;
  }
  return num / den;
}

void spectroscopy(Report& r, unsigned jobs) {
  const auto t0 = std::chrono::steady_clock::now();
  for (const std::string& name : preset_names()) {
    const bool needed_blocked = name == "A_g_chi";
    const bool needed = r.runs(false) || (needed_blocked && r.runs(true));
    if (!needed) continue;
    const SpectroModel m = preset(name);
    const auto ts = std::chrono::steady_clock::now();
    const SpectroscopyTrace tr = sweep(m, jobs);
    const long bad = std::count(tr.ok.begin(), tr.ok.end(), false);
    r.check(6, "preset " + name + " runs to completion", bad == 0,
            fmt("%zu points, %ld failed, %.1f s", tr.ok.size(), bad, seconds(ts)));
    const std::vector<Peak> peaks = find_peaks(tr);
    const double wa = m.modes[0].freq;

    if (name == "g_A") {
      const double g = m.couplings[0].strength;
      std::vector<Peak> top = peaks;
      std::sort(top.begin(), top.end(), [](const Peak& a, const Peak& b) { return a.height > b.height; });
      bool ok = top.size() >= 2;
      double split = 0.0;
      if (ok) {
        split = std::abs(top[0].position - top[1].position);
        // Resolved: the dip between them falls below half of the smaller peak.
        const auto lo = std::min(top[0].index, top[1].index), hi = std::max(top[0].index, top[1].index);
        const double dip = *std::min_element(tr.response.begin() + lo, tr.response.begin() + hi + 1);
        ok = dip < 0.5 * std::min(top[0].height, top[1].height) && rel(split, 2 * g) <= 0.1;
      }
      r.check(6, "g_A two resolved peaks split by 2g", ok,
              fmt("split %.6g vs 2g = %.6g, rel %.3g <= 10%%", split, 2 * g, split > 0 ? rel(split, 2 * g) : 1.0));
    }
    if (name == "A_g_chi") {
      const double g = m.couplings[1].strength;
      for (int n : {-2, -1, 1, 2}) {
        const double target = wa + n * g;
        const Peak* best = nullptr;
        for (const Peak& p : peaks)
          if (!best || std::abs(p.position - target) < std::abs(best->position - target)) best = &p;
        const bool blocked = n == -2;
        const double off = best ? best->position - target : NAN;
        const double half = best ? 0.5 * best->fwhm : NAN;
        r.check(6, fmt("A_g_chi peak at omega_a %+d g", n), best && std::abs(off) <= half,
                fmt("offset %.4g Hz, half linewidth %.4g Hz", off, half), blocked);
      }
    }
  }

  // Single damped cavity at the thermal occupation used by the transmon-drum listings.
  const double n_th = 1.2;
  const int dim = static_cast<int>(std::ceil(10 * n_th));
  SpectroModel cav;
  cav.modes.push_back({"c", dim, 1.0, 0.0, 1e-3, n_th, false});
  cav.sweep_points = 1;
  const Eigen::MatrixXcd rho = steady_state(build_lindblad(cav, 0.0));
  const double mean = (Eigen::MatrixXcd(FockSpace({dim}).number(0)) * rho).trace().real();
  r.check(6, "thermal cavity <n> = n_th at dim 10 n_th", std::abs(mean - n_th) <= 1e-4,
          fmt("%.8f vs %.2f at dim %d, |diff| %.3g <= 1e-4", mean, n_th, dim, std::abs(mean - n_th)), true);
  const double oracle = truncated_thermal_mean(n_th, dim);
  r.check(6, "thermal cavity <n> vs truncated detailed balance", std::abs(mean - oracle) <= 1e-6,
          fmt("%.10f vs %.10f, |diff| %.3g <= 1e-6", mean, oracle, std::abs(mean - oracle)));
  if (r.runs(false)) std::printf("info  [6] spectroscopy wall time %.1f s\n", seconds(t0));
}

// ---------------------------------------------------------------- 7
void fit_roundtrip(Report& r, unsigned jobs) {
  if (!r.runs(false)) return;
  const auto t0 = std::chrono::steady_clock::now();
  FitParameters truth;
  truth.omega_0_hz = 4.603e9;
  truth.C_a = 5.13e-15;
  truth.C_c = 40.3e-15;
  truth.E_J_max_over_h = 36.3e9;
  truth.d = 0.01;
  truth.N_env = 0.2;
  truth.alpha = {1.0, 0.994};
  FitModel model;
  SynthesisOptions so;
  for (int i = 0; i < 40; ++i) so.flux.push_back(0.49 * i / 39.0);
  so.noise_hz = 1e6;
  so.seed = 7;
  so.jobs = jobs;
  const FluxSweepData data = synthesize_sweep(truth, model, so);

  FitParameters init = truth;
  init.C_a *= 1.04;
  init.C_c *= 0.97;
  init.E_J_max_over_h *= 1.03;
  init.N_env = 0.15;
  FitOptions fo;
  fo.model = model;
  fo.seed = 3;
  fo.jobs = jobs;
  FitResult res;
  bool converged = true;
  try {
    res = fit(data, init, fo);
  } catch (const FitNonConvergence& e) {
    res = e.best();
    converged = false;
  }
  const double dt = seconds(t0);
  r.check(7, "fit converges", converged, fmt("%d evaluations, rms %.4g Hz", res.evals, res.rms_hz));
  const FitParameters& p = res.params;
  const double ec = rel(fit_charging_energy(p, model), fit_charging_energy(truth, model));
  r.check(7, "E_C recovered", ec <= 0.02, fmt("rel %.3g <= 2%% (truth %.6g Hz)", ec, fit_charging_energy(truth, model)));
  r.check(7, "E_J,max recovered", rel(p.E_J_max_over_h, truth.E_J_max_over_h) <= 0.02,
          fmt("rel %.3g <= 2%%", rel(p.E_J_max_over_h, truth.E_J_max_over_h)));
  r.check(7, "C_a recovered", rel(p.C_a, truth.C_a) <= 0.02, fmt("rel %.3g <= 2%%", rel(p.C_a, truth.C_a)));
  r.check(7, "C_c recovered", rel(p.C_c, truth.C_c) <= 0.02, fmt("rel %.3g <= 2%%", rel(p.C_c, truth.C_c)));
  r.check(7, "N_env recovered", std::abs(p.N_env - truth.N_env) <= 0.02,
          fmt("%.4f vs %.2f, |diff| %.3g <= 0.02", p.N_env, truth.N_env, std::abs(p.N_env - truth.N_env)));
  r.check(7, "runtime", dt < 600.0, fmt("%.1f s < 600 s on %u worker(s)", dt, jobs));
}

// ---------------------------------------------------------------- 8
void electromech_anchors(Report& r) {
  const double C_d = 1e-15;
  // Anchors are quoted to one significant figure; 10% is the pinned band.
  if (r.runs(false)) {
    const double f_opt = minimum_mechanical_frequency(1e9, 1e6, 0.0, C_d);
    r.check(8, "GHz-case minimum f_m at the optimum", rel(f_opt, 50e6) <= 0.1,
            fmt("%.4g Hz vs 50 MHz, rel %.3g <= 10%%", f_opt, rel(f_opt, 50e6)));
  }
  if (r.runs(true)) {
    const double f_soft = minimum_mechanical_frequency(1e9, 1e6, 0.0, C_d, 0.9);
    r.check(8, "GHz-case minimum f_m at softening 0.9", rel(f_soft, 250e6) <= 0.1,
            fmt("%.4g Hz vs 250 MHz, rel %.3g <= 10%%", f_soft, rel(f_soft, 250e6)), true);
  }
  if (!r.runs(false)) return;
  const double gd[] = {0.25, 0.5, 1.0}, want[] = {0.06, 0.17, 0.38};
  for (int i = 0; i < 3; ++i) {
    const HybridizationSplit h = hybridization_split(gd[i], 1.0, 1.0);
    const double q = h.chi_m / h.chi_L;
    r.check(8, fmt("chi_m/chi_L at g/Delta = %.2f", gd[i]), std::abs(q - want[i]) <= 0.01,
            fmt("%.4f vs %.2f +- 0.01", q, want[i]));
  }
  const DressedShifts d1 = dressed_shifts(0.6, 1.0, 1.0, 1), d2 = dressed_shifts(0.6, 1.0, 1.0, 2);
  const double got[] = {d1.chi_plus, d1.chi_minus, d2.chi_plus, d2.chi_minus};
  const double exp[] = {0.82, 0.18, 0.75, 0.25};
  const char* lab[] = {"chi_1+", "chi_1-", "chi_2+", "chi_2-"};
  for (int i = 0; i < 4; ++i)
    r.check(8, fmt("dressed shift %s at g/Delta = 0.6", lab[i]), std::abs(got[i] - exp[i]) <= 0.01,
            fmt("%.4f chi vs %.2f chi +- 0.01", got[i], exp[i]));
  FeasibilityParams p;
  p.f_m = 1e6;
  p.Q_m = 1e8;
  p.T = 10e-3;
  p.n = 1;
  p.m = 200e-12;
  const double tg200 = feasibility(p).t_G;
  p.m = 2e-12;
  const double tg2 = feasibility(p).t_G;
  r.check(8, "t_G at 200 ng", tg200 >= 0.3e-3 && tg200 <= 0.4e-3, fmt("%.4g s in [0.3, 0.4] ms", tg200));
  r.check(8, "t_G at 2 ng", tg2 >= 30e-3 && tg2 <= 40e-3, fmt("%.4g s in [30, 40] ms", tg2));
}

}  // namespace

int main(int argc, char** argv) {
  Mode mode = Mode::All;
  unsigned jobs = default_jobs();
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--skip-blocked")) mode = Mode::SkipBlocked;
    else if (!std::strcmp(argv[i], "--only-blocked")) mode = Mode::OnlyBlocked;
    else if (!std::strcmp(argv[i], "--jobs") && i + 1 < argc) jobs = static_cast<unsigned>(std::atoi(argv[++i]));
    else if (!std::strcmp(argv[i], "--criterion") && i + 1 < argc) only.push_back(std::atoi(argv[++i]));
    else {
      std::fprintf(stderr, "usage: %s [--skip-blocked | --only-blocked] [--jobs N] [--criterion K]...\n", argv[0]);
      return 2;
    }
  }
  Report r(mode);
  const std::vector<std::function<void()>> criteria = {
      [&] { table_rows(r); },         [&] { thermal_anchors(r); },      [&] { symplectic_suite(r); },
      [&] { oracle_equivalence(r); }, [&] { resonant_forms(r); },       [&] { spectroscopy(r, jobs); },
      [&] { fit_roundtrip(r, jobs); }, [&] { electromech_anchors(r); },
  };
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (!only.empty() && std::find(only.begin(), only.end(), static_cast<int>(k + 1)) == only.end()) continue;
    try {
      criteria[k]();
    } catch (const std::exception& e) {
      r.check(static_cast<int>(k + 1), "criterion raised", false, e.what());
    }
  }
  std::printf("acceptance: %d passed, %d failed\n", r.passed(), r.failed());
  return r.failed() == 0 ? 0 : 1;
}
