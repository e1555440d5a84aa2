#include "cqed/normalmodes.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "cqed/constants.hpp"
#include "cqed/errors.hpp"

namespace cqed {

namespace {

void check_system(const TwoModeSystem& s) {
  if (!(s.omega_a > 0) || !(s.omega_r > 0) || !(s.E_C_over_h >= 0) || !(s.g >= 0))
    throw ValueError("two-mode system requires positive frequencies and non-negative g, E_C");
}

// Swaps the annihilation and creation blocks.
Eigen::Matrix4d block_swap() {
  Eigen::Matrix4d X = Eigen::Matrix4d::Zero();
  X.topRightCorner<2, 2>().setIdentity();
  X.bottomLeftCorner<2, 2>().setIdentity();
  return X;
}

struct Detunings {
  double D, S;
};

Detunings detunings(const TwoModeSystem& s, DeltaConvention c) {
  const double ec = s.E_C_angular();
  if (c == DeltaConvention::Primed) return {s.Delta() - ec, s.Sigma() + ec};
  return {s.Delta(), s.Sigma()};
}

void common_warnings(const TwoModeSystem& s, double D, DispersiveShifts& out) {
  if (std::abs(D) < 1e-12 * s.Sigma()) {
    out.warnings.push_back("divergence: detuning vanishes");
  } else if (s.g / std::abs(D) > 0.3) {
    out.warnings.push_back("g/|Delta| > 0.3, perturbative shifts unreliable");
  }
}

}  // namespace

double TwoModeSystem::E_C_angular() const { return constants::two_pi * E_C_over_h; }

Eigen::Matrix4d symplectic_form() {
  Eigen::Matrix4d J = Eigen::Matrix4d::Zero();
  J.topRightCorner<2, 2>().setIdentity();
  J.bottomLeftCorner<2, 2>() = -Eigen::Matrix2d::Identity();
  return J;
}

Eigen::Matrix4d quadratic_hamiltonian(double wb, double wr, double g) {
  Eigen::Matrix4d H;
  H << 0, g, wb, -g,
       g, 0, -g, wr,
       wb, -g, 0, g,
       -g, wr, g, 0;
  return 0.5 * H;
}

std::pair<double, double> exact_normal_frequencies(double wb, double wr, double g) {
  const double s = wb * wb + wr * wr;
  const double d = wb * wb - wr * wr;
  const double disc = d * d + 16.0 * g * g * wb * wr;
  const double root = std::sqrt(disc);
  // s - root without the cancellation: (s^2 - root^2) / (s + root).
  const double lo2 = 4.0 * wb * wr * (wb * wr - 4.0 * g * g) / (s + root);
  if (lo2 <= 0.0) throw InstabilityError("normal-mode radicand is negative: g >= sqrt(omega_bar omega_r)/2");
  const double hi = std::sqrt(0.5 * (s + root));
  const double lo = std::sqrt(0.5 * lo2);
  if (wb >= wr) return {hi, lo};
  return {lo, hi};
}

SymplecticTransform symplectic_diagonalize(const TwoModeSystem& sys) {
  check_system(sys);
  return symplectic_diagonalize(sys.omega_a_bar(), sys.omega_r, sys.g);
}

SymplecticTransform symplectic_diagonalize(double wb, double wr, double g) {
  if (!(wb > 0) || !(wr > 0)) throw ValueError("frequencies must be positive");
  if (4.0 * g * g >= wb * wr) throw InstabilityError("g >= sqrt(omega_bar omega_r)/2");

  const Eigen::Matrix4d J = symplectic_form();
  const Eigen::Matrix4d H = quadratic_hamiltonian(wb, wr, g);
  Eigen::EigenSolver<Eigen::Matrix4d> es(H * J);
  if (es.info() != Eigen::Success) throw InstabilityError("eigen-decomposition of HJ failed");

  const double scale = std::max(wb, wr);
  std::vector<int> negative;
  for (int i = 0; i < 4; ++i) {
    const auto lam = es.eigenvalues()(i);
    if (std::abs(lam.imag()) > 1e-9 * scale) throw InstabilityError("HJ has complex eigenvalues");
    if (lam.real() < 0) negative.push_back(i);
  }
  if (negative.size() != 2) throw InstabilityError("HJ spectrum is not made of +- pairs");

  // Columns 0 and 1 carry eigenvalues -omega/2; the atom-like one goes first.
  const auto [wa_t, wr_t] = exact_normal_frequencies(wb, wr, g);
  int ia = negative[0], ir = negative[1];
  const double la = -2.0 * es.eigenvalues()(ia).real();
  const double lr = -2.0 * es.eigenvalues()(ir).real();
  if (std::abs(la - wa_t) + std::abs(lr - wr_t) > std::abs(la - wr_t) + std::abs(lr - wa_t)) std::swap(ia, ir);

  const Eigen::Matrix4d X = block_swap();
  Eigen::Matrix4d F;
  const int idx[2] = {ia, ir};
  for (int k = 0; k < 2; ++k) {
    Eigen::Vector4d w = es.eigenvectors().col(idx[k]).real();
    if (w.norm() < 1e-300) w = es.eigenvectors().col(idx[k]).imag();
    w.normalize();
    const double n = w.transpose() * J * X * w;
    if (std::abs(n) < 1e-14) throw InstabilityError("eigenvector has vanishing symplectic norm");
    w /= std::sqrt(std::abs(n));
    // Positive symplectic norm identifies the annihilation-like column.
    if (n < 0) w = X * w;
    if (w(k) < 0) w = -w;
    F.col(k) = w;
    F.col(k + 2) = X * w;
  }

  SymplecticTransform out;
  out.F = F;
  out.omega_tilde_a = wa_t;
  out.omega_tilde_r = wr_t;
  return out;
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::RWA: return "RWA";
    case Regime::BeyondRWA: return "BeyondRWA";
    case Regime::ResonantLargeG: return "ResonantLargeG";
    case Regime::ResonantSmallG: return "ResonantSmallG";
  }
  return "unknown";
}

DispersiveShifts shifts_rwa(const TwoModeSystem& sys, DeltaConvention c) {
  check_system(sys);
  const auto [D, S] = detunings(sys, c);
  (void)S;
  const double ec = sys.E_C_angular();
  const double g2 = sys.g * sys.g;
  const double x = g2 / (D * D);

  DispersiveShifts out;
  out.regime = Regime::RWA;
  common_warnings(sys, D, out);
  out.omega_tilde_a = sys.omega_a - g2 / D - ec * x;
  out.omega_tilde_r = sys.omega_r + g2 / D + ec * x;
  out.A_a_over_h = sys.E_C_over_h * (1.0 - 2.0 * x);
  out.A_r_over_h = sys.E_C_over_h * x * x;
  out.chi_over_h = 2.0 * sys.E_C_over_h * x;
  out.delta_nm_over_h = g2 / D / constants::two_pi;
  return out;
}

DispersiveShifts shifts_beyond_rwa(const TwoModeSystem& sys, DeltaConvention c) {
  check_system(sys);
  const auto [D, S] = detunings(sys, c);
  const double ec = sys.E_C_angular();
  const double wa = sys.omega_a, wr = sys.omega_r;
  const double g2 = sys.g * sys.g;
  const double D2S2 = D * D * S * S;

  DispersiveShifts out;
  out.regime = Regime::BeyondRWA;
  common_warnings(sys, D, out);
  if (std::abs(wr - 3.0 * wa) < 0.05 * wr) out.warnings.push_back("divergence: omega_r close to 3 omega_a");
  if (std::abs(wa - 3.0 * wr) < 0.05 * wa) out.warnings.push_back("divergence: omega_a close to 3 omega_r");
  if (sys.g > 0.3 * std::min(wa, wr)) out.warnings.push_back("g not small compared to the bare frequencies");

  out.omega_tilde_a = wa - 2.0 * g2 * wr / (D * S) - 4.0 * ec * g2 * wr * wa / D2S2;
  out.omega_tilde_r = wr + 2.0 * g2 * wa / (D * S) + 4.0 * ec * g2 * wa * wa / D2S2;
  out.A_a_over_h = sys.E_C_over_h * (1.0 - 4.0 * g2 * wr * (wa * wa + wr * wr) / (wa * D2S2));
  out.chi_over_h = 8.0 * sys.E_C_over_h * g2 * wr * wr / D2S2;
  const double x = g2 / (D * D);
  out.A_r_over_h = sys.E_C_over_h * x * x;
  out.A_r_is_bound = true;
  out.delta_nm_over_h = 2.0 * g2 * wa / (D * S) / constants::two_pi;
  return out;
}

DispersiveShifts resonant_large_g(const TwoModeSystem& sys) {
  check_system(sys);
  const double ec = sys.E_C_angular();
  const double w = 0.5 * (sys.omega_a_bar() + sys.omega_r);
  const double g = sys.g;
  if (!(g > 0)) throw RegimeError("resonant large-coupling regime needs g > 0");
  if (ec / g > 0.5) throw RegimeError("E_C/g > 0.5: coupling not large compared to the anharmonicity");
  if (g / w > 0.5) throw RegimeError("g/omega > 0.5: coupling not small compared to the frequency");

  DispersiveShifts out;
  out.regime = Regime::ResonantLargeG;
  if (std::abs(sys.omega_a_bar() - sys.omega_r) > g)
    out.warnings.push_back("modes are detuned by more than g");
  out.omega_tilde_a = w + g - g * g / (2.0 * w);
  out.omega_tilde_r = w - g - g * g / (2.0 * w);
  out.A_a_over_h = sys.E_C_over_h / 4.0;
  out.A_r_over_h = sys.E_C_over_h / 4.0;
  out.chi_over_h = sys.E_C_over_h / 2.0;
  return out;
}

double chi_koch_over_h(const TwoModeSystem& sys) {
  const double ec = sys.E_C_angular();
  const double D = sys.omega_a - sys.omega_r;
  return 2.0 * ec * sys.g * sys.g / (D * (D - ec)) / constants::two_pi;
}

std::vector<JcDoublet> resonant_small_g(const TwoModeSystem& sys, int n_max) {
  check_system(sys);
  if (n_max < 1) throw ValueError("n_max must be at least 1");
  std::vector<JcDoublet> out;
  const double D = sys.omega_r - sys.omega_a;
  for (int n = 1; n <= n_max; ++n) {
    const double mid = n * sys.omega_r - 0.5 * D;
    const double half = std::sqrt(n * sys.g * sys.g + 0.25 * D * D);
    out.push_back({n, mid + half, mid - half});
  }
  return out;
}

Regime detect_regime(const TwoModeSystem& sys) {
  check_system(sys);
  const double ec = sys.E_C_angular();
  if (sys.g > ec) {
    if (std::abs(sys.omega_a_bar() - sys.omega_r) < sys.g) return Regime::ResonantLargeG;
  } else if (std::abs(sys.Delta()) < sys.g) {
    return Regime::ResonantSmallG;
  }
  if (std::abs(sys.Delta()) / sys.Sigma() < 0.1) return Regime::RWA;
  return Regime::BeyondRWA;
}

DispersiveShifts compute_shifts(const TwoModeSystem& sys, Regime r, DeltaConvention c) {
  switch (r) {
    case Regime::RWA: return shifts_rwa(sys, c);
    case Regime::BeyondRWA: return shifts_beyond_rwa(sys, c);
    case Regime::ResonantLargeG: return resonant_large_g(sys);
    case Regime::ResonantSmallG: {
      // Closed forms only cover the ladder; report the first doublet.
      const auto lad = resonant_small_g(sys, 1);
      DispersiveShifts out;
      out.regime = Regime::ResonantSmallG;
      out.omega_tilde_a = lad[0].E_plus;
      out.omega_tilde_r = lad[0].E_minus;
      out.A_a_over_h = sys.E_C_over_h;
      out.warnings.push_back("small-coupling resonance: only the first doublet is reported");
      return out;
    }
  }
  throw ValueError("unknown regime");
}

}  // namespace cqed
