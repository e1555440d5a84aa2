#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace cqed {

// Transmon (first transition omega_a, charging energy E_C) coupled to a
// resonator through +g (a - a^dag)(b - b^dag).
struct TwoModeSystem {
  double omega_a = 0.0;  // rad/s
  double E_C_over_h = 0.0;
  double omega_r = 0.0;  // rad/s
  double g = 0.0;        // rad/s

  double E_C_angular() const;
  double omega_a_bar() const { return omega_a + E_C_angular(); }
  double Delta() const { return omega_r - omega_a; }
  double Sigma() const { return omega_a + omega_r; }
};

struct SymplecticTransform {
  Eigen::Matrix4d F;  // eta = F^T v, v = (a, b, a^dag, b^dag)
  double omega_tilde_a = 0.0;
  double omega_tilde_r = 0.0;

  Eigen::Matrix2d A() const { return F.topLeftCorner<2, 2>(); }
  Eigen::Matrix2d B() const { return F.topRightCorner<2, 2>(); }
};

Eigen::Matrix4d symplectic_form();

// Quadratic Hamiltonian matrix H with H = v^T H v / 2 (up to a constant),
// built from the linearized frequency omega_bar.
Eigen::Matrix4d quadratic_hamiltonian(double omega_bar, double omega_r, double g);

SymplecticTransform symplectic_diagonalize(const TwoModeSystem& sys);
SymplecticTransform symplectic_diagonalize(double omega_bar, double omega_r, double g);

// Closed-form normal-mode frequencies. The first element follows the atom:
// the upper branch when omega_bar >= omega_r, the lower one otherwise.
std::pair<double, double> exact_normal_frequencies(double omega_bar, double omega_r, double g);
inline std::pair<double, double> exact_normal_frequencies(const TwoModeSystem& sys) {
  return exact_normal_frequencies(sys.omega_a_bar(), sys.omega_r, sys.g);
}

enum class Regime { RWA, BeyondRWA, ResonantLargeG, ResonantSmallG };
std::string to_string(Regime r);

enum class DeltaConvention { AsPrinted, Primed };

struct DispersiveShifts {
  double omega_tilde_a = 0.0;  // rad/s
  double omega_tilde_r = 0.0;  // rad/s
  double A_a_over_h = 0.0;
  double A_r_over_h = 0.0;
  double chi_over_h = 0.0;
  // Frequency shift of the resonator from linear hybridization alone.
  double delta_nm_over_h = 0.0;
  bool A_r_is_bound = false;
  Regime regime = Regime::RWA;
  std::vector<std::string> warnings;
};

DispersiveShifts shifts_rwa(const TwoModeSystem& sys, DeltaConvention c = DeltaConvention::AsPrinted);
DispersiveShifts shifts_beyond_rwa(const TwoModeSystem& sys, DeltaConvention c = DeltaConvention::AsPrinted);
DispersiveShifts resonant_large_g(const TwoModeSystem& sys);

// Perturbative transmon cross-Kerr 2 E_C g^2 / (D (D - E_C)) in Hz, with
// D = omega_a - omega_r. Half of this value is the resonator pull per qubit state.
double chi_koch_over_h(const TwoModeSystem& sys);

struct JcDoublet {
  int n;
  double E_plus;   // rad/s
  double E_minus;  // rad/s
};

// Jaynes-Cummings ladder n omega +- sqrt(n) g (with the detuned
// generalization when omega_a != omega_r).
std::vector<JcDoublet> resonant_small_g(const TwoModeSystem& sys, int n_max);

// Picks a regime from the frequencies. Thresholds: |Delta| < g -> resonant
// (large g when g > E_C), else RWA when |Delta|/Sigma < 0.1, else beyond RWA.
Regime detect_regime(const TwoModeSystem& sys);

DispersiveShifts compute_shifts(const TwoModeSystem& sys, Regime r,
                                DeltaConvention c = DeltaConvention::AsPrinted);

}  // namespace cqed
