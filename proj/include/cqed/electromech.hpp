#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "cqed/errors.hpp"

namespace cqed {

struct DrumSpec {
  double k = 0.0;   // N/m
  double m = 0.0;   // kg
  double A = 0.0;   // m^2
  double d = 0.0;   // m, zero-bias gap
  double V0 = 0.0;  // V

  void validate() const;
};

// Smallest static equilibrium k x = V0^2 eps0 A / (2 (d - x)^2) in [0, d/3).
double static_solve(const DrumSpec& s);

// Bias at which the equilibrium reaches x0 = d/3 and k_eff vanishes.
double pull_in_voltage(double k, double A, double d);
inline double pull_in_voltage(const DrumSpec& s) { return pull_in_voltage(s.k, s.A, s.d); }

struct DrumEquivalent {
  double V0 = 0.0;
  double m = 0.0;
  double x0 = 0.0;
  double D = 0.0;
  double C_d = 0.0;
  double k_eff = 0.0;
  double C_m = 0.0;  // 0 without bias
  double L_m = 0.0;  // +inf without bias
  double Z_m = 0.0;  // +inf without bias
  double omega_m_biased = 0.0;
  double omega_m_unbiased = 0.0;
};

DrumEquivalent equivalent_circuit(const DrumSpec& s);

// Y(omega) = j omega C_d + j omega C_m / (1 - omega^2 L_m C_m).
std::complex<double> admittance(const DrumEquivalent& eq, double omega);

// Bias giving omega_biased / omega_unbiased = ratio.
double bias_for_softening(const DrumSpec& s, double ratio);

struct DrumTransmonCoupling {
  double C_a = 0.0;
  double C_m_tilde = 0.0;
  double omega_a_bar = 0.0;  // rad/s
  double E_C_over_h = 0.0;
  double omega_m_tilde = 0.0;  // rad/s
  double g = 0.0;              // rad/s
};

DrumTransmonCoupling drum_transmon_coupling(const DrumEquivalent& eq, double C_a_prime, double L_J);

// Junction inductance putting the linearized transmon on resonance with
// the loaded mechanical mode.
double resonant_junction_inductance(const DrumEquivalent& eq, double C_a_prime);

struct GhzBound {
  double softening_s = 0.0;           // k_eff / k used for chi
  double chi_over_hbar_omega_a = 0.0;
  double optimum_s = 0.0;
  double optimum_chi_over_hbar_omega_a = 0.0;
  double printed_branch_value = 0.0;  // closed forms as usually quoted
  double q_lower = 0.0;               // 10 (omega_a / omega_m0)^3
  double required_Q = 0.0;            // factor 10 above hbar omega_a / chi
};

// chi / (hbar omega_a) = 0.1 (w_m0/w_a)^3 sqrt(C_d^2 (1-s)^2 (C_d + C_a' s) / (C_a' + C_d)^3)
// with s = k_eff/k. Without a softening ratio the optimum s is used.
GhzBound ghz_dispersive_bound(double omega_a, double omega_m0, double C_a_prime, double C_d,
                              std::optional<double> softening_ratio = std::nullopt);

// Smallest unbiased mechanical frequency (Hz) for which chi exceeds the
// transmon linewidth by `factor`.
double minimum_mechanical_frequency(double f_a_hz, double Q_a, double C_a_prime, double C_d,
                                    std::optional<double> softening_ratio = std::nullopt, double factor = 10.0);

enum class RegimeCase {
  TwoBodyAnharmonic,   // A_L >> g
  TwoBodyCoupling,     // g >> A_L
  ThreeBodyAGChi,      // A_L >> g >> chi
  ThreeBodyAChiG,      // A_L, chi >> g
  ThreeBodyGChiA,      // g >> chi >> A_L
  ThreeBodyChiGA,      // chi >> g >> A_L
  GHzDispersive,
};
std::string to_string(RegimeCase c);

struct RegimeInputs {
  double A_L = 0.0, chi = 0.0, g = 0.0, A_H = 0.0;  // Hz
  double gamma_L = 0.0, gamma_H = 0.0;              // Hz
  double n_th = 0.0;
  double omega_L = 0.0, omega_m = 0.0;  // Hz
};

struct RegimeReport {
  RegimeCase tag = RegimeCase::TwoBodyAnharmonic;
  double factor = 0.0;
  double margin = 0.0;  // min ratio in the required chain, capped
  bool pass = false;
  std::string inequality;
  std::vector<std::string> warnings;
};

class AmbiguousRegime : public Error {
 public:
  AmbiguousRegime(const std::string& what, std::vector<std::string> candidates)
      : Error("AmbiguousRegime", what), candidates_(std::move(candidates)) {}
  const std::vector<std::string>& candidates() const { return candidates_; }

 private:
  std::vector<std::string> candidates_;
};

inline constexpr double kMarginCap = 1e12;

RegimeReport classify_regime(const RegimeInputs& in);

struct DressedShifts {
  double chi_plus = 0.0;
  double chi_minus = 0.0;
};

// chi cos^2(theta_n), chi sin^2(theta_n) with tan 2 theta_n = -2 g sqrt(n) / Delta.
DressedShifts dressed_shifts(double g, double Delta, double chi, int n);

struct HybridizationSplit {
  double f = 0.0, h = 0.0;
  double chi_L = 0.0, chi_m = 0.0;
  double offset_plus = 0.0, offset_minus = 0.0;  // added to omega_L
};

HybridizationSplit hybridization_split(double g, double Delta, double chi);

enum class StateKind { Fock, Cat };

struct FeasibilityParams {
  double m = 0.0;     // kg
  double f_m = 0.0;   // Hz
  double Q_m = 0.0;
  double T = 0.0;     // K
  int n = 0;
  double A_mass = 28.0;
  double R0 = 0.9e-15;
  StateKind kind = StateKind::Fock;
  double R_body = 0.0;  // m, optional for t_K and t_P

  void validate() const;
};

struct FeasibilityReport {
  double x_zpf = 0.0;
  double delta_x = 0.0;
  double a = 0.0;
  double n_th = 0.0;
  double gamma_m = 0.0;        // rad/s
  double t_coh = 0.0;          // s
  double t_coh_high_T = 0.0;   // s, hbar omega << k_B T limit
  double t_G = 0.0;            // s
  double t_K = 0.0;            // s, 0 without a body radius
  double t_P = 0.0;            // s, 0 without a body radius
  double condition_low = 0.0;  // f_m 2e5
  double condition_mid = 0.0;  // ((2|4) n + 1) / m
  double condition_high = 0.0; // Q_m 1e4
  double analytic_low = 0.0;   // f_m 8 a^2 / h
  double analytic_high = 0.0;  // Q_m 2 A^(2/3) G m_u / (k_B T R0)
  bool condition_pass = false;
  bool gravity_faster = false;  // t_G < t_coh
};

FeasibilityReport feasibility(const FeasibilityParams& p);

}  // namespace cqed
