#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace cqed {

struct DesignDerived {
  double omega_a = 0.0;      // rad/s, first transition
  double omega_a_bar = 0.0;  // rad/s, linearized
  double omega_r = 0.0;      // rad/s
  double g = 0.0;            // rad/s
  double g_ratio = 0.0;      // g / sqrt(omega_a omega_r)
  double E_C_over_h = 0.0;
  double E_J_over_h = 0.0;
  double omega_tilde_a = 0.0;
  double omega_tilde_r = 0.0;
  double chi_over_h = 0.0;
  // g >= |Delta|/2: perturbative shifts no longer apply and chi is only a
  // lower bound.
  bool breakdown = false;
  bool chi_is_lower_bound = false;
  std::vector<std::string> warnings;
};

struct DesignPoint {
  double C_a = 0.0, C_c = 0.0, C_r = 0.0;  // F
  double L_J = 0.0, L_r = 0.0;             // H
  DesignDerived derived;
};

// Fills derived quantities through quantization with a single resonator mode.
DesignDerived evaluate_design(const DesignPoint& dp);

enum class FrequencyConvention {
  Table,     // omega_a enters the exact normal-mode formula as the linearized frequency
  Physical,  // omega_a is the first transition, linearized frequency omega_a + E_C
};

// Table-style evaluation from frequencies (Hz) and g / sqrt(omega_a omega_r).
DesignDerived evaluate_frequencies(double f_a_hz, double f_r_hz, double E_C_over_h, double g_ratio,
                                   FrequencyConvention c = FrequencyConvention::Table);

struct DesignTarget {
  double omega_a_hz = 0.0;
  double omega_r_tilde_hz = 0.0;
  double chi_min_hz = 0.0;
  double gamma_hz = 0.0;
  double E_C_over_h = 0.0;
  double rel_tol = 0.02;  // on omega_a, omega_r_tilde, E_C
};

// Inclusive (lo, hi) ranges for C_a, C_c, C_r, L_J, L_r in that order.
struct DesignBounds {
  std::array<std::pair<double, double>, 5> range;
  static const std::array<const char*, 5>& names();
};

struct SearchOptions {
  int points_per_decade = 8;
  int refine_top = 16;
  int max_results = 10;
  std::uint64_t seed = 1;
  int jobs = 1;
};

// Grid plus Nelder-Mead refinement. Results satisfy every constraint and are
// ranked by chi/gamma. Throws NoFeasiblePoint otherwise.
std::vector<DesignPoint> search(const DesignTarget& target, const DesignBounds& bounds, const SearchOptions& opt = {});

// Constraint violation (0 when feasible) and the chi/gamma margin.
struct DesignScore {
  double violation = 0.0;
  double margin = 0.0;
};
DesignScore score_design(const DesignPoint& dp, const DesignTarget& target);

// Bose-Einstein occupation 1/(exp(hf/k_B T) - 1).
double thermal_occupation(double f_hz, double T_kelvin);
// k_B T / h.
double thermal_frequency(double T_kelvin);
// h f / k_B.
double temperature_for_frequency(double f_hz);

}  // namespace cqed
