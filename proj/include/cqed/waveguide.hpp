#pragma once

#include <complex>
#include <vector>

namespace cqed {

enum class WaveguideKind { QuarterWave, HalfWave };

struct WaveguideSpec {
  WaveguideKind kind = WaveguideKind::QuarterWave;
  double Z_c = 50.0;     // Ohms
  double omega_c = 0.0;  // rad/s
  int M = 4;

  void validate() const;
};

struct LadderMode {
  double C;      // F
  double L;      // H
  double omega;  // rad/s
};

// Parallel-LC sections in series; mode m resonates at (2m+1) omega_0.
struct ModeLadder {
  std::vector<LadderMode> modes;

  double fundamental_impedance() const;  // sqrt(L_0 / C)
};

ModeLadder lumped_equivalent(const WaveguideSpec& spec);

// Series sum of parallel-LC impedances. Throws PoleError within a relative
// 1e-12 of any mode frequency.
std::complex<double> ladder_impedance(const ModeLadder& ladder, double omega);

struct PhaseVelocity {
  double v_phi;      // m/s
  double eps_r_eff;  // (c / v_phi)^2
};

// Half-wave resonator of the given length with fundamental omega_r:
// lambda_1 = 2 * length and v_phi = lambda_1 * omega_r / 2pi.
PhaseVelocity phase_velocity_check(double length, double omega_r);

// v_phi for a given effective permittivity.
double phase_velocity_from_permittivity(double eps_r_eff);

}  // namespace cqed
