#include "cqed/waveguide.hpp"

#include <cmath>

#include "cqed/constants.hpp"
#include "cqed/errors.hpp"

namespace cqed {

void WaveguideSpec::validate() const {
  if (!(Z_c > 0.0)) throw ValueError("characteristic impedance must be positive");
  if (!(omega_c > 0.0)) throw ValueError("waveguide frequency must be positive");
  if (M < 1) throw ValueError("at least one mode is required");
}

double ModeLadder::fundamental_impedance() const {
  return std::sqrt(modes.front().L / modes.front().C);
}

ModeLadder lumped_equivalent(const WaveguideSpec& spec) {
  spec.validate();
  const double pi = constants::pi;
  const bool quarter = spec.kind == WaveguideKind::QuarterWave;
  const double C = quarter ? pi / (4.0 * spec.omega_c * spec.Z_c) : pi / (2.0 * spec.omega_c * spec.Z_c);
  const double L0 = quarter ? 4.0 * spec.Z_c / (pi * spec.omega_c) : 2.0 * spec.Z_c / (pi * spec.omega_c);
  ModeLadder out;
  out.modes.reserve(spec.M);
  for (int m = 0; m < spec.M; ++m) {
    const double k = 2.0 * m + 1.0;
    const double L = L0 / (k * k);
    out.modes.push_back({C, L, 1.0 / std::sqrt(L * C)});
  }
  return out;
}

std::complex<double> ladder_impedance(const ModeLadder& ladder, double omega) {
  using namespace std::complex_literals;
  std::complex<double> z = 0.0;
  for (const auto& m : ladder.modes) {
    if (std::abs(omega - m.omega) <= 1e-12 * m.omega)
      throw PoleError("frequency coincides with ladder mode at " + std::to_string(m.omega) + " rad/s");
    // 1/(i C w + 1/(i L w)) = i L w / (1 - L C w^2)
    z += 1i * m.L * omega / (1.0 - m.L * m.C * omega * omega);
  }
  return z;
}

PhaseVelocity phase_velocity_check(double length, double omega_r) {
  if (!(length > 0.0 && omega_r > 0.0)) throw ValueError("length and frequency must be positive");
  const double lambda1 = 2.0 * length;
  const double v = lambda1 * omega_r / constants::two_pi;
  const double ratio = constants::c / v;
  return {v, ratio * ratio};
}

double phase_velocity_from_permittivity(double eps_r_eff) {
  if (!(eps_r_eff > 0.0)) throw ValueError("permittivity must be positive");
  return constants::c / std::sqrt(eps_r_eff);
}

}  // namespace cqed
