#include "cqed/quantizer.hpp"

#include <cmath>
#include <complex>

#include "cqed/constants.hpp"
#include "cqed/errors.hpp"

namespace cqed {

namespace {

void check_modes(int M) {
  if (M < 1) throw ValueError("at least one resonator mode is required");
}

// Common denominator C_r (M C_c C_a + C_r (C_c + C_a)).
double inverse_denominator(const ReducedCircuit& rc, int M) {
  return rc.C_r * (M * rc.C_c * rc.C_a + rc.C_r * (rc.C_c + rc.C_a));
}

}  // namespace

Eigen::MatrixXd build_capacitance_matrix(const ReducedCircuit& rc, int M) {
  check_modes(M);
  Eigen::MatrixXd C = Eigen::MatrixXd::Constant(M + 1, M + 1, rc.C_c);
  C(0, 0) = rc.C_a + rc.C_c;
  for (int m = 1; m <= M; ++m) {
    C(0, m) = C(m, 0) = -rc.C_c;
    C(m, m) = rc.C_r + rc.C_c;
  }
  return C;
}

Eigen::MatrixXd capacitance_inverse(const ReducedCircuit& rc, int M) {
  check_modes(M);
  const double Ca = rc.C_a, Cc = rc.C_c, Cr = rc.C_r;
  const double den = inverse_denominator(rc, M);
  Eigen::MatrixXd inv = Eigen::MatrixXd::Constant(M + 1, M + 1, -Ca * Cc / den);
  inv(0, 0) = (Cr * Cr + M * Cr * Cc) / den;
  for (int m = 1; m <= M; ++m) {
    inv(0, m) = inv(m, 0) = Cr * Cc / den;
    inv(m, m) = (Cr * (Cc + Ca) + (M - 1) * Cc * Ca) / den;
  }
  return inv;
}

double charging_energy_over_h(double C) { return constants::e * constants::e / (2.0 * C) / constants::h; }

QuantizedSystem quantize(const ReducedCircuit& rc, int M) {
  check_modes(M);
  rc.validate();
  const double Ca = rc.C_a, Cc = rc.C_c, Cr = rc.C_r;
  const double hbar = constants::hbar;
  const double num = Cr * (M * Cc * Ca + Cr * (Cc + Ca));

  QuantizedSystem q;
  q.M = M;
  q.C_tilde_r = num / ((M - 1) * Cc * Ca + Cr * (Cc + Ca));
  q.C_tilde_a = num / (Cr * Cr + M * Cr * Cc);
  q.C_tilde_c = Ca * Cr * Cc / (M * Cc * Ca + Cr * (Cc + Ca));
  q.inv_cap_transmon_mode = q.C_tilde_c / (Ca * Cr);
  q.inv_cap_mode_mode = -Ca * Cc / num;

  q.omega_m.resize(M);
  q.Z_m.resize(M);
  q.q_zpf_m.resize(M);
  for (int m = 0; m < M; ++m) {
    const double k = 2.0 * m + 1.0;
    const double Lm = rc.L_0 / (k * k);
    q.omega_m[m] = 1.0 / std::sqrt(Lm * q.C_tilde_r);
    q.Z_m[m] = std::sqrt(Lm / q.C_tilde_r);
    q.q_zpf_m[m] = std::sqrt(hbar / (2.0 * q.Z_m[m]));
  }

  q.L_J = josephson_inductance_from_energy(rc.E_J_max_over_h);
  q.Z_a = std::sqrt(q.L_J / q.C_tilde_a);
  q.q_zpf_a = std::sqrt(hbar / (2.0 * q.Z_a));
  q.phi_zpf_a = std::sqrt(hbar * q.Z_a / 2.0);
  q.E_C_over_h = charging_energy_over_h(q.C_tilde_a);
  q.omega_a_bar = 1.0 / std::sqrt(q.L_J * q.C_tilde_a);

  q.g_m.resize(M);
  q.G = Eigen::MatrixXd::Zero(M, M);
  for (int m = 0; m < M; ++m) {
    q.g_m[m] = q.q_zpf_m[m] * q.q_zpf_a * q.inv_cap_transmon_mode / hbar;
    for (int k = 0; k < M; ++k)
      if (k != m) q.G(m, k) = q.inv_cap_mode_mode * q.q_zpf_m[m] * q.q_zpf_m[k] / hbar;
  }
  return q;
}

double coupling_single_mode(double C_a, double C_c, double C_r, double omega_a_bar, double omega_r) {
  if (!(C_a > 0 && C_c > 0 && C_r > 0 && omega_a_bar > 0 && omega_r > 0))
    throw ValueError("coupling inputs must be positive");
  return 0.5 * std::sqrt(omega_a_bar * omega_r / ((1.0 + C_a / C_c) * (1.0 + C_r / C_c)));
}

void fix_phase(Eigen::Ref<Eigen::VectorXcd> v) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > best_abs * (1.0 + 1e-12) + 1e-300) {
      best_abs = a;
      best = i;
    }
  }
  if (best_abs > 0.0) v *= std::conj(v[best]) / best_abs;
}

CpbSpectrum cpb_diagonalize(const CpbParams& p, int N_q) {
  if (p.N_max < 5) throw ValueError("charge truncation N_max must be at least 5");
  const int dim = 2 * p.N_max + 1;
  if (N_q < 1 || N_q > dim) throw ValueError("number of retained levels out of range");
  if (p.E_C_over_h < 0.0 || p.E_J_over_h < 0.0) throw ValueError("energies must be non-negative");

  using cd = std::complex<double>;
  const double x = constants::pi * p.flux_ratio;
  const double hop = -0.5 * p.E_J_over_h * std::cos(x);
  const double skew = 0.5 * p.d * p.E_J_over_h * std::sin(x);

  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) {
    const double n = k - p.N_max - p.N_env;
    H(k, k) = 4.0 * p.E_C_over_h * n * n;
    if (k + 1 < dim) {
      // -E_J cos(d) cos(x) - d E_J sin(d) sin(x), sin(d) = (|N><N+1| - |N+1><N|)/2i
      H(k, k + 1) = cd(hop, skew);
      H(k + 1, k) = cd(hop, -skew);
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  if (es.info() != Eigen::Success) throw ConvergenceFailure("charge-basis eigensolver failed");

  CpbSpectrum out;
  out.N_max = p.N_max;
  out.energies_hz = es.eigenvalues().head(N_q);
  out.eigenvectors = es.eigenvectors().leftCols(N_q);
  for (int i = 0; i < N_q; ++i) {
    fix_phase(out.eigenvectors.col(i));
    const double edge = std::norm(out.eigenvectors(0, i)) + std::norm(out.eigenvectors(dim - 1, i));
    if (edge > 1e-8)
      throw TruncationError("level " + std::to_string(i) + " populates the charge boundary (" +
                            std::to_string(edge) + "); increase N_max");
  }
  Eigen::VectorXd charge(dim);
  for (int k = 0; k < dim; ++k) charge[k] = k - p.N_max;
  Eigen::MatrixXcd n = out.eigenvectors.adjoint() * charge.asDiagonal() * out.eigenvectors;
  out.charge_matrix = 0.5 * (n + n.adjoint());
  return out;
}

}  // namespace cqed
