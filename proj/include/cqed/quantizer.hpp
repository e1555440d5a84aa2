#pragma once

#include <Eigen/Dense>

#include "cqed/circuit_model.hpp"

namespace cqed {

// Capacitance matrix ordered (transmon node, mode 0, ..., mode M-1).
Eigen::MatrixXd build_capacitance_matrix(const ReducedCircuit& rc, int M);

// Closed-form inverse of build_capacitance_matrix.
Eigen::MatrixXd capacitance_inverse(const ReducedCircuit& rc, int M);

struct QuantizedSystem {
  int M = 0;
  double C_tilde_r = 0.0;
  double C_tilde_a = 0.0;
  double C_tilde_c = 0.0;
  // Inverse-capacitance entries: transmon-mode (C~_c / (C_a C_r)) and
  // mode-mode off-diagonal.
  double inv_cap_transmon_mode = 0.0;
  double inv_cap_mode_mode = 0.0;

  Eigen::VectorXd omega_m;  // rad/s
  Eigen::VectorXd Z_m;      // Ohm
  Eigen::VectorXd q_zpf_m;  // C

  double L_J = 0.0;
  double Z_a = 0.0;
  double q_zpf_a = 0.0;
  double phi_zpf_a = 0.0;
  double E_C_over_h = 0.0;
  double omega_a_bar = 0.0;

  Eigen::VectorXd g_m;  // rad/s, transmon-mode in the harmonic transmon basis
  Eigen::MatrixXd G;    // rad/s, mode-mode, zero diagonal
};

QuantizedSystem quantize(const ReducedCircuit& rc, int M);

// Single-mode coupling; tends to sqrt(omega_a_bar omega_r)/2 for C_c >> C_a, C_r.
double coupling_single_mode(double C_a, double C_c, double C_r, double omega_a_bar, double omega_r);

double charging_energy_over_h(double C);

struct CpbParams {
  double E_C_over_h = 0.0;
  double E_J_over_h = 0.0;
  double d = 0.0;
  double flux_ratio = 0.0;  // Phi / (h/2e)
  double N_env = 0.0;
  int N_max = 20;
};

struct CpbSpectrum {
  int N_max = 0;
  Eigen::VectorXd energies_hz;      // E_i / h, ascending, lowest N_q levels
  Eigen::MatrixXcd charge_matrix;   // <i|N|j>, N_q x N_q
  Eigen::MatrixXcd eigenvectors;    // charge basis N = -N_max..N_max per column

  int levels() const { return static_cast<int>(energies_hz.size()); }
};

// Charge-basis Cooper-pair box including the asymmetric-SQUID flux term.
// Throws TruncationError when a retained level populates the charge
// boundary |N| = N_max above 1e-8.
CpbSpectrum cpb_diagonalize(const CpbParams& p, int N_q);

inline CpbSpectrum cpb_diagonalize(double E_C_over_h, double E_J_over_h, double d, double flux_ratio,
                                   double N_env, int N_max, int N_q) {
  return cpb_diagonalize(CpbParams{E_C_over_h, E_J_over_h, d, flux_ratio, N_env, N_max}, N_q);
}

// Phase convention: the largest-magnitude component (first on ties) is made
// real and positive.
void fix_phase(Eigen::Ref<Eigen::VectorXcd> v);

}  // namespace cqed
