#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "cqed/lanczos.hpp"
#include "cqed/quantizer.hpp"

namespace cqed {

struct TruncationSpec {
  int N_q = 5;
  std::vector<int> photon_caps;  // Fock dimension per mode
  double linewidth_hz = 0.0;
  std::size_t max_dimension = 4'000'000;

  std::size_t dimension() const;
  std::vector<int> dims() const;  // (N_q, caps...)
  void validate() const;
};

// Everything the assembled Hamiltonian depends on, in Hz.
struct RabiCoefficients {
  Eigen::VectorXd mode_freq_hz;
  Eigen::VectorXd transmon_levels_hz;
  std::vector<Eigen::MatrixXcd> g_hz;  // per mode, N_q x N_q
  Eigen::MatrixXd G_hz;                // M x M, zero diagonal

  int M() const { return static_cast<int>(mode_freq_hz.size()); }
  int N_q() const { return static_cast<int>(transmon_levels_hz.size()); }
};

// Couplings g_{m,i,j} = q_zpf,m 2e C~_c/(C_a C_r) <i|N|j> / h.
RabiCoefficients rabi_coefficients(const QuantizedSystem& qs, const CpbSpectrum& cpb);

// Basis order: transmon index first, then modes 0..M-1; the last index
// runs fastest.
SparseHermitian assemble(const RabiCoefficients& c, const TruncationSpec& t);
SparseHermitian assemble(const QuantizedSystem& qs, const CpbSpectrum& cpb, const TruncationSpec& t);

struct BasisLabel {
  std::vector<int> n;  // (i, n_0, ..., n_{M-1})
  std::string to_string() const;
  bool operator==(const BasisLabel&) const = default;
};

BasisLabel unflatten(std::size_t index, const std::vector<int>& dims);
std::size_t flatten(const BasisLabel& l, const std::vector<int>& dims);

struct HamiltonianModel {
  int dimension = 0;
  std::vector<int> dims;
  double ground_energy_hz = 0.0;
  Eigen::VectorXd eigenvalues_hz;  // ground subtracted, ascending
  Eigen::MatrixXcd eigenvectors;
  std::vector<BasisLabel> labels;  // dominant bare state per eigenstate

  // Eigenstate with the largest overlap with a bare state.
  int track(const BasisLabel& bare) const;
  double transition_hz(const BasisLabel& bare) const { return eigenvalues_hz(track(bare)); }
};

struct DiagonalizeOptions {
  int dense_threshold = 2048;
  bool force_iterative = false;
  LanczosOptions lanczos;
};

HamiltonianModel diagonalize(const SparseHermitian& H, int k, const std::vector<int>& dims,
                             const DiagonalizeOptions& opt = {});
HamiltonianModel diagonalize(const SparseHermitian& H, int k, const DiagonalizeOptions& opt = {});

struct ConvergenceReport {
  std::vector<BasisLabel> tracked;
  std::vector<double> reference_hz;
  std::vector<std::string> varied;      // parameter per refinement, e.g. "N_q", "N_0"
  std::vector<double> shift_hz;         // max tracked shift per refinement
  double max_shift_hz = 0.0;
  double threshold_hz = 0.0;
  bool pass = false;
};

// Increments each truncation parameter by one in turn and compares the
// tracked transitions. Defaults to the single excitations of every mode
// and of the transmon.
ConvergenceReport check_convergence(const QuantizedSystem& qs, const CpbParams& cpb, const TruncationSpec& t,
                                    std::vector<BasisLabel> tracked = {}, const DiagonalizeOptions& opt = {});

// Transmon in the harmonic basis with the quartic nonlinearity:
// (w_a + E_C) a^dag a - (E_C/12)(a + a^dag)^4 + w_r b^dag b + g (a - a^dag)(b - b^dag).
// Frequencies in Hz; returns a real symmetric dense matrix.
Eigen::MatrixXd harmonic_two_mode_hamiltonian(double f_a, double E_C_over_h, double f_r, double g_hz, int dim_a,
                                              int dim_r);

}  // namespace cqed
