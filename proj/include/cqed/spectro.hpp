#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace cqed {

using SparseC = Eigen::SparseMatrix<std::complex<double>>;

// Truncated Fock space; the first listed mode is the most significant
// factor of the tensor product.
class FockSpace {
 public:
  explicit FockSpace(std::vector<int> dims);

  const std::vector<int>& dims() const { return dims_; }
  int dimension() const { return dimension_; }
  SparseC identity() const;
  SparseC annihilator(int k) const;
  SparseC number(int k) const;
  // Embeds an operator acting on factor k.
  SparseC embed(int k, const SparseC& local) const;

 private:
  std::vector<int> dims_;
  int dimension_ = 1;
};

SparseC kron(const SparseC& A, const SparseC& B);
SparseC local_annihilator(int dim);

struct LindbladModel {
  SparseC H;
  std::vector<SparseC> collapse;  // rates folded in
};

// Column-stacking superoperator: vec(A rho B) = (B^T kron A) vec(rho).
SparseC liouvillian(const LindbladModel& m);

struct SteadyStateOptions {
  std::size_t iterative_threshold = 20000;  // Liouvillian rows
  double gmres_tol = 1e-13;
  int gmres_max_iter = 5000;
};

// Unique steady state with unit trace. Throws SingularLiouvillian with a
// null-space dimension estimate when the solve is singular.
Eigen::MatrixXcd steady_state(const LindbladModel& m, const SteadyStateOptions& opt = {});

struct ModeSpec {
  std::string name;
  int dim = 2;
  double freq = 0.0;
  double anharmonicity = 0.0;  // enters as -(A/2) a^dag a^dag a a
  double kappa = 0.0;
  double n_th = 0.0;
  bool rotating = false;  // shifted by -omega_d n in the drive frame
};

enum class CouplingKind {
  Exchange,         // g (a^dag b + a b^dag)
  CounterRotating,  // g (a^dag b^dag + a b)
  CrossKerr,        // -chi a^dag a b^dag b
};

struct CouplingSpec {
  CouplingKind kind = CouplingKind::Exchange;
  int a = 0;
  int b = 1;
  double strength = 0.0;
};

struct SpectroModel {
  std::string name;
  std::string units;  // frequency unit of every field
  std::vector<ModeSpec> modes;
  std::vector<CouplingSpec> couplings;
  int drive_mode = 0;
  double drive_amplitude = 0.0;  // epsilon (a + a^dag)
  double sweep_start = 0.0;
  double sweep_stop = 0.0;
  int sweep_points = 0;

  void validate() const;
  std::vector<double> sweep_grid() const;
};

LindbladModel build_lindblad(const SpectroModel& m, double omega_d);

// <i (a - a^dag)> for the drive mode.
double response(const SpectroModel& m, const Eigen::MatrixXcd& rho);

struct SpectroscopyTrace {
  std::vector<double> omega_d;
  std::vector<double> response;
  std::vector<bool> ok;
  std::vector<std::string> errors;
};

SpectroscopyTrace sweep(const SpectroModel& m, const std::vector<double>& omega_d, unsigned jobs = 1,
                        const SteadyStateOptions& opt = {});
inline SpectroscopyTrace sweep(const SpectroModel& m, unsigned jobs = 1) { return sweep(m, m.sweep_grid(), jobs); }

std::vector<std::string> preset_names();
SpectroModel preset(const std::string& name);

struct Peak {
  std::size_t index = 0;
  double position = 0.0;
  double height = 0.0;
  double fwhm = 0.0;  // NaN when neither side falls to half height
};

// Local maxima above rel_threshold * max, sorted by position. Positions are
// refined with a parabola through the neighbouring points. The width is
// measured against zero response; a side that meets a neighbouring peak
// before half height is mirrored from the other side.
std::vector<Peak> find_peaks(const SpectroscopyTrace& t, double rel_threshold = 0.05);

}  // namespace cqed
