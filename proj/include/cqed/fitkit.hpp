#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "cqed/errors.hpp"

namespace cqed {

struct FluxPoint {
  double flux_ratio = 0.0;  // Phi / Phi_0
  std::string label;        // "c0", "c1", ... cavity modes; "q1", "q2", ... transmon levels
  double f_hz = 0.0;
  double weight = 1.0;
};

using FluxSweepData = std::vector<FluxPoint>;

struct FitParameters {
  double omega_0_hz = 0.0;  // bare fundamental, as a frequency
  double C_c = 0.0;
  double C_a = 0.0;
  double N_env = 0.0;
  double E_J_max_over_h = 0.0;
  double d = 0.0;
  std::vector<double> alpha;  // indexed like the mode list; alpha[0] is the fundamental and stays 1

  // Names accepted by fixed-parameter sets: omega_0, C_c, C_a, N_env, E_J, d, alpha_1, alpha_2, ...
  std::vector<std::string> names() const;
  double get(const std::string& name) const;
  void set(const std::string& name, double value);
};

struct FitModel {
  double Z_c = 50.0;  // quarter-wave characteristic impedance
  int modes = 2;
  int N_max = 20;
  int N_q = 5;
  std::vector<int> photon_caps{5, 3};

  void validate() const;
};

// alpha_m (2m - 1) omega_0 for the 1-based mode number m. Corrections
// outside [0.9, 1.1] are clamped and reported in `warnings` when given.
double apply_mode_corrections(const FitParameters& p, int m, std::vector<std::string>* warnings = nullptr);

// Transition frequency per requested label at one flux point.
std::vector<double> model_transitions(const FitParameters& p, const FitModel& model, double flux_ratio,
                                      const std::vector<std::string>& labels);

// Charging energy implied by the capacitances under `model`.
double fit_charging_energy(const FitParameters& p, const FitModel& model);

struct SynthesisOptions {
  std::vector<double> flux;
  std::vector<std::string> labels{"c0", "c1", "q1"};
  double noise_hz = 0.0;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
};

FluxSweepData synthesize_sweep(const FitParameters& truth, const FitModel& model, const SynthesisOptions& opt);

struct FitOptions {
  FitModel model;
  std::set<std::string> fixed{"omega_0", "d"};  // alpha_* are fixed unless listed in `release`
  std::set<std::string> release;
  int starts = 8;
  double jitter = 0.05;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  int max_evals = 3000;
  double ftol = 1e-9;
};

struct FitResult {
  FitParameters params;
  std::vector<std::string> free;
  std::vector<double> residuals_hz;  // model - data, per row in input order
  double rms_hz = 0.0;
  double objective = 0.0;  // weighted sum of squares, Hz^2
  Eigen::MatrixXd covariance;  // over `free`, natural units
  int evals = 0;
  bool converged = false;
  std::vector<std::string> warnings;
};

class FitNonConvergence : public NonConvergence {
 public:
  FitNonConvergence(const std::string& what, FitResult best) : NonConvergence(what), best_(std::move(best)) {}
  const FitResult& best() const { return best_; }

 private:
  FitResult best_;
};

// Weighted sum of squares of model - data.
double fit_objective(const FluxSweepData& data, const FitParameters& p, const FitModel& model, unsigned jobs = 1);

FitResult fit(const FluxSweepData& data, const FitParameters& init, const FitOptions& opt = {});

struct FluxCalibration {
  double period = 0.0;
  double offset = 0.0;
  double to_flux(double current) const { return (current - offset) / period; }
};

// Period from the dominant sinusoidal component of the dressed-cavity
// trace; offset at its maximum (minimum with sweet_spot_at_minimum), taken
// in [first current, first current + period).
FluxCalibration calibrate_flux(const std::vector<double>& current, const std::vector<double>& f_hz,
                               bool sweet_spot_at_minimum = false);

}  // namespace cqed
