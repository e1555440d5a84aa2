#pragma once

#include <functional>
#include <vector>

namespace cqed {

struct NelderMeadOptions {
  int max_evals = 20000;
  double ftol = 1e-12;  // relative spread of simplex values
  double xtol = 1e-10;  // absolute simplex diameter
  std::vector<double> initial_step;  // per coordinate; default 5% or 0.05
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  int evals = 0;
  bool converged = false;
};

using Objective = std::function<double(const std::vector<double>&)>;

// Unconstrained downhill simplex with the standard coefficients
// (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& opt = {});

}  // namespace cqed
