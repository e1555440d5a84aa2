#include "cqed/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cqed/errors.hpp"

namespace cqed {

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& opt) {
  const std::size_t n = x0.size();
  if (n == 0) throw ValueError("Nelder-Mead needs at least one coordinate");
  NelderMeadResult res;

  auto eval = [&](const std::vector<double>& x) {
    ++res.evals;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<std::vector<double>> simplex(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) {
    double step = i < opt.initial_step.size() ? opt.initial_step[i] : (x0[i] != 0.0 ? 0.05 * x0[i] : 0.05);
    simplex[i + 1][i] += step;
  }
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  auto point = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
    std::vector<double> p(n);
    for (std::size_t j = 0; j < n; ++j) p[j] = c[j] + t * (w[j] - c[j]);
    return p;
  };

  while (res.evals < opt.max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

    double diam = 0.0;
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = 0; j < n; ++j) diam = std::max(diam, std::abs(simplex[i][j] - simplex[best][j]));
    const double spread = std::abs(fv[worst] - fv[best]);
    if (spread <= opt.ftol * (std::abs(fv[best]) + opt.ftol) && diam <= opt.xtol) {
      res.converged = true;
      break;
    }

    std::vector<double> c(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i)
      if (i != worst)
        for (std::size_t j = 0; j < n; ++j) c[j] += simplex[i][j] / n;

    const auto xr = point(c, simplex[worst], -1.0);
    const double fr = eval(xr);
    if (fr < fv[best]) {
      const auto xe = point(c, simplex[worst], -2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        fv[worst] = fe;
      } else {
        simplex[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      simplex[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    const auto xc = point(c, outside ? xr : simplex[worst], 0.5);
    const double fc = eval(xc);
    if (fc < (outside ? fr : fv[worst])) {
      simplex[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      simplex[i] = point(simplex[best], simplex[i], 0.5);
      fv[i] = eval(simplex[i]);
    }
  }

  const std::size_t b = std::min_element(fv.begin(), fv.end()) - fv.begin();
  res.x = simplex[b];
  res.f = fv[b];
  return res;
}

}  // namespace cqed
