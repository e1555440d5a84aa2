#include "cqed/designer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <random>

#include "cqed/circuit_model.hpp"
#include "cqed/constants.hpp"
#include "cqed/errors.hpp"
#include "cqed/nelder_mead.hpp"
#include "cqed/normalmodes.hpp"
#include "cqed/parallel.hpp"
#include "cqed/quantizer.hpp"

namespace cqed {

namespace {

void fill_shifts(DesignDerived& d, double omega_bar_for_modes) {
  const TwoModeSystem sys{d.omega_a, d.E_C_over_h, d.omega_r, d.g};
  const auto [wa, wr] = exact_normal_frequencies(omega_bar_for_modes, d.omega_r, d.g);
  d.omega_tilde_a = wa;
  d.omega_tilde_r = wr;
  const DispersiveShifts s = shifts_beyond_rwa(sys);
  d.chi_over_h = s.chi_over_h;
  d.breakdown = d.g >= 0.5 * std::abs(sys.Delta());
  d.chi_is_lower_bound = d.breakdown;
  if (d.breakdown) d.warnings.push_back("dispersive-breakdown: g is comparable to |Delta|, chi is a lower bound");
}

}  // namespace

DesignDerived evaluate_design(const DesignPoint& dp) {
  if (!(dp.C_a > 0 && dp.C_c > 0 && dp.C_r > 0 && dp.L_J > 0 && dp.L_r > 0))
    throw ValueError("design point needs positive capacitances and inductances");
  ReducedCircuit rc;
  rc.C_a = dp.C_a;
  rc.C_c = dp.C_c;
  rc.C_r = dp.C_r;
  rc.L_0 = dp.L_r;
  rc.E_J_max_over_h = josephson_energy_from_inductance(dp.L_J);
  const QuantizedSystem qs = quantize(rc, 1);

  DesignDerived d;
  d.E_C_over_h = qs.E_C_over_h;
  d.E_J_over_h = rc.E_J_max_over_h;
  d.omega_a_bar = qs.omega_a_bar;
  d.omega_a = qs.omega_a_bar - constants::two_pi * qs.E_C_over_h;
  d.omega_r = qs.omega_m(0);
  d.g = qs.g_m(0);
  if (!(d.omega_a > 0)) throw ValueError("charging energy exceeds the linearized transmon frequency");
  d.g_ratio = d.g / std::sqrt(d.omega_a * d.omega_r);
  if (d.E_C_over_h / d.E_J_over_h > 1.0 / 20.0) d.warnings.push_back("E_C/E_J above 1/20, outside the transmon regime");
  fill_shifts(d, d.omega_a_bar);
  return d;
}

DesignDerived evaluate_frequencies(double f_a_hz, double f_r_hz, double E_C_over_h, double g_ratio,
                                   FrequencyConvention c) {
  if (!(f_a_hz > 0 && f_r_hz > 0 && E_C_over_h >= 0 && g_ratio >= 0))
    throw ValueError("frequencies must be positive and g_ratio non-negative");
  DesignDerived d;
  d.omega_a = constants::two_pi * f_a_hz;
  d.omega_r = constants::two_pi * f_r_hz;
  d.E_C_over_h = E_C_over_h;
  d.omega_a_bar = d.omega_a + constants::two_pi * E_C_over_h;
  d.g_ratio = g_ratio;
  d.g = g_ratio * std::sqrt(d.omega_a * d.omega_r);
  fill_shifts(d, c == FrequencyConvention::Table ? d.omega_a : d.omega_a_bar);
  return d;
}

const std::array<const char*, 5>& DesignBounds::names() {
  static const std::array<const char*, 5> n{"C_a", "C_c", "C_r", "L_J", "L_r"};
  return n;
}

DesignScore score_design(const DesignPoint& dp, const DesignTarget& t) {
  DesignScore s;
  DesignDerived d;
  try {
    d = evaluate_design(dp);
  } catch (const Error&) {
    s.violation = 1e6;
    return s;
  }
  auto band = [&](double v, double target) {
    const double r = std::abs(std::log(v / target));
    const double lim = std::log1p(t.rel_tol);
    return r > lim ? r - lim : 0.0;
  };
  double v = 0.0;
  v += band(d.omega_a / constants::two_pi, t.omega_a_hz);
  v += band(d.E_C_over_h, t.E_C_over_h);
  v += band(d.omega_tilde_r / constants::two_pi, t.omega_r_tilde_hz);
  if (d.chi_over_h < t.chi_min_hz) v += std::log(t.chi_min_hz / std::max(d.chi_over_h, 1e-300));
  const double ratio = d.E_C_over_h / d.E_J_over_h;
  if (ratio > 1.0 / 20.0) v += std::log(20.0 * ratio);
  if (d.breakdown) v += std::log(2.0 * d.g / std::abs(d.omega_r - d.omega_a)) + 1e-6;
  s.violation = v;
  s.margin = d.chi_over_h / t.gamma_hz;
  return s;
}

std::vector<DesignPoint> search(const DesignTarget& t, const DesignBounds& b, const SearchOptions& opt) {
  if (!(t.omega_a_hz > 0 && t.omega_r_tilde_hz > 0 && t.chi_min_hz > 0 && t.gamma_hz > 0 && t.E_C_over_h > 0))
    throw ValueError("design target fields must be positive");
  std::array<double, 5> lo, hi;
  for (int i = 0; i < 5; ++i) {
    const auto [a, c] = b.range[i];
    if (!(a > 0) || !(c >= a)) throw ValueError(std::string("invalid bounds for ") + DesignBounds::names()[i]);
    lo[i] = std::log(a);
    hi[i] = std::log(c);
  }

  auto to_point = [&](const std::vector<double>& x) {
    DesignPoint p;
    double v[5];
    for (int i = 0; i < 5; ++i) v[i] = std::exp(std::clamp(x[i], lo[i], hi[i]));
    p.C_a = v[0];
    p.C_c = v[1];
    p.C_r = v[2];
    p.L_J = v[3];
    p.L_r = v[4];
    return p;
  };
  // Violation dominates; among feasible points a larger margin is better.
  auto objective = [&](const std::vector<double>& x) {
    double out = 0.0;
    for (int i = 0; i < 5; ++i) {
      if (x[i] < lo[i]) out += 1e3 * (lo[i] - x[i]);
      if (x[i] > hi[i]) out += 1e3 * (x[i] - hi[i]);
    }
    const DesignScore s = score_design(to_point(x), t);
    return out + 1e3 * s.violation - std::log(std::max(s.margin, 1e-300)) * 1e-3;
  };

  std::array<int, 5> counts;
  std::size_t total = 1;
  for (int i = 0; i < 5; ++i) {
    const double decades = (hi[i] - lo[i]) / std::log(10.0);
    counts[i] = std::max(1, static_cast<int>(std::ceil(decades * opt.points_per_decade)) + 1);
    if (hi[i] == lo[i]) counts[i] = 1;
    total *= counts[i];
  }
  auto grid_x = [&](std::size_t idx) {
    std::vector<double> x(5);
    for (int i = 4; i >= 0; --i) {
      const int k = static_cast<int>(idx % counts[i]);
      idx /= counts[i];
      x[i] = counts[i] == 1 ? lo[i] : lo[i] + (hi[i] - lo[i]) * k / (counts[i] - 1);
    }
    return x;
  };

  const unsigned jobs = static_cast<unsigned>(std::max(1, opt.jobs));
  const std::vector<double> grid_f = parallel_map(total, jobs, [&](std::size_t i) { return objective(grid_x(i)); });
  std::vector<std::size_t> order(total);
  for (std::size_t i = 0; i < total; ++i) order[i] = i;
  const std::size_t top = std::min<std::size_t>(opt.refine_top, total);
  std::partial_sort(order.begin(), order.begin() + top, order.end(),
                    [&](std::size_t a, std::size_t c) { return grid_f[a] < grid_f[c] || (grid_f[a] == grid_f[c] && a < c); });

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> jitter(-0.25, 0.25);
  std::vector<std::vector<double>> starts;
  std::vector<std::vector<double>> steps;
  for (std::size_t r = 0; r < top; ++r) {
    starts.push_back(grid_x(order[r]));
    std::vector<double> st(5);
    for (int i = 0; i < 5; ++i) {
      const double cell = counts[i] > 1 ? (hi[i] - lo[i]) / (counts[i] - 1) : 0.0;
      st[i] = cell > 0 ? cell * (0.5 + jitter(rng)) : 1e-12;
    }
    steps.push_back(st);
  }

  const bool collapsed = total == 1 && std::all_of(counts.begin(), counts.end(), [](int c) { return c == 1; });
  const std::vector<std::vector<double>> refined = parallel_map(top, jobs, [&](std::size_t r) {
    if (collapsed) return starts[r];
    NelderMeadOptions no;
    no.max_evals = 4000;
    no.ftol = 1e-12;
    no.xtol = 1e-9;
    no.initial_step = steps[r];
    return nelder_mead(objective, starts[r], no).x;
  });

  std::vector<std::pair<DesignScore, DesignPoint>> found;
  double best_violation = std::numeric_limits<double>::infinity();
  double best_margin = 0.0;
  auto consider = [&](const std::vector<double>& x) {
    DesignPoint p = to_point(x);
    const DesignScore s = score_design(p, t);
    if (s.violation < best_violation) {
      best_violation = s.violation;
      best_margin = s.margin;
    }
    if (s.violation == 0.0) {
      p.derived = evaluate_design(p);
      found.emplace_back(s, p);
    }
  };
  for (const auto& x : refined) consider(x);
  for (std::size_t r = 0; r < top; ++r) consider(starts[r]);

  if (found.empty()) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "no design meets the target; best violation %.6g at chi/gamma margin %.6g",
                  best_violation, best_margin);
    throw NoFeasiblePoint(buf);
  }
  std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& c) { return a.first.margin > c.first.margin; });
  std::vector<DesignPoint> out;
  for (const auto& [s, p] : found) {
    bool dup = false;
    for (const auto& q : out)
      if (std::abs(std::log(q.C_a / p.C_a)) + std::abs(std::log(q.C_c / p.C_c)) + std::abs(std::log(q.C_r / p.C_r)) +
              std::abs(std::log(q.L_J / p.L_J)) + std::abs(std::log(q.L_r / p.L_r)) <
          1e-6)
        dup = true;
    if (!dup) out.push_back(p);
    if (static_cast<int>(out.size()) >= opt.max_results) break;
  }
  return out;
}

double thermal_occupation(double f_hz, double T_kelvin) {
  if (!(f_hz > 0) || !(T_kelvin > 0)) throw ValueError("frequency and temperature must be positive");
  return 1.0 / std::expm1(constants::h * f_hz / (constants::k_B * T_kelvin));
}

double thermal_frequency(double T_kelvin) { return constants::k_B * T_kelvin / constants::h; }

double temperature_for_frequency(double f_hz) { return constants::h * f_hz / constants::k_B; }

}  // namespace cqed
