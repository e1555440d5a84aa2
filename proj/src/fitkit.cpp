#include "cqed/fitkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "cqed/circuit_model.hpp"
#include "cqed/constants.hpp"
#include "cqed/nelder_mead.hpp"
#include "cqed/parallel.hpp"
#include "cqed/quantizer.hpp"
#include "cqed/rabi.hpp"

namespace cqed {

namespace {

constexpr double kAlphaLo = 0.9, kAlphaHi = 1.1;

bool is_log_param(const std::string& n) { return n == "omega_0" || n == "C_c" || n == "C_a" || n == "E_J"; }

int alpha_index(const std::string& n) {
  if (n.rfind("alpha_", 0) != 0) return -1;
  try {
    std::size_t pos = 0;
    const int k = std::stoi(n.substr(6), &pos);
    if (pos != n.size() - 6) return -1;
    return k;
  } catch (const std::exception&) {
    return -1;
  }
}

BasisLabel parse_label(const std::string& s, const FitModel& model) {
  if (s.size() < 2 || (s[0] != 'c' && s[0] != 'q')) throw ValueError("unknown transition label '" + s + "'");
  int k = 0;
  try {
    std::size_t pos = 0;
    k = std::stoi(s.substr(1), &pos);
    if (pos != s.size() - 1) throw ValueError("unknown transition label '" + s + "'");
  } catch (const std::invalid_argument&) {
    throw ValueError("unknown transition label '" + s + "'");
  }
  BasisLabel l;
  l.n.assign(model.modes + 1, 0);
  if (s[0] == 'c') {
    if (k < 0 || k >= model.modes || model.photon_caps[k] < 2)
      throw ValueError("label '" + s + "' is outside the model's modes");
    l.n[k + 1] = 1;
  } else {
    if (k < 1 || k >= model.N_q) throw ValueError("label '" + s + "' is outside the retained transmon levels");
    l.n[0] = k;
  }
  return l;
}

// Resonator values chosen so the loaded fundamental equals omega_0, then
// higher modes replaced by the corrected ladder.
QuantizedSystem build_system(const FitParameters& p, const FitModel& model) {
  if (!(p.omega_0_hz > 0 && p.C_c > 0 && p.C_a > 0 && p.E_J_max_over_h > 0))
    throw ValueError("fit parameters must be positive");
  const double w0 = constants::two_pi * p.omega_0_hz;
  ReducedCircuit rc;
  rc.C_a = p.C_a;
  rc.C_c = p.C_c;
  rc.E_J_max_over_h = p.E_J_max_over_h;
  rc.d = p.d;
  rc.N_env = p.N_env;
  double wc = w0;
  QuantizedSystem qs;
  for (int it = 0; it < 100; ++it) {
    rc.C_r = constants::pi / (4.0 * wc * model.Z_c);
    rc.L_0 = 4.0 * model.Z_c / (constants::pi * wc);
    qs = quantize(rc, model.modes);
    const double r = w0 / qs.omega_m[0];
    wc *= r;
    if (std::abs(r - 1.0) < 1e-15) break;
  }
  for (int m = 0; m < model.modes; ++m) {
    const double w = constants::two_pi * apply_mode_corrections(p, m + 1);
    qs.omega_m[m] = w;
    qs.Z_m[m] = 1.0 / (w * qs.C_tilde_r);
    qs.q_zpf_m[m] = std::sqrt(constants::hbar / (2.0 * qs.Z_m[m]));
  }
  for (int m = 0; m < model.modes; ++m) {
    qs.g_m[m] = qs.q_zpf_m[m] * qs.q_zpf_a * qs.inv_cap_transmon_mode / constants::hbar;
    for (int k = 0; k < model.modes; ++k)
      if (k != m) qs.G(m, k) = qs.inv_cap_mode_mode * qs.q_zpf_m[m] * qs.q_zpf_m[k] / constants::hbar;
  }
  return qs;
}

struct Param {
  std::string name;
  bool log = false;
};

}  // namespace

std::vector<std::string> FitParameters::names() const {
  std::vector<std::string> n{"omega_0", "C_c", "C_a", "N_env", "E_J", "d"};
  for (std::size_t k = 1; k < alpha.size(); ++k) n.push_back("alpha_" + std::to_string(k));
  return n;
}

double FitParameters::get(const std::string& n) const {
  if (n == "omega_0") return omega_0_hz;
  if (n == "C_c") return C_c;
  if (n == "C_a") return C_a;
  if (n == "N_env") return N_env;
  if (n == "E_J") return E_J_max_over_h;
  if (n == "d") return d;
  const int k = alpha_index(n);
  if (k >= 1) return k < static_cast<int>(alpha.size()) ? alpha[k] : 1.0;
  throw ValueError("unknown fit parameter '" + n + "'");
}

void FitParameters::set(const std::string& n, double v) {
  if (n == "omega_0") omega_0_hz = v;
  else if (n == "C_c") C_c = v;
  else if (n == "C_a") C_a = v;
  else if (n == "N_env") N_env = v;
  else if (n == "E_J") E_J_max_over_h = v;
  else if (n == "d") d = v;
  else {
    const int k = alpha_index(n);
    if (k < 1) throw ValueError("unknown fit parameter '" + n + "'");
    if (static_cast<int>(alpha.size()) <= k) alpha.resize(k + 1, 1.0);
    alpha[k] = v;
  }
}

void FitModel::validate() const {
  if (modes < 1) throw ValueError("fit model needs at least one mode");
  if (static_cast<int>(photon_caps.size()) != modes) throw DimensionMismatch("photon caps must list one cap per mode");
  if (!(Z_c > 0)) throw ValueError("Z_c must be positive");
  if (N_q < 2) throw ValueError("N_q must be at least 2");
}

double apply_mode_corrections(const FitParameters& p, int m, std::vector<std::string>* warnings) {
  if (m < 1) throw ValueError("mode number m must be >= 1");
  double a = (m >= 2 && m - 1 < static_cast<int>(p.alpha.size())) ? p.alpha[m - 1] : 1.0;
  if (a < kAlphaLo || a > kAlphaHi) {
    const double c = std::clamp(a, kAlphaLo, kAlphaHi);
    if (warnings) {
      char buf[120];
      std::snprintf(buf, sizeof buf, "alpha_%d = %.6g outside [0.9, 1.1], clamped to %.6g", m - 1, a, c);
      warnings->push_back(buf);
    }
    a = c;
  }
  return a * (2.0 * m - 1.0) * p.omega_0_hz;
}

double fit_charging_energy(const FitParameters& p, const FitModel& model) {
  model.validate();
  return build_system(p, model).E_C_over_h;
}

std::vector<double> model_transitions(const FitParameters& p, const FitModel& model, double flux_ratio,
                                      const std::vector<std::string>& labels) {
  model.validate();
  std::vector<BasisLabel> bare;
  for (const auto& l : labels) bare.push_back(parse_label(l, model));
  const QuantizedSystem qs = build_system(p, model);
  const CpbSpectrum cpb = cpb_diagonalize(qs.E_C_over_h, p.E_J_max_over_h, p.d, flux_ratio, p.N_env, model.N_max, model.N_q);
  TruncationSpec t;
  t.N_q = model.N_q;
  t.photon_caps = model.photon_caps;
  const SparseHermitian H = assemble(qs, cpb, t);
  const HamiltonianModel hm = diagonalize(H, static_cast<int>(H.rows()), t.dims());
  std::vector<double> out;
  for (const auto& b : bare) out.push_back(hm.transition_hz(b));
  return out;
}

FluxSweepData synthesize_sweep(const FitParameters& truth, const FitModel& model, const SynthesisOptions& opt) {
  const auto per_flux = parallel_map(opt.flux.size(), opt.jobs, [&](std::size_t i) {
    return model_transitions(truth, model, opt.flux[i], opt.labels);
  });
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  FluxSweepData data;
  for (std::size_t i = 0; i < opt.flux.size(); ++i)
    for (std::size_t k = 0; k < opt.labels.size(); ++k) {
      FluxPoint r;
      r.flux_ratio = opt.flux[i];
      r.label = opt.labels[k];
      r.f_hz = per_flux[i][k] + (opt.noise_hz > 0 ? opt.noise_hz * noise(rng) : 0.0);
      data.push_back(r);
    }
  return data;
}

namespace {

// Residuals (model - data) per row, computed once per distinct flux value.
std::vector<double> residuals(const FluxSweepData& data, const FitParameters& p, const FitModel& model, unsigned jobs) {
  std::map<double, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < data.size(); ++i) groups[data[i].flux_ratio].push_back(i);
  std::vector<std::pair<double, std::vector<std::size_t>>> g(groups.begin(), groups.end());
  const auto vals = parallel_map(g.size(), jobs, [&](std::size_t k) {
    std::vector<std::string> labels;
    for (std::size_t i : g[k].second) labels.push_back(data[i].label);
    return model_transitions(p, model, g[k].first, labels);
  });
  std::vector<double> r(data.size());
  for (std::size_t k = 0; k < g.size(); ++k)
    for (std::size_t j = 0; j < g[k].second.size(); ++j) {
      const std::size_t i = g[k].second[j];
      r[i] = vals[k][j] - data[i].f_hz;
    }
  return r;
}

// Sum in a canonical row order so the value does not depend on input order.
double weighted_sse(const FluxSweepData& data, const std::vector<double>& r) {
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = data[a];
    const auto& y = data[b];
    if (x.flux_ratio != y.flux_ratio) return x.flux_ratio < y.flux_ratio;
    if (x.label != y.label) return x.label < y.label;
    if (x.f_hz != y.f_hz) return x.f_hz < y.f_hz;
    return x.weight < y.weight;
  });
  double s = 0.0;
  for (std::size_t i : order) s += data[i].weight * r[i] * r[i];
  return s;
}

void check_data(const FluxSweepData& data) {
  for (const auto& r : data) {
    if (!(r.f_hz > 0)) throw ValueError("data frequencies must be positive");
    if (!(r.weight >= 0)) throw ValueError("data weights must be non-negative");
    if (!std::isfinite(r.flux_ratio)) throw ValueError("flux values must be finite");
  }
}

}  // namespace

double fit_objective(const FluxSweepData& data, const FitParameters& p, const FitModel& model, unsigned jobs) {
  check_data(data);
  return weighted_sse(data, residuals(data, p, model, jobs));
}

FitResult fit(const FluxSweepData& data, const FitParameters& init, const FitOptions& opt) {
  opt.model.validate();
  check_data(data);
  for (const auto& l : data) parse_label(l.label, opt.model);

  FitParameters base = init;
  if (static_cast<int>(base.alpha.size()) < opt.model.modes) base.alpha.resize(opt.model.modes, 1.0);
  if (!base.alpha.empty()) base.alpha[0] = 1.0;

  const auto all = base.names();
  for (const auto& n : opt.fixed)
    if (std::find(all.begin(), all.end(), n) == all.end()) throw ValueError("unknown fixed parameter '" + n + "'");
  std::vector<Param> free;
  for (const auto& n : all) {
    const bool alpha = alpha_index(n) >= 1;
    const bool fixed = opt.fixed.count(n) || (alpha && !opt.release.count(n));
    if (!fixed) free.push_back({n, is_log_param(n)});
  }
  if (free.empty()) throw ValueError("no free parameters");
  if (data.size() < free.size()) throw ValueError("fewer data rows than free parameters");

  auto encode = [&](const FitParameters& p) {
    std::vector<double> x;
    for (const auto& f : free) x.push_back(f.log ? std::log(p.get(f.name)) : p.get(f.name));
    return x;
  };
  auto decode = [&](const std::vector<double>& x) {
    FitParameters p = base;
    for (std::size_t i = 0; i < free.size(); ++i) {
      double v = free[i].log ? std::exp(x[i]) : x[i];
      if (free[i].name == "d") v = std::clamp(v, 0.0, 1.0);
      p.set(free[i].name, v);
    }
    return p;
  };
  auto objective = [&](const std::vector<double>& x) {
    try {
      return weighted_sse(data, residuals(data, decode(x), opt.model, 1));
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<std::vector<double>> starts{encode(base)};
  for (int s = 1; s < opt.starts; ++s) {
    std::vector<double> x = starts[0];
    for (std::size_t i = 0; i < free.size(); ++i) x[i] += opt.jitter * nd(rng);
    starts.push_back(x);
  }
  NelderMeadOptions no;
  no.max_evals = opt.max_evals;
  no.ftol = opt.ftol;
  no.xtol = 1e-9;
  no.initial_step.assign(free.size(), opt.jitter);
  const auto runs = parallel_map(starts.size(), opt.jobs, [&](std::size_t s) { return nelder_mead(objective, starts[s], no); });

  std::size_t best = 0;
  int evals = 0;
  for (std::size_t s = 0; s < runs.size(); ++s) {
    evals += runs[s].evals;
    if (runs[s].f < runs[best].f) best = s;
  }
  NelderMeadOptions polish = no;
  polish.initial_step.assign(free.size(), opt.jitter / 10);
  const NelderMeadResult fin = nelder_mead(objective, runs[best].x, polish);
  evals += fin.evals;
  const NelderMeadResult& use = fin.f <= runs[best].f ? fin : runs[best];

  FitResult res;
  res.params = decode(use.x);
  for (const auto& f : free) res.free.push_back(f.name);
  res.evals = evals;
  res.converged = fin.converged || runs[best].converged;
  res.residuals_hz = residuals(data, res.params, opt.model, opt.jobs);
  res.objective = weighted_sse(data, res.residuals_hz);
  double wsum = 0.0;
  for (const auto& r : data) wsum += r.weight;
  res.rms_hz = wsum > 0 ? std::sqrt(res.objective / wsum) : 0.0;
  for (int m = 1; m <= opt.model.modes; ++m) apply_mode_corrections(res.params, m, &res.warnings);

  // Covariance s^2 (J^T W J)^+ from central differences in natural units.
  const std::size_t n = data.size(), p = free.size();
  Eigen::MatrixXd J(n, p);
  Eigen::VectorXd scale(p);
  for (std::size_t k = 0; k < p; ++k) {
    const double v = res.params.get(free[k].name);
    const double h = v != 0.0 ? 1e-4 * std::abs(v) : 1e-4;
    FitParameters a = res.params, b = res.params;
    a.set(free[k].name, v + h);
    b.set(free[k].name, v - h);
    std::vector<double> ra, rb;
    try {
      ra = residuals(data, a, opt.model, opt.jobs);
      rb = residuals(data, b, opt.model, opt.jobs);
    } catch (const Error& e) {
      res.warnings.push_back(std::string("covariance step failed: ") + e.what());
      ra.assign(n, 0.0);
      rb.assign(n, 0.0);
    }
    // Columns in relative units keep the pseudo-inverse threshold meaningful.
    scale(k) = v != 0.0 ? std::abs(v) : 1.0;
    for (std::size_t i = 0; i < n; ++i) J(i, k) = std::sqrt(data[i].weight) * (ra[i] - rb[i]) / (2 * h) * scale(k);
  }
  const double dof = n > p ? static_cast<double>(n - p) : 1.0;
  const Eigen::MatrixXd JtJ = J.transpose() * J;
  res.covariance = (res.objective / dof) * scale.asDiagonal() *
                   JtJ.completeOrthogonalDecomposition().pseudoInverse() * scale.asDiagonal();

  if (!res.converged) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "simplex did not converge within %d evaluations; best rms %.6g Hz", opt.max_evals,
                  res.rms_hz);
    throw FitNonConvergence(buf, res);
  }
  return res;
}

FluxCalibration calibrate_flux(const std::vector<double>& I, const std::vector<double>& f, bool sweet_spot_at_minimum) {
  if (I.size() != f.size()) throw DimensionMismatch("current and frequency columns differ in length");
  const std::size_t n = I.size();
  if (n < 4) throw PeriodNotFound("need at least four points");
  const auto [lo_it, hi_it] = std::minmax_element(I.begin(), I.end());
  const double lo = *lo_it, span = *hi_it - lo;
  if (!(span > 0)) throw PeriodNotFound("current sweep has zero span");
  const double mean = std::accumulate(f.begin(), f.end(), 0.0) / n;
  double sst = 0.0;
  for (double v : f) sst += (v - mean) * (v - mean);
  if (sst <= 1e-24 * n * std::max(1.0, mean * mean)) throw PeriodNotFound("trace is constant");

  struct Fit {
    double power, a, b;
  };
  // Least-squares c0 + a cos + b sin at frequency nu; power is the variance explained.
  auto lsq = [&](double nu) {
    Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
    Eigen::Vector3d y = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
      const double ph = constants::two_pi * nu * (I[i] - lo);
      const Eigen::Vector3d r(1.0, std::cos(ph), std::sin(ph));
      A += r * r.transpose();
      y += r * (f[i] - mean);
    }
    const Eigen::Vector3d c = A.ldlt().solve(y);
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ph = constants::two_pi * nu * (I[i] - lo);
      const double e = f[i] - mean - c(0) - c(1) * std::cos(ph) - c(2) * std::sin(ph);
      ssr += e * e;
    }
    return Fit{sst - ssr, c(1), c(2)};
  };

  const double nu_lo = 1.0 / span;
  const double nu_hi = std::max(nu_lo, (n - 1) / (2.0 * span));
  const double step = 1.0 / (16.0 * span);
  double best_nu = nu_lo, best_p = -1.0;
  for (double nu = nu_lo; nu <= nu_hi + 0.5 * step; nu += step) {
    const double p = lsq(nu).power;
    if (p > best_p) {
      best_p = p;
      best_nu = nu;
    }
  }
  double a = std::max(nu_lo, best_nu - step), b = std::min(nu_hi, best_nu + step);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = lsq(x1).power, f2 = lsq(x2).power;
  for (int it = 0; it < 100 && b - a > 1e-12 * best_nu; ++it) {
    if (f1 > f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = lsq(x1).power;
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = lsq(x2).power;
    }
  }
  const double nu = 0.5 * (a + b);
  const Fit fit = lsq(nu);
  if (fit.power < 0.05 * sst) throw PeriodNotFound("no dominant periodic component in the trace");

  FluxCalibration c;
  c.period = 1.0 / nu;
  double off = std::atan2(fit.b, fit.a) / (constants::two_pi * nu);
  if (sweet_spot_at_minimum) off += 0.5 * c.period;
  off = std::fmod(off, c.period);
  if (off < 0) off += c.period;
  c.offset = lo + off;
  return c;
}

}  // namespace cqed
