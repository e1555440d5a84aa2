#include "cqed/electromech.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "cqed/constants.hpp"

namespace cqed {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double equilibrium_residual(const DrumSpec& s, double x) {
  return s.k * x - s.V0 * s.V0 * constants::epsilon_0 * s.A / (2.0 * (s.d - x) * (s.d - x));
}

double cap(double v) { return std::isfinite(v) ? std::min(v, kMarginCap) : kMarginCap; }

double ratio_or_cap(double num, double den) { return den > 0 ? cap(num / den) : kMarginCap; }

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

}  // namespace

void DrumSpec::validate() const {
  if (!(k > 0 && m > 0 && A > 0 && d > 0)) throw ValueError("drum k, m, A and d must be positive");
  if (!(V0 >= 0) || !std::isfinite(V0)) throw ValueError("bias voltage must be finite and non-negative");
}

double pull_in_voltage(double k, double A, double d) {
  if (!(k > 0 && A > 0 && d > 0)) throw ValueError("pull-in needs positive k, A, d");
  return std::sqrt(8.0 * k * d * d * d / (27.0 * constants::epsilon_0 * A));
}

double static_solve(const DrumSpec& s) {
  s.validate();
  if (s.V0 == 0.0) return 0.0;
  double lo = 0.0, hi = s.d / 3.0;
  if (equilibrium_residual(s, hi) < 0.0)
    throw PullInError("bias " + fmt("%.6g", s.V0) + " V is at or beyond pull-in " +
                      fmt("%.6g", pull_in_voltage(s)) + " V");
  while (hi - lo > 1e-14 * s.d) {
    const double mid = 0.5 * (lo + hi);
    if (equilibrium_residual(s, mid) < 0.0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

DrumEquivalent equivalent_circuit(const DrumSpec& s) {
  DrumEquivalent e;
  e.V0 = s.V0;
  e.m = s.m;
  e.x0 = static_solve(s);
  e.D = s.d - e.x0;
  e.C_d = constants::epsilon_0 * s.A / e.D;
  e.k_eff = s.k - s.V0 * s.V0 * e.C_d / (e.D * e.D);
  if (!(e.k_eff > 0)) throw PullInError("effective spring constant is not positive");
  e.omega_m_unbiased = std::sqrt(s.k / s.m);
  e.omega_m_biased = std::sqrt(e.k_eff / s.m);
  if (s.V0 == 0.0) {
    e.C_m = 0.0;
    e.L_m = kInf;
    e.Z_m = kInf;
  } else {
    const double q = s.V0 * s.V0 * e.C_d * e.C_d / (e.D * e.D);
    e.C_m = q / e.k_eff;
    e.L_m = s.m / q;
    e.Z_m = std::sqrt(e.L_m / e.C_m);
  }
  return e;
}

std::complex<double> admittance(const DrumEquivalent& eq, double omega) {
  const std::complex<double> j(0.0, 1.0);
  std::complex<double> y = j * omega * eq.C_d;
  if (eq.C_m > 0.0) y += j * omega * eq.C_m / (1.0 - omega * omega * eq.L_m * eq.C_m);
  return y;
}

double bias_for_softening(const DrumSpec& s, double ratio) {
  s.validate();
  if (!(ratio > 0 && ratio <= 1)) throw ValueError("softening ratio must lie in (0, 1]");
  if (ratio == 1.0) return 0.0;
  const double vp = pull_in_voltage(s);
  double lo = 0.0, hi = vp * (1.0 - 1e-12);
  auto r_of = [&](double v) {
    DrumSpec t = s;
    t.V0 = v;
    const DrumEquivalent e = equivalent_circuit(t);
    return e.omega_m_biased / e.omega_m_unbiased;
  };
  if (r_of(hi) > ratio) throw PullInError("requested softening needs a bias beyond pull-in");
  for (int it = 0; it < 200 && hi - lo > 1e-15 * vp; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (r_of(mid) > ratio) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

DrumTransmonCoupling drum_transmon_coupling(const DrumEquivalent& eq, double C_a_prime, double L_J) {
  if (!(C_a_prime >= 0 && L_J > 0)) throw ValueError("C_a' must be non-negative and L_J positive");
  DrumTransmonCoupling c;
  c.C_a = C_a_prime + eq.C_d;
  c.omega_a_bar = 1.0 / std::sqrt(L_J * c.C_a);
  c.E_C_over_h = constants::e * constants::e / (2.0 * c.C_a) / constants::h;
  if (eq.C_m == 0.0) {
    c.C_m_tilde = 0.0;
    c.omega_m_tilde = eq.omega_m_biased;
    c.g = 0.0;
    return c;
  }
  c.C_m_tilde = eq.C_m * c.C_a / (eq.C_m + c.C_a);
  c.omega_m_tilde = 1.0 / std::sqrt(eq.L_m * c.C_m_tilde);
  c.g = 0.5 * std::sqrt(c.omega_m_tilde * c.omega_a_bar) * std::sqrt(c.C_m_tilde / c.C_a);
  return c;
}

double resonant_junction_inductance(const DrumEquivalent& eq, double C_a_prime) {
  if (eq.C_m == 0.0) throw ValueError("unbiased drum has no loaded mechanical mode");
  const double C_a = C_a_prime + eq.C_d;
  const double Cmt = eq.C_m * C_a / (eq.C_m + C_a);
  const double w2 = 1.0 / (eq.L_m * Cmt);
  return 1.0 / (w2 * C_a);
}

GhzBound ghz_dispersive_bound(double omega_a, double omega_m0, double Cp, double Cd,
                              std::optional<double> softening_ratio) {
  if (!(omega_a > 0 && omega_m0 > 0 && Cp >= 0 && Cd > 0)) throw ValueError("invalid GHz-bound inputs");
  const double x3 = std::pow(omega_m0 / omega_a, 3);
  auto value = [&](double s) {
    return 0.1 * x3 * std::sqrt(Cd * Cd * (1 - s) * (1 - s) * (Cd + Cp * s) / std::pow(Cp + Cd, 3));
  };
  GhzBound b;
  b.optimum_s = Cp > 2.0 * Cd ? (Cp - 2.0 * Cd) / (3.0 * Cp) : 0.0;
  b.optimum_chi_over_hbar_omega_a = value(b.optimum_s);
  b.printed_branch_value =
      Cp < 2.0 * Cd ? 0.1 * x3 * std::pow(Cd / (Cp + Cd), 1.5) : 0.1 * x3 * Cd / (15.0 * std::sqrt(3.0) * Cp);
  if (softening_ratio) {
    const double r = *softening_ratio;
    if (!(r >= 0 && r <= 1)) throw ValueError("softening ratio must lie in [0, 1]");
    b.softening_s = r * r;
  } else {
    b.softening_s = b.optimum_s;
  }
  b.chi_over_hbar_omega_a = value(b.softening_s);
  b.q_lower = 10.0 * std::pow(omega_a / omega_m0, 3);
  b.required_Q = b.chi_over_hbar_omega_a > 0 ? 10.0 / b.chi_over_hbar_omega_a : kInf;
  return b;
}

double minimum_mechanical_frequency(double f_a_hz, double Q_a, double Cp, double Cd,
                                    std::optional<double> softening_ratio, double factor) {
  if (!(f_a_hz > 0 && Q_a > 0 && factor > 0)) throw ValueError("invalid frequency, quality factor or factor");
  // chi/(hbar omega_a) scales as (f_m/f_a)^3; evaluate the prefactor at f_m = f_a.
  const GhzBound unit = ghz_dispersive_bound(1.0, 1.0, Cp, Cd, softening_ratio);
  if (!(unit.chi_over_hbar_omega_a > 0)) throw ValueError("cross-Kerr vanishes for this softening");
  return f_a_hz * std::cbrt(factor / (Q_a * unit.chi_over_hbar_omega_a));
}

std::string to_string(RegimeCase c) {
  switch (c) {
    case RegimeCase::TwoBodyAnharmonic: return "TwoBody-A>>g";
    case RegimeCase::TwoBodyCoupling: return "TwoBody-g>>A";
    case RegimeCase::ThreeBodyAGChi: return "ThreeBody-A>>g>>chi";
    case RegimeCase::ThreeBodyAChiG: return "ThreeBody-A,chi>>g";
    case RegimeCase::ThreeBodyGChiA: return "ThreeBody-g>>chi>>A";
    case RegimeCase::ThreeBodyChiGA: return "ThreeBody-chi>>g>>A";
    case RegimeCase::GHzDispersive: return "GHzDispersive";
  }
  return "unknown";
}

namespace {

// Three-body case from the ordering of (A_L, g, chi); nullopt when uncovered.
std::optional<RegimeCase> three_body_case(double A, double g, double chi) {
  if (A >= g && g >= chi) return RegimeCase::ThreeBodyAGChi;
  if (A >= g && chi >= g) return RegimeCase::ThreeBodyAChiG;
  if (g >= chi && chi >= A) return RegimeCase::ThreeBodyGChiA;
  if (chi >= g && g >= A) return RegimeCase::ThreeBodyChiGA;
  return std::nullopt;
}

double three_body_factor(RegimeCase c) {
  switch (c) {
    case RegimeCase::ThreeBodyAGChi: return 15.0;
    case RegimeCase::ThreeBodyAChiG: return 2.0;
    case RegimeCase::ThreeBodyGChiA: return 3.0;
    case RegimeCase::ThreeBodyChiGA: return 1.0;
    default: return 0.0;
  }
}

bool close(double a, double b) { return a > 0 && b > 0 && std::max(a, b) < 2.0 * std::min(a, b); }

}  // namespace

RegimeReport classify_regime(const RegimeInputs& in) {
  for (double v : {in.A_L, in.chi, in.g, in.A_H, in.gamma_L, in.gamma_H, in.n_th, in.omega_L, in.omega_m})
    if (!(v >= 0) || !std::isfinite(v)) throw ValueError("regime inputs must be finite and non-negative");

  RegimeReport r;
  if (in.A_L == 0.0 && in.g == 0.0) {
    if (!(in.chi > 0)) throw RegimeError("no coupling scale is non-zero");
    r.tag = RegimeCase::GHzDispersive;
    r.factor = 1.0;
    r.margin = ratio_or_cap(in.chi, in.gamma_H);
    r.inequality = "gamma_H << chi";
  } else if (in.chi == 0.0) {
    if (close(in.A_L, in.g))
      throw AmbiguousRegime("A_L and g are within a factor 2",
                            {to_string(RegimeCase::TwoBodyAnharmonic), to_string(RegimeCase::TwoBodyCoupling)});
    const bool anh = in.A_L > in.g;
    r.tag = anh ? RegimeCase::TwoBodyAnharmonic : RegimeCase::TwoBodyCoupling;
    r.factor = anh ? 4.0 : 8.0;
    r.margin = ratio_or_cap(std::min(in.g, in.A_L), r.factor * in.gamma_L * in.n_th);
    r.inequality = anh ? "4 gamma_L n_th << g, A_L" : "8 gamma_L n_th << g, A_L";
  } else {
    const auto c = three_body_case(in.A_L, in.g, in.chi);
    // Near-equal scales: collect the cases reachable by swapping them.
    std::vector<std::string> cand;
    auto add = [&](std::optional<RegimeCase> k) {
      const std::string s = k ? to_string(*k) : "uncovered ordering";
      if (std::find(cand.begin(), cand.end(), s) == cand.end()) cand.push_back(s);
    };
    add(c);
    if (close(in.A_L, in.g)) add(three_body_case(in.g, in.A_L, in.chi));
    if (close(in.g, in.chi)) add(three_body_case(in.A_L, in.chi, in.g));
    if (close(in.A_L, in.chi)) add(three_body_case(in.chi, in.g, in.A_L));
    if (cand.size() > 1) throw AmbiguousRegime("two of A_L, g, chi are within a factor 2", cand);
    if (!c) throw RegimeError("ordering g >> A_L >> chi is not covered by the phonon-resolution analysis");

    r.tag = *c;
    r.factor = three_body_factor(*c);
    const double Gamma = in.gamma_H + 4.0 * in.gamma_L * in.n_th;
    double m = ratio_or_cap(std::min(in.chi, in.g), r.factor * Gamma);
    const double top = std::max(in.chi, in.g);
    if (in.omega_m > 0) m = std::min(m, ratio_or_cap(in.omega_m, top));
    else r.warnings.push_back("omega_m not given; frequency bound skipped");
    if (in.omega_L > 0) m = std::min(m, ratio_or_cap(in.omega_L, top));
    else r.warnings.push_back("omega_L not given; frequency bound skipped");
    r.margin = m;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%g (gamma_H + 4 gamma_L n_th) << chi, g << omega_m, omega_L", r.factor);
    r.inequality = buf;
    if (in.A_H > 0 && in.A_L > 0) {
      const double ref = 2.0 * std::sqrt(in.A_H * in.A_L);
      if (std::abs(in.chi - ref) > 0.1 * in.chi) r.warnings.push_back("chi differs from 2 sqrt(A_H A_L) by more than 10%");
    }
  }
  r.pass = r.margin >= 10.0;
  return r;
}

DressedShifts dressed_shifts(double g, double Delta, double chi, int n) {
  if (n < 1) throw ValueError("n must be at least 1");
  const double two_theta = Delta == 0.0 ? -constants::pi / 2.0 * (g > 0 ? 1.0 : 0.0)
                                        : std::atan(-2.0 * g * std::sqrt(static_cast<double>(n)) / Delta);
  const double c = std::cos(0.5 * two_theta);
  const double s = std::sin(0.5 * two_theta);
  return {chi * c * c, chi * s * s};
}

HybridizationSplit hybridization_split(double g, double Delta, double chi) {
  if (!(g >= 0)) throw ValueError("g must be non-negative");
  HybridizationSplit h;
  const double ad = std::abs(Delta);
  const double s = std::sqrt(Delta * Delta + 4.0 * g * g);
  const double den = std::sqrt(8.0 * g * g + 2.0 * ad * (ad + s));
  if (den == 0.0) {
    h.f = 1.0;
    h.h = 0.0;
  } else {
    h.f = (ad + s) / den;
    h.h = (Delta < 0 ? -2.0 : 2.0) * g / den;
  }
  h.chi_L = chi * h.f * h.f;
  h.chi_m = chi * h.h * h.h;
  h.offset_plus = 0.5 * (Delta + s);
  h.offset_minus = 0.5 * (Delta - s);
  return h;
}

void FeasibilityParams::validate() const {
  if (!(m > 0 && f_m > 0 && Q_m > 0 && T > 0 && A_mass > 0 && R0 > 0))
    throw ValueError("feasibility inputs m, f_m, Q_m, T, A, R0 must be positive");
  if (n < 0) throw ValueError("phonon number must be non-negative");
  if (!(R_body >= 0)) throw ValueError("body radius must be non-negative");
}

FeasibilityReport feasibility(const FeasibilityParams& p) {
  p.validate();
  using namespace constants;
  FeasibilityReport r;
  const double w = two_pi * p.f_m;
  const int mult = p.kind == StateKind::Fock ? 2 : 4;
  r.x_zpf = std::sqrt(hbar / (2.0 * w * p.m));
  r.delta_x = std::sqrt(mult * p.n + 1.0) * r.x_zpf;
  r.a = std::cbrt(p.A_mass) * p.R0;
  r.n_th = 1.0 / std::expm1(h * p.f_m / (k_B * p.T));
  r.gamma_m = w / p.Q_m;
  const double n = p.n;
  if (p.kind == StateKind::Fock) {
    r.t_coh = 1.0 / ((r.n_th + 1.0) * n * r.gamma_m + r.n_th * (n + 1.0) * r.gamma_m);
  } else {
    r.t_coh = n > 0 ? 1.0 / (2.0 * (2.0 * r.n_th + 1.0) * n * r.gamma_m) : kInf;
  }
  r.t_coh_high_T = p.Q_m / (mult * n + 1.0) * hbar / (k_B * p.T);

  const double m_a = p.A_mass * m_u;
  const double dE = 2.0 * G * m_a * m_a * (6.0 / (5.0 * r.a) - 1.0 / std::max(r.delta_x, 2.0 * r.a));
  r.t_G = hbar / ((p.m / m_a) * dE);
  if (p.R_body > 0) {
    r.t_K = std::cbrt(hbar * std::pow(p.R_body, 4) / (G * G)) / p.m;
    r.t_P = 5.0 * hbar * p.R_body / (12.0 * G * p.m * p.m);
  }

  r.condition_low = p.f_m * 2e5;
  r.condition_mid = (mult * n + 1.0) / p.m;
  r.condition_high = p.Q_m * 1e4;
  r.analytic_low = p.f_m * 8.0 * r.a * r.a / h;
  r.analytic_high = p.Q_m * 2.0 * std::pow(p.A_mass, 2.0 / 3.0) * G * m_u / (k_B * p.T * p.R0);
  r.condition_pass = 10.0 * r.condition_low <= r.condition_mid && 10.0 * r.condition_mid <= r.condition_high;
  r.gravity_faster = r.t_G < r.t_coh;
  return r;
}

}  // namespace cqed
