#include <unsupported/Eigen/Polynomials>

#include <algorithm>
#include <cmath>

#include "cqed/constants.hpp"
#include "cqed/designer.hpp"
#include "cqed/electromech.hpp"
#include "cqed/errors.hpp"
#include "doctest.h"
#include "gen.hpp"

using namespace cqed;

namespace {

constexpr double kTwoPi = constants::two_pi;

DrumSpec drum(double V0 = 0.0) {
  DrumSpec s;
  s.m = 1e-13;
  s.k = s.m * std::pow(kTwoPi * 1e7, 2);
  s.A = constants::pi * 15e-6 * 15e-6;
  s.d = 50e-9;
  s.V0 = V0;
  return s;
}

// Smallest real root in [0, d) of k x (d - x)^2 = V0^2 eps0 A / 2.
double cubic_root(const DrumSpec& s) {
  const double c = s.V0 * s.V0 * constants::epsilon_0 * s.A / 2.0;
  Eigen::Vector4d p(-c / (s.k * s.d * s.d * s.d), 1.0, -2.0, 1.0);  // in u = x / d
  Eigen::PolynomialSolver<double, 3> solver(p);
  double best = 1.0;
  for (int i = 0; i < 3; ++i) {
    const auto r = solver.roots()[i];
    if (std::abs(r.imag()) < 1e-9 && r.real() >= -1e-12 && r.real() < best) best = r.real();
  }
  return best * s.d;
}

}  // namespace

TEST_CASE("static equilibrium") {
  CHECK(static_solve(drum(0.0)) == 0.0);
  const DrumSpec base = drum();
  const double vp = pull_in_voltage(base);
  for (double frac : {0.1, 0.5, 0.9, 0.99}) {
    const DrumSpec s = drum(frac * vp);
    const double x = static_solve(s);
    CAPTURE(frac);
    CHECK(x < s.d / 3.0);
    CHECK(std::abs(x - cubic_root(s)) < 1e-9 * s.d);
    const double res = s.k * x - s.V0 * s.V0 * constants::epsilon_0 * s.A / (2.0 * (s.d - x) * (s.d - x));
    CHECK(std::abs(res) < 1e-12 * s.k * s.d);
  }
  CHECK(static_solve(drum(0.99 * vp)) > 0.25 * base.d);
  CHECK_THROWS_AS(static_solve(drum(1.01 * vp)), PullInError);
  DrumSpec bad = base;
  bad.k = -1.0;
  CHECK_THROWS_AS(static_solve(bad), ValueError);
}

TEST_CASE("pull-in scaling") {
  const DrumSpec s = drum();
  const double v = pull_in_voltage(s);
  CHECK(rel_err(pull_in_voltage(s.k, s.A, 2.0 * s.d) / v, std::pow(2.0, 1.5)) < 1e-12);
  CHECK(rel_err(pull_in_voltage(4.0 * s.k, s.A, s.d) / v, 2.0) < 1e-12);
  // Just below pull-in the spring has nearly vanished.
  DrumSpec t = drum(v * (1.0 - 1e-13));
  const double x = static_solve(t);
  const double D = t.d - x;
  const double k_eff = t.k - t.V0 * t.V0 * constants::epsilon_0 * t.A / (D * D * D);
  CHECK(k_eff < 1e-6 * t.k);
}

TEST_CASE("equivalent circuit") {
  const DrumEquivalent e0 = equivalent_circuit(drum(0.0));
  CHECK(e0.C_m == 0.0);
  CHECK(std::isinf(e0.L_m));
  const std::complex<double> y0 = admittance(e0, kTwoPi * 3e7);
  CHECK(y0.imag() == doctest::Approx(kTwoPi * 3e7 * e0.C_d).epsilon(1e-14));

  const double vp = pull_in_voltage(drum());
  double prev_k = drum().k * 2.0;
  for (int i = 0; i <= 40; ++i) {
    const double V = vp * 0.98 * i / 40.0;
    const DrumSpec s = drum(V);
    const DrumEquivalent e = equivalent_circuit(s);
    CAPTURE(V);
    CHECK(e.k_eff < prev_k);
    prev_k = e.k_eff;
    if (V == 0.0) continue;
    CHECK(rel_err(1.0 / std::sqrt(e.L_m * e.C_m), std::sqrt(e.k_eff / e.m)) < 1e-12);
    for (int j = 0; j < 20; ++j) {
      const double w = kTwoPi * (1e5 + j * 1.1e6);
      const std::complex<double> jw(0.0, w);
      const std::complex<double> mech = jw * (V * V * e.C_d * e.C_d / (e.D * e.D)) / (e.k_eff - w * w * s.m);
      const std::complex<double> direct = jw * e.C_d + mech;
      // Relative to the term sizes: the two branches cancel at the antiresonance.
      CHECK(std::abs(admittance(e, w) - direct) < 1e-10 * (w * e.C_d + std::abs(mech)));
    }
  }
}

TEST_CASE("softening identity") {
  const DrumSpec s = drum();
  DrumSpec b = s;
  b.V0 = bias_for_softening(s, 0.9);
  const DrumEquivalent e = equivalent_circuit(b);
  CHECK(rel_err(e.omega_m_biased / e.omega_m_unbiased, 0.9) < 1e-10);
  CHECK(std::abs(e.C_m / e.C_d - (1.0 / 0.81 - 1.0)) < 1e-9);
  CHECK(std::abs(e.C_m / e.C_d - 0.2346) < 1e-4);
  CHECK(bias_for_softening(s, 1.0) == 0.0);
  CHECK_THROWS_AS(bias_for_softening(s, 0.0), ValueError);
}

TEST_CASE("drum-transmon coupling") {
  const DrumEquivalent e0 = equivalent_circuit(drum(0.0));
  CHECK(drum_transmon_coupling(e0, 1e-13, 1e-8).g == 0.0);

  DrumSpec s = drum();
  s.V0 = bias_for_softening(s, 0.9);
  const DrumEquivalent e = equivalent_circuit(s);
  const double Cp = 1000.0 * e.C_d;
  const double L_J = resonant_junction_inductance(e, Cp);
  const DrumTransmonCoupling c = drum_transmon_coupling(e, Cp, L_J);
  CHECK(rel_err(c.omega_a_bar, c.omega_m_tilde) < 1e-12);
  const double approx = 0.5 * std::sqrt(c.omega_m_tilde * c.omega_a_bar) * std::sqrt((e.C_d / Cp) * (1.0 / 0.81 - 1.0));
  CHECK(rel_err(c.g, approx) < 0.005);
  CHECK_THROWS_AS(resonant_junction_inductance(e0, Cp), ValueError);
}

TEST_CASE("GHz dispersive bound") {
  const double C_d = 1e-15;
  const GhzBound lim = ghz_dispersive_bound(1.0, 1.0, 0.0, C_d, 0.0);
  CHECK(lim.chi_over_hbar_omega_a == doctest::Approx(0.1).epsilon(1e-14));
  const GhzBound opt = ghz_dispersive_bound(1.0, 1.0, 0.0, C_d);
  CHECK(opt.optimum_s == 0.0);
  CHECK(opt.printed_branch_value == doctest::Approx(0.1).epsilon(1e-14));
  // Large stray capacitance: optimum moves to positive softening.
  const GhzBound big = ghz_dispersive_bound(1.0, 1.0, 10.0 * C_d, C_d);
  CHECK(big.optimum_s == doctest::Approx(8.0 / 30.0).epsilon(1e-14));
  for (double s : {0.0, 0.1, 0.5, 0.9})
    CHECK(ghz_dispersive_bound(1.0, 1.0, 10.0 * C_d, C_d, std::sqrt(s)).chi_over_hbar_omega_a <=
          big.optimum_chi_over_hbar_omega_a * (1.0 + 1e-14));

  const double f_min = minimum_mechanical_frequency(1e9, 1e6, 0.0, C_d);
  const GhzBound at = ghz_dispersive_bound(kTwoPi * 1e9, kTwoPi * f_min, 0.0, C_d);
  CHECK(rel_err(at.required_Q, 1e6) < 1e-10);
  CHECK(minimum_mechanical_frequency(1e9, 1e6, 0.0, C_d, 0.9) > f_min);
  CHECK_THROWS_AS(minimum_mechanical_frequency(1e9, 1e6, 0.0, C_d, 1.0), ValueError);
}

TEST_CASE("regime classification") {
  RegimeInputs in;
  in.chi = 15e6;
  in.g = 2e6;
  in.A_L = 0.1e6;
  in.gamma_H = 0.5e6 / 40.0;
  in.gamma_L = 1e3;
  in.omega_L = 100e6;
  in.omega_m = 100e6;
  in.n_th = thermal_occupation(100e6, 20e-3);
  const RegimeReport r = classify_regime(in);
  CHECK(r.tag == RegimeCase::ThreeBodyChiGA);
  CHECK(r.inequality.find("gamma_H + 4 gamma_L n_th") != std::string::npos);
  const double Gamma = in.gamma_H + 4.0 * in.gamma_L * in.n_th;
  CHECK(rel_err(r.margin, std::min(in.g / Gamma, in.omega_m / in.chi)) < 1e-12);

  Gen g(5);
  for (int trial = 0; trial < 50; ++trial) {
    const double k = g.log_uniform(1e-3, 1e3);
    RegimeInputs s = in;
    for (double* v : {&s.A_L, &s.chi, &s.g, &s.A_H, &s.gamma_L, &s.gamma_H, &s.omega_L, &s.omega_m}) *v *= k;
    const RegimeReport rs = classify_regime(s);
    CHECK(rs.tag == r.tag);
    CHECK(rel_err(rs.margin, r.margin) < 1e-12);
  }

  RegimeInputs quiet = in;
  quiet.gamma_H = quiet.gamma_L = 0.0;
  quiet.omega_L = quiet.omega_m = 0.0;
  const RegimeReport q = classify_regime(quiet);
  CHECK(q.margin == kMarginCap);
  CHECK(q.pass);

  RegimeInputs two;
  two.A_L = 1e6;
  two.g = 1.5e6;
  try {
    classify_regime(two);
    FAIL("expected AmbiguousRegime");
  } catch (const AmbiguousRegime& e) {
    CHECK(e.candidates().size() == 2);
  }
  two.g = 1e4;
  two.gamma_L = 10.0;
  two.n_th = 1.0;
  CHECK(classify_regime(two).tag == RegimeCase::TwoBodyAnharmonic);

  RegimeInputs none;
  CHECK_THROWS_AS(classify_regime(none), RegimeError);
  none.chi = -1.0;
  CHECK_THROWS_AS(classify_regime(none), ValueError);
}

TEST_CASE("hybridization weights") {
  Gen g(8);
  for (int i = 0; i < 200; ++i) {
    const double x = g.log_uniform(1e-4, 1e2);
    const double sign = g.coin() ? 1.0 : -1.0;
    const HybridizationSplit h = hybridization_split(x, sign, 1.0);
    CHECK(std::abs(h.f * h.f + h.h * h.h - 1.0) < 1e-12);
    CHECK(h.offset_plus - h.offset_minus == doctest::Approx(std::sqrt(1.0 + 4.0 * x * x)));
  }
  const HybridizationSplit weak = hybridization_split(1e-9, 1.0, 1.0);
  CHECK(std::abs(weak.f - 1.0) < 1e-12);
  CHECK(std::abs(weak.h) < 1e-8);
  const double expect[] = {0.06, 0.17, 0.38};
  const double gd[] = {0.25, 0.5, 1.0};
  for (int i = 0; i < 3; ++i) {
    const HybridizationSplit h = hybridization_split(gd[i], 1.0, 1.0);
    CHECK(std::abs(h.chi_m / h.chi_L - expect[i]) < 0.01);
  }
}

TEST_CASE("dressed shifts") {
  const DressedShifts one = dressed_shifts(0.6, 1.0, 1.0, 1);
  const DressedShifts two = dressed_shifts(0.6, 1.0, 1.0, 2);
  CHECK(std::abs(one.chi_plus - 0.82) < 0.01);
  CHECK(std::abs(one.chi_minus - 0.18) < 0.01);
  CHECK(std::abs(two.chi_plus - 0.75) < 0.01);
  CHECK(std::abs(two.chi_minus - 0.25) < 0.01);
  for (int n = 1; n < 6; ++n) {
    const DressedShifts d = dressed_shifts(0.3, -2.0, 3.0, n);
    CHECK(d.chi_plus + d.chi_minus == doctest::Approx(3.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(dressed_shifts(0.6, 1.0, 1.0, 0), ValueError);
}

TEST_CASE("feasibility estimates") {
  FeasibilityParams p;
  p.f_m = 1e6;
  p.Q_m = 1e8;
  p.T = 10e-3;
  p.n = 1;
  p.m = 200e-12;
  const FeasibilityReport heavy = feasibility(p);
  CHECK(heavy.t_G >= 0.3e-3);
  CHECK(heavy.t_G <= 0.4e-3);
  p.m = 2e-12;
  const FeasibilityReport light = feasibility(p);
  CHECK(light.t_G >= 30e-3);
  CHECK(light.t_G <= 40e-3);
  CHECK(rel_err(light.t_G / heavy.t_G, 100.0) < 1e-12);

  CHECK(rel_err(light.t_coh_high_T, p.Q_m / 3.0 * constants::hbar / (constants::k_B * p.T)) < 1e-14);
  p.f_m = 1e3;
  CHECK(rel_err(feasibility(p).t_coh, feasibility(p).t_coh_high_T) < 1e-3);

  p.kind = StateKind::Cat;
  p.n = 0;
  CHECK(std::isinf(feasibility(p).t_coh));
  p.n = -1;
  CHECK_THROWS_AS(feasibility(p), ValueError);
}
