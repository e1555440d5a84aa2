#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli_output.hpp"
#include "cqed/circuit_model.hpp"
#include "cqed/constants.hpp"
#include "cqed/designer.hpp"
#include "cqed/electromech.hpp"
#include "cqed/errors.hpp"
#include "cqed/fitkit.hpp"
#include "cqed/normalmodes.hpp"
#include "cqed/parallel.hpp"
#include "cqed/quantizer.hpp"
#include "cqed/rabi.hpp"
#include "cqed/spectro.hpp"
#include "cqed/waveguide.hpp"

using cli::json;
using cli::num;
using cli::nums;
using namespace cqed;

namespace {

constexpr const char* kVersion = "1.0.0";

const std::vector<std::string> kCommands{"quantize", "modes",       "spectrum", "shifts", "design",
                                         "drum",     "feasibility", "regime",   "spectro", "fit"};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("IOError", what) {}
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw SyntaxError("invalid JSON in '" + path + "': " + e.what());
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::optional<double> parse_number(const std::string& s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) return std::nullopt;
  return v;
}

// Rows of comma-separated fields; '#' lines and blank lines are skipped.
std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto f = split(t, ',');
    for (auto& x : f) x = trim(x);
    rows.push_back(f);
  }
  return rows;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  if (trim(s).empty()) return out;
  for (const auto& f : split(s, ',')) {
    const auto v = parse_number(f);
    if (!v || *v != std::floor(*v)) throw ValueError("expected a comma-separated integer list, got '" + s + "'");
    out.push_back(static_cast<int>(*v));
  }
  return out;
}

// --params file.json: keys become trailing --key value arguments of the
// chosen subcommand, so they take precedence over flags. A "model" object
// (or a top-level "modes" list) is kept for the spectro subcommand.
std::vector<std::string> expand_params(std::vector<std::string> args, json& model) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--params" && i + 1 < args.size()) {
      path = args[i + 1];
      break;
    }
    if (args[i].rfind("--params=", 0) == 0) {
      path = args[i].substr(9);
      break;
    }
  }
  if (path.empty()) return args;
  const json p = read_json(path);
  if (!p.is_object()) throw SyntaxError("--params file must hold a JSON object");
  if (p.contains("model")) model = p["model"];
  else if (p.contains("modes") && p["modes"].is_array()) model = p;
  for (auto it = p.begin(); it != p.end(); ++it) {
    const std::string& k = it.key();
    if (k == "model" || (k == "modes" && it.value().is_array()) || k == "couplings" || k == "drive" ||
        k == "sweep" || k == "name" || k == "units")
      continue;
    std::string flag = "--" + k;
    std::replace(flag.begin() + 2, flag.end(), '_', '-');
    const json& v = it.value();
    if (v.is_boolean()) {
      if (v.get<bool>()) args.push_back(flag);
      continue;
    }
    std::string val;
    auto scalar = [](const json& x) {
      if (x.is_string()) return x.get<std::string>();
      if (x.is_number_integer()) return std::to_string(x.get<long long>());
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", x.get<double>());
      return std::string(buf);
    };
    if (v.is_array()) {
      for (std::size_t i = 0; i < v.size(); ++i) val += (i ? "," : "") + scalar(v[i]);
    } else if (v.is_string() || v.is_number()) {
      val = scalar(v);
    } else {
      throw SyntaxError("unsupported value for parameter '" + k + "'");
    }
    args.push_back(flag);
    args.push_back(val);
  }
  return args;
}

json error_json(const std::string& kind, const std::string& message) {
  json j = json::object();
  j["error"] = kind;
  j["message"] = message;
  return j;
}

json regime_tag(Regime r) { return to_string(r); }

json shifts_json(const DispersiveShifts& s, const TwoModeSystem& sys) {
  json j = json::object();
  j["regime"] = regime_tag(s.regime);
  j["g_hz"] = num(sys.g / constants::two_pi);
  j["g_ratio"] = num(sys.g / std::sqrt(sys.omega_a * sys.omega_r));
  j["omega_tilde_a_hz"] = num(s.omega_tilde_a / constants::two_pi);
  j["omega_tilde_r_hz"] = num(s.omega_tilde_r / constants::two_pi);
  j["a_a_hz"] = num(s.A_a_over_h);
  j["a_r_hz"] = num(s.A_r_over_h);
  j["a_r_is_bound"] = s.A_r_is_bound;
  j["chi_hz"] = num(s.chi_over_h);
  j["delta_nm_hz"] = num(s.delta_nm_over_h);
  j["warnings"] = s.warnings;
  return j;
}

json derived_json(const DesignDerived& d) {
  json j = json::object();
  j["f_a_hz"] = num(d.omega_a / constants::two_pi);
  j["f_a_bar_hz"] = num(d.omega_a_bar / constants::two_pi);
  j["f_r_hz"] = num(d.omega_r / constants::two_pi);
  j["g_hz"] = num(d.g / constants::two_pi);
  j["g_ratio"] = num(d.g_ratio);
  j["e_c_hz"] = num(d.E_C_over_h);
  j["e_j_hz"] = num(d.E_J_over_h);
  j["f_tilde_a_hz"] = num(d.omega_tilde_a / constants::two_pi);
  j["f_tilde_r_hz"] = num(d.omega_tilde_r / constants::two_pi);
  j["chi_hz"] = num(d.chi_over_h);
  j["dispersive_breakdown"] = d.breakdown;
  j["chi_is_lower_bound"] = d.chi_is_lower_bound;
  j["warnings"] = d.warnings;
  return j;
}

CouplingKind coupling_kind(const std::string& s) {
  if (s == "exchange") return CouplingKind::Exchange;
  if (s == "counter_rotating") return CouplingKind::CounterRotating;
  if (s == "cross_kerr") return CouplingKind::CrossKerr;
  throw ValueError("unknown coupling kind '" + s + "' (exchange, counter_rotating, cross_kerr)");
}

SpectroModel model_from_json(const json& j) {
  SpectroModel m;
  try {
    m.name = j.value("name", std::string("custom"));
    m.units = j.value("units", std::string("arbitrary"));
    std::map<std::string, int> index;
    for (const auto& md : j.at("modes")) {
      ModeSpec s;
      s.name = md.value("name", "m" + std::to_string(m.modes.size()));
      s.dim = md.at("dim").get<int>();
      s.freq = md.at("freq").get<double>();
      s.anharmonicity = md.value("anharmonicity", 0.0);
      s.kappa = md.value("kappa", 0.0);
      s.n_th = md.value("n_th", 0.0);
      s.rotating = md.value("rotating", false);
      index[s.name] = static_cast<int>(m.modes.size());
      m.modes.push_back(s);
    }
    auto mode_ref = [&](const json& r) {
      if (r.is_number_integer()) return r.get<int>();
      const auto it = index.find(r.get<std::string>());
      if (it == index.end()) throw ValueError("unknown mode '" + r.get<std::string>() + "'");
      return it->second;
    };
    if (j.contains("couplings"))
      for (const auto& c : j["couplings"])
        m.couplings.push_back({coupling_kind(c.at("kind").get<std::string>()), mode_ref(c.at("a")), mode_ref(c.at("b")),
                               c.at("strength").get<double>()});
    const json& d = j.at("drive");
    m.drive_mode = mode_ref(d.at("mode"));
    m.drive_amplitude = d.at("amplitude").get<double>();
    const json& s = j.at("sweep");
    m.sweep_start = s.at("start").get<double>();
    m.sweep_stop = s.at("stop").get<double>();
    m.sweep_points = s.value("points", 201);
  } catch (const json::exception& e) {
    throw SyntaxError(std::string("invalid spectro model: ") + e.what());
  }
  m.validate();
  return m;
}

json fit_params_json(const FitParameters& p) {
  json j = json::object();
  j["omega_0_hz"] = num(p.omega_0_hz);
  j["C_c"] = num(p.C_c);
  j["C_a"] = num(p.C_a);
  j["N_env"] = num(p.N_env);
  j["E_J_max_over_h"] = num(p.E_J_max_over_h);
  j["d"] = num(p.d);
  j["alpha"] = nums(p.alpha);
  return j;
}

FitParameters fit_params_from_json(const json& j) {
  FitParameters p;
  try {
    p.omega_0_hz = j.at("omega_0_hz").get<double>();
    p.C_c = j.at("C_c").get<double>();
    p.C_a = j.at("C_a").get<double>();
    p.N_env = j.value("N_env", 0.0);
    p.E_J_max_over_h = j.at("E_J_max_over_h").get<double>();
    p.d = j.value("d", 0.0);
    if (j.contains("alpha")) p.alpha = j["alpha"].get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw SyntaxError(std::string("invalid fit parameters: ") + e.what());
  }
  return p;
}

json fit_result_json(const FitResult& r, const FitModel& model) {
  json j = json::object();
  j["params"] = fit_params_json(r.params);
  j["e_c_hz"] = num(fit_charging_energy(r.params, model));
  j["free"] = r.free;
  json unc = json::object();
  json cov = json::array();
  for (Eigen::Index i = 0; i < r.covariance.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < r.covariance.cols(); ++k) row.push_back(num(r.covariance(i, k)));
    cov.push_back(row);
    unc[r.free[i]] = num(std::sqrt(std::max(0.0, r.covariance(i, i))));
  }
  j["uncertainty"] = unc;
  j["covariance"] = cov;
  j["rms_hz"] = num(r.rms_hz);
  j["objective_hz2"] = num(r.objective);
  j["evals"] = r.evals;
  j["converged"] = r.converged;
  j["warnings"] = r.warnings;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  json model_json;
  try {
    args = expand_params(args, model_json);
  } catch (const Error& e) {
    std::cerr << error_json(e.kind(), e.what()).dump() << "\n";
    return 1;
  }

  CLI::App app{"Circuit QED modeling: quantization, spectra, dispersive shifts, design, electromechanics, "
               "steady-state spectroscopy and fitting.",
               "cqed"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.fallthrough();

  std::string format_s, out_path, params_path;
  bool quiet = false, show_version = false, show_caps = false;
  unsigned jobs = default_jobs();
  std::uint64_t seed = 1;
  app.add_flag("--version", show_version, "Print the version and exit");
  app.add_flag("--capabilities", show_caps, "Print machine-readable capabilities and exit");
  app.add_option("--format", format_s, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--quiet,-q", quiet, "Suppress warnings on stderr");
  app.add_option("--jobs,-j", jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Seed for every stochastic choice");
  app.add_option("--params", params_path, "JSON file whose keys override flags");
  app.add_option("--out,-o", out_path, "Output file (default stdout)");

  std::vector<std::string> warnings;
  std::ostringstream out;
  auto fmt = [&](cli::Format dflt) {
    if (format_s == "json") return cli::Format::Json;
    if (format_s == "csv") return cli::Format::Csv;
    return dflt;
  };

  // quantize
  auto* q = app.add_subcommand("quantize", "Quantize a transmon-resonator netlist");
  std::string q_netlist;
  int q_modes = 1;
  std::optional<double> q_nenv;
  q->add_option("netlist", q_netlist, "Netlist file")->required();
  q->add_option("--modes,-M", q_modes, "Resonator modes")->check(CLI::PositiveNumber);
  q->add_option("--n-env", q_nenv, "Offset charge");
  q->callback([&] {
    ReducedCircuit rc = reduce_to_transmon_resonator(parse_netlist(read_file(q_netlist)));
    if (q_nenv) rc.N_env = *q_nenv;
    const QuantizedSystem s = quantize(rc, q_modes);
    json j = json::object();
    j["c_tilde_r_f"] = num(s.C_tilde_r);
    j["c_tilde_a_f"] = num(s.C_tilde_a);
    j["c_tilde_c_f"] = num(s.C_tilde_c);
    std::vector<double> w, g;
    for (int m = 0; m < s.M; ++m) {
      w.push_back(s.omega_m[m] / constants::two_pi);
      g.push_back(s.g_m[m] / constants::two_pi);
    }
    j["omega_m_hz"] = nums(w);
    j["g_m_hz"] = nums(g);
    json G = json::array();
    for (int m = 0; m < s.M; ++m) {
      std::vector<double> r;
      for (int k = 0; k < s.M; ++k) r.push_back(s.G(m, k) / constants::two_pi);
      G.push_back(nums(r));
    }
    j["G_hz"] = G;
    j["e_c_hz"] = num(s.E_C_over_h);
    j["omega_a_bar_hz"] = num(s.omega_a_bar / constants::two_pi);
    j["e_j_hz"] = num(rc.E_J_max_over_h);
    j["d"] = num(rc.d);
    cli::write_object(out, j, fmt(cli::Format::Json));
  });

  // modes
  auto* mo = app.add_subcommand("modes", "Lumped ladder of a transmission-line resonator");
  std::string mo_kind = "quarter";
  double mo_zc = 50.0, mo_fc = 0.0;
  int mo_M = 4;
  mo->add_option("--waveguide", mo_kind, "Resonator kind")->check(CLI::IsMember({"quarter", "half"}));
  mo->add_option("--zc", mo_zc, "Characteristic impedance (Ohm)");
  mo->add_option("--fc", mo_fc, "Fundamental frequency (Hz)")->required();
  mo->add_option("--modes,-M", mo_M, "Number of modes")->check(CLI::PositiveNumber);
  mo->callback([&] {
    WaveguideSpec spec;
    spec.kind = mo_kind == "half" ? WaveguideKind::HalfWave : WaveguideKind::QuarterWave;
    spec.Z_c = mo_zc;
    spec.omega_c = constants::two_pi * mo_fc;
    spec.M = mo_M;
    const ModeLadder l = lumped_equivalent(spec);
    cli::Table t;
    t.header = {"m", "C_farads", "L_henries", "f_hz"};
    for (std::size_t m = 0; m < l.modes.size(); ++m)
      t.rows.push_back({static_cast<int>(m), num(l.modes[m].C), num(l.modes[m].L),
                        num(l.modes[m].omega / constants::two_pi)});
    cli::write_table(out, t, fmt(cli::Format::Csv));
  });

  // spectrum
  auto* sp = app.add_subcommand("spectrum", "Flux sweep of the multimode Rabi spectrum");
  std::string sp_netlist, sp_flux = "0:0.5:51", sp_caps;
  int sp_levels = 4, sp_M = 1, sp_nq = 5, sp_nmax = 20;
  std::optional<double> sp_nenv;
  sp->add_option("netlist", sp_netlist, "Netlist file")->required();
  sp->add_option("--flux", sp_flux, "Flux sweep a:b:n in units of the flux quantum");
  sp->add_option("--levels,-k", sp_levels, "Transitions per flux point")->check(CLI::PositiveNumber);
  sp->add_option("--modes,-M", sp_M, "Resonator modes")->check(CLI::PositiveNumber);
  sp->add_option("--nq", sp_nq, "Transmon levels")->check(CLI::PositiveNumber);
  sp->add_option("--caps", sp_caps, "Fock dimension per mode, comma separated (default 4 each)");
  sp->add_option("--nmax", sp_nmax, "Charge-basis cutoff");
  sp->add_option("--n-env", sp_nenv, "Offset charge");
  sp->callback([&] {
    const auto parts = split(sp_flux, ':');
    if (parts.size() != 3) throw ValueError("--flux expects a:b:n");
    const auto a = parse_number(parts[0]), b = parse_number(parts[1]), nn = parse_number(parts[2]);
    if (!a || !b || !nn || *nn < 1 || *nn != std::floor(*nn)) throw ValueError("--flux expects a:b:n with integer n >= 1");
    ReducedCircuit rc = reduce_to_transmon_resonator(parse_netlist(read_file(sp_netlist)));
    if (sp_nenv) rc.N_env = *sp_nenv;
    const QuantizedSystem s = quantize(rc, sp_M);
    TruncationSpec tr;
    tr.N_q = sp_nq;
    tr.photon_caps = sp_caps.empty() ? std::vector<int>(sp_M, 4) : parse_int_list(sp_caps);
    tr.validate();
    const int npts = static_cast<int>(*nn);
    std::vector<double> flux(npts);
    for (int i = 0; i < npts; ++i) flux[i] = npts == 1 ? *a : *a + (*b - *a) * i / (npts - 1.0);
    const int dim = static_cast<int>(tr.dimension());
    const int k = std::min(sp_levels + 1, dim);
    const auto models = parallel_map(flux.size(), jobs, [&](std::size_t i) {
      const CpbSpectrum cpb = cpb_diagonalize(s.E_C_over_h, rc.E_J_max_over_h, rc.d, flux[i], rc.N_env, sp_nmax, sp_nq);
      return diagonalize(assemble(s, cpb, tr), k, tr.dims());
    });
    cli::Table t;
    t.header = {"flux", "transition_label", "f_hz"};
    for (std::size_t i = 0; i < flux.size(); ++i)
      for (int j = 1; j < k; ++j)
        t.rows.push_back({num(flux[i]), models[i].labels[j].to_string(), num(models[i].eigenvalues_hz(j))});
    cli::write_table(out, t, fmt(cli::Format::Csv));
  });

  // shifts
  auto* sh = app.add_subcommand("shifts", "Normal modes and dispersive shifts of a transmon-resonator pair");
  double sh_wa = 0, sh_wr = 0, sh_ec = 0;
  std::optional<double> sh_g, sh_ratio;
  std::string sh_regime = "auto", sh_conv = "printed";
  sh->add_option("--wa", sh_wa, "Transmon frequency (Hz)")->required();
  sh->add_option("--wr", sh_wr, "Resonator frequency (Hz)")->required();
  sh->add_option("--ec", sh_ec, "Charging energy E_C/h (Hz)")->required();
  auto* sh_g_opt = sh->add_option("--g", sh_g, "Coupling (Hz)");
  sh->add_option("--g-ratio", sh_ratio, "g / sqrt(omega_a omega_r)")->excludes(sh_g_opt);
  sh->add_option("--regime", sh_regime, "Regime")->check(CLI::IsMember({"auto", "rwa", "beyond", "resonant"}));
  sh->add_option("--delta-convention", sh_conv, "Detuning convention")->check(CLI::IsMember({"printed", "primed"}));
  sh->callback([&] {
    if (!sh_g && !sh_ratio) throw CLI::RequiredError("--g or --g-ratio");
    TwoModeSystem sys{constants::two_pi * sh_wa, sh_ec, constants::two_pi * sh_wr, 0.0};
    sys.g = sh_g ? constants::two_pi * *sh_g : *sh_ratio * std::sqrt(sys.omega_a * sys.omega_r);
    Regime r = detect_regime(sys);
    if (sh_regime == "rwa") r = Regime::RWA;
    if (sh_regime == "beyond") r = Regime::BeyondRWA;
    if (sh_regime == "resonant") r = sys.g > sys.E_C_angular() ? Regime::ResonantLargeG : Regime::ResonantSmallG;
    const DispersiveShifts s =
        compute_shifts(sys, r, sh_conv == "primed" ? DeltaConvention::Primed : DeltaConvention::AsPrinted);
    warnings.insert(warnings.end(), s.warnings.begin(), s.warnings.end());
    cli::write_object(out, shifts_json(s, sys), fmt(cli::Format::Json));
  });

  // design
  auto* de = app.add_subcommand("design", "Search circuit parameters for an RFcQED target, or evaluate a point");
  double de_wa = 6e9, de_wr = 0, de_chi = 0, de_gamma = 0, de_ec = 200e6, de_tol = 0.02;
  std::string de_bounds, de_conv = "table";
  int de_ppd = 8, de_refine = 16, de_max = 10;
  bool de_eval = false;
  double de_eval_wr = 0, de_ratio = 0;
  de->add_option("--target-wa", de_wa, "Transmon frequency target (Hz)");
  de->add_option("--target-wr", de_wr, "Dressed resonator frequency target (Hz)");
  de->add_option("--chi-min", de_chi, "Minimum cross-Kerr (Hz)");
  de->add_option("--gamma", de_gamma, "Linewidth used for the chi/gamma margin (Hz)");
  de->add_option("--ec", de_ec, "Charging energy target E_C/h (Hz)");
  de->add_option("--rel-tol", de_tol, "Relative tolerance on frequency and E_C targets");
  de->add_option("--bounds", de_bounds, "JSON bounds {C_a,C_c,C_r,L_J,L_r: [lo, hi]}");
  de->add_option("--ppd", de_ppd, "Grid points per decade")->check(CLI::PositiveNumber);
  de->add_option("--refine", de_refine, "Candidates refined by the simplex")->check(CLI::PositiveNumber);
  de->add_option("--max-results", de_max, "Results returned")->check(CLI::PositiveNumber);
  de->add_flag("--evaluate", de_eval, "Evaluate --target-wa, --wr, --ec, --g-ratio instead of searching");
  de->add_option("--wr", de_eval_wr, "Bare resonator frequency for --evaluate (Hz)");
  de->add_option("--g-ratio", de_ratio, "g / sqrt(omega_a omega_r) for --evaluate");
  de->add_option("--convention", de_conv, "Frequency convention for --evaluate")
      ->check(CLI::IsMember({"table", "physical"}));
  de->callback([&] {
    if (de_eval) {
      const DesignDerived d = evaluate_frequencies(
          de_wa, de_eval_wr, de_ec, de_ratio, de_conv == "table" ? FrequencyConvention::Table : FrequencyConvention::Physical);
      warnings.insert(warnings.end(), d.warnings.begin(), d.warnings.end());
      cli::write_object(out, derived_json(d), fmt(cli::Format::Json));
      return;
    }
    if (de_bounds.empty()) throw CLI::RequiredError("--bounds");
    const json bj = read_json(de_bounds);
    DesignBounds b;
    for (int i = 0; i < 5; ++i) {
      const char* n = DesignBounds::names()[i];
      if (!bj.contains(n)) throw ValueError(std::string("bounds file lacks ") + n);
      const json& v = bj[n];
      if (v.is_number()) b.range[i] = {v.get<double>(), v.get<double>()};
      else if (v.is_array() && v.size() == 2) b.range[i] = {v[0].get<double>(), v[1].get<double>()};
      else throw ValueError(std::string("bounds for ") + n + " must be a number or [lo, hi]");
    }
    DesignTarget t{de_wa, de_wr, de_chi, de_gamma, de_ec, de_tol};
    SearchOptions so;
    so.points_per_decade = de_ppd;
    so.refine_top = de_refine;
    so.max_results = de_max;
    so.seed = seed;
    so.jobs = static_cast<int>(jobs);
    const auto pts = search(t, b, so);
    cli::Table tab;
    tab.header = {"rank", "C_a", "C_c", "C_r", "L_J", "L_r", "f_a_hz", "f_r_hz", "g_hz", "g_ratio", "e_c_hz",
                  "f_tilde_a_hz", "f_tilde_r_hz", "chi_hz", "chi_over_gamma"};
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto& p = pts[i];
      const auto& d = p.derived;
      tab.rows.push_back({static_cast<int>(i + 1), num(p.C_a), num(p.C_c), num(p.C_r), num(p.L_J), num(p.L_r),
                          num(d.omega_a / constants::two_pi), num(d.omega_r / constants::two_pi),
                          num(d.g / constants::two_pi), num(d.g_ratio), num(d.E_C_over_h),
                          num(d.omega_tilde_a / constants::two_pi), num(d.omega_tilde_r / constants::two_pi),
                          num(d.chi_over_h), num(d.chi_over_h / de_gamma)});
    }
    cli::write_table(out, tab, fmt(cli::Format::Csv));
  });

  // drum
  auto* dr = app.add_subcommand("drum", "Equivalent circuit of a biased mechanical drum capacitor");
  DrumSpec ds;
  std::optional<double> dr_cap, dr_lj, dr_fa, dr_qa, dr_soft;
  dr->add_option("--k", ds.k, "Spring constant (N/m)")->required();
  dr->add_option("--m", ds.m, "Effective mass (kg)")->required();
  dr->add_option("--area", ds.A, "Plate area (m^2)")->required();
  dr->add_option("--gap", ds.d, "Zero-bias gap (m)")->required();
  dr->add_option("--v0", ds.V0, "Bias voltage (V)");
  dr->add_option("--ca-prime", dr_cap, "Transmon capacitance excluding the drum (F)");
  dr->add_option("--lj", dr_lj, "Junction inductance (H); default resonant with the drum");
  dr->add_option("--fa", dr_fa, "Transmon frequency for the GHz dispersive bound (Hz)");
  dr->add_option("--qa", dr_qa, "Transmon quality factor for the GHz bound");
  dr->add_option("--softening", dr_soft, "Frequency softening ratio for the GHz bound");
  dr->callback([&] {
    const DrumEquivalent eq = equivalent_circuit(ds);
    json j = json::object();
    j["v0"] = num(eq.V0);
    j["m_kg"] = num(eq.m);
    j["x0_m"] = num(eq.x0);
    j["gap_biased_m"] = num(eq.D);
    j["c_d_f"] = num(eq.C_d);
    j["k_eff"] = num(eq.k_eff);
    j["c_m_f"] = num(eq.C_m);
    j["l_m_h"] = num(eq.L_m);
    j["z_m_ohm"] = num(eq.Z_m);
    j["f_m_biased_hz"] = num(eq.omega_m_biased / constants::two_pi);
    j["f_m_unbiased_hz"] = num(eq.omega_m_unbiased / constants::two_pi);
    j["pull_in_v"] = num(pull_in_voltage(ds));
    if (dr_cap) {
      const double lj = dr_lj ? *dr_lj : resonant_junction_inductance(eq, *dr_cap);
      const DrumTransmonCoupling c = drum_transmon_coupling(eq, *dr_cap, lj);
      json cj = json::object();
      cj["l_j_h"] = num(lj);
      cj["c_a_f"] = num(c.C_a);
      cj["c_m_tilde_f"] = num(c.C_m_tilde);
      cj["f_a_bar_hz"] = num(c.omega_a_bar / constants::two_pi);
      cj["e_c_hz"] = num(c.E_C_over_h);
      cj["f_m_tilde_hz"] = num(c.omega_m_tilde / constants::two_pi);
      cj["g_hz"] = num(c.g / constants::two_pi);
      j["coupling"] = cj;
    }
    if (dr_fa) {
      if (!dr_cap || !dr_qa) throw CLI::RequiredError("--ca-prime and --qa with --fa");
      const GhzBound b = ghz_dispersive_bound(*dr_fa, eq.omega_m_unbiased / constants::two_pi, *dr_cap, eq.C_d, dr_soft);
      json gj = json::object();
      gj["softening_s"] = num(b.softening_s);
      gj["chi_over_hbar_omega_a"] = num(b.chi_over_hbar_omega_a);
      gj["optimum_s"] = num(b.optimum_s);
      gj["optimum_chi_over_hbar_omega_a"] = num(b.optimum_chi_over_hbar_omega_a);
      gj["printed_branch_value"] = num(b.printed_branch_value);
      gj["q_lower"] = num(b.q_lower);
      gj["required_q"] = num(b.required_Q);
      gj["min_f_m_hz"] = num(minimum_mechanical_frequency(*dr_fa, *dr_qa, *dr_cap, eq.C_d, dr_soft));
      j["ghz_bound"] = gj;
    }
    cli::write_object(out, j, fmt(cli::Format::Json));
  });

  // regime
  auto* rg = app.add_subcommand("regime", "Classify the hybrid transmon-drum regime and its validity margin");
  RegimeInputs ri;
  std::optional<double> rg_temp;
  rg->add_option("--al", ri.A_L, "Low-mode anharmonicity (Hz)");
  rg->add_option("--chi", ri.chi, "Cross-Kerr (Hz)");
  rg->add_option("--g", ri.g, "Low mode - drum coupling (Hz)");
  rg->add_option("--ah", ri.A_H, "High-mode anharmonicity (Hz)");
  rg->add_option("--gamma-l", ri.gamma_L, "Low-mode linewidth (Hz)");
  rg->add_option("--gamma-h", ri.gamma_H, "High-mode linewidth (Hz)");
  rg->add_option("--nth", ri.n_th, "Thermal occupation of the low mode");
  rg->add_option("--temp", rg_temp, "Temperature (K); sets --nth from --wl");
  rg->add_option("--wl", ri.omega_L, "Low-mode frequency (Hz)");
  rg->add_option("--wm", ri.omega_m, "Drum frequency (Hz)");
  rg->callback([&] {
    if (rg_temp) ri.n_th = thermal_occupation(ri.omega_L, *rg_temp);
    const RegimeReport r = classify_regime(ri);
    warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
    json j = json::object();
    j["tag"] = to_string(r.tag);
    j["factor"] = num(r.factor);
    j["margin"] = num(r.margin);
    j["pass"] = r.pass;
    j["inequality"] = r.inequality;
    j["n_th"] = num(ri.n_th);
    j["warnings"] = r.warnings;
    cli::write_object(out, j, fmt(cli::Format::Json));
  });

  // feasibility
  auto* fe = app.add_subcommand("feasibility", "Gravitational decoherence feasibility of a mechanical superposition");
  FeasibilityParams fp;
  std::string fe_state = "fock";
  fe->add_option("--mass", fp.m, "Mass (kg)")->required();
  fe->add_option("--fm", fp.f_m, "Mechanical frequency (Hz)")->required();
  fe->add_option("--q", fp.Q_m, "Mechanical quality factor")->required();
  fe->add_option("--temp", fp.T, "Temperature (K)")->required();
  fe->add_option("--n", fp.n, "Fock number or cat amplitude squared");
  fe->add_option("--A", fp.A_mass, "Mass number of the nuclei");
  fe->add_option("--r0", fp.R0, "Nuclear radius constant (m)");
  fe->add_option("--state", fe_state, "State kind")->check(CLI::IsMember({"fock", "cat"}));
  fe->add_option("--radius", fp.R_body, "Body radius for the homogeneous-sphere estimates (m)");
  fe->callback([&] {
    fp.kind = fe_state == "cat" ? StateKind::Cat : StateKind::Fock;
    const FeasibilityReport r = feasibility(fp);
    json j = json::object();
    j["x_zpf_m"] = num(r.x_zpf);
    j["delta_x_m"] = num(r.delta_x);
    j["nuclear_radius_m"] = num(r.a);
    j["n_th"] = num(r.n_th);
    j["gamma_m"] = num(r.gamma_m);
    j["t_coh_s"] = num(r.t_coh);
    j["t_coh_high_t_s"] = num(r.t_coh_high_T);
    j["t_g_s"] = num(r.t_G);
    j["t_k_s"] = num(r.t_K);
    j["t_p_s"] = num(r.t_P);
    j["condition_low"] = num(r.condition_low);
    j["condition_mid"] = num(r.condition_mid);
    j["condition_high"] = num(r.condition_high);
    j["analytic_low"] = num(r.analytic_low);
    j["analytic_high"] = num(r.analytic_high);
    j["condition_pass"] = r.condition_pass;
    j["gravity_faster"] = r.gravity_faster;
    cli::write_object(out, j, fmt(cli::Format::Json));
  });

  // spectro
  auto* so = app.add_subcommand("spectro", "Steady-state spectroscopy sweep");
  std::string so_preset;
  std::optional<int> so_points;
  std::optional<double> so_start, so_stop;
  bool so_list = false;
  so->add_option("--preset", so_preset, "Preset name")->check(CLI::IsMember(preset_names()));
  so->add_option("--points", so_points, "Override the number of sweep points")->check(CLI::PositiveNumber);
  so->add_option("--start", so_start, "Override the sweep start");
  so->add_option("--stop", so_stop, "Override the sweep stop");
  so->add_flag("--list-presets", so_list, "List presets and exit");
  so->callback([&] {
    if (so_list) {
      for (const auto& n : preset_names()) out << n << "\n";
      return;
    }
    SpectroModel m;
    if (!so_preset.empty()) m = preset(so_preset);
    else if (!model_json.is_null()) m = model_from_json(model_json);
    else throw CLI::RequiredError("--preset or --params model.json");
    if (so_points) m.sweep_points = *so_points;
    if (so_start) m.sweep_start = *so_start;
    if (so_stop) m.sweep_stop = *so_stop;
    const SpectroscopyTrace t = sweep(m, jobs);
    cli::Table tab;
    tab.header = {"omega_d_hz", "response"};
    for (std::size_t i = 0; i < t.omega_d.size(); ++i) {
      tab.rows.push_back({num(t.omega_d[i]), t.ok[i] ? num(t.response[i]) : json(nullptr)});
      if (!t.ok[i]) warnings.push_back("point " + std::to_string(i) + ": " + t.errors[i]);
    }
    if (m.units != "Hz") warnings.push_back("frequencies are in units of the " + m.units);
    cli::write_table(out, tab, fmt(cli::Format::Csv));
  });

  // fit
  auto* fi = app.add_subcommand("fit", "Least-squares fit of flux-sweep transition frequencies");
  std::string fi_data, fi_init, fi_fix, fi_free, fi_model, fi_res;
  int fi_starts = 8, fi_evals = 3000;
  bool fi_cal = false, fi_cal_min = false;
  fi->add_option("data", fi_data, "CSV flux_ratio,label,f_hz[,weight] (or current,f_hz with --calibrate)")->required();
  fi->add_option("--init", fi_init, "Initial parameters (JSON)");
  fi->add_option("--fix", fi_fix, "Extra fixed parameters, comma separated (omega_0 and d are fixed by default)");
  fi->add_option("--free", fi_free, "Parameters released from the default fixed set, comma separated");
  fi->add_option("--model", fi_model, "Model truncation (JSON: Z_c, modes, N_max, N_q, photon_caps)");
  fi->add_option("--residuals", fi_res, "Write per-row residual CSV here");
  fi->add_option("--starts", fi_starts, "Multi-start count")->check(CLI::PositiveNumber);
  fi->add_option("--max-evals", fi_evals, "Simplex evaluations per start")->check(CLI::PositiveNumber);
  fi->add_flag("--calibrate", fi_cal, "Extract flux period and offset from a current sweep");
  fi->add_flag("--sweet-spot-min", fi_cal_min, "With --calibrate: the sweet spot is a minimum of the trace");
  fi->callback([&] {
    const auto rows = read_csv(fi_data);
    if (fi_cal) {
      std::vector<double> I, f;
      for (const auto& r : rows) {
        if (r.size() < 2) throw SyntaxError("calibration rows need current,f_hz");
        const auto a = parse_number(r[0]), b = parse_number(r[1]);
        if (!a || !b) {
          if (I.empty()) continue;  // header
          throw SyntaxError("non-numeric calibration row");
        }
        I.push_back(*a);
        f.push_back(*b);
      }
      const FluxCalibration c = calibrate_flux(I, f, fi_cal_min);
      json j = json::object();
      j["period"] = num(c.period);
      j["offset"] = num(c.offset);
      cli::write_object(out, j, fmt(cli::Format::Json));
      return;
    }
    if (fi_init.empty()) throw CLI::RequiredError("--init");
    FluxSweepData data;
    bool linewidth = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      if (r.size() < 3) throw SyntaxError("data rows need flux_ratio,label,f_hz");
      const auto fl = parse_number(r[0]), fr = parse_number(r[2]);
      if (!fl || !fr) {
        if (data.empty() && i == 0) {
          linewidth = r.size() > 3 && r[3] == "linewidth_hz";
          continue;
        }
        throw SyntaxError("non-numeric data row " + std::to_string(i + 1));
      }
      FluxPoint p{*fl, r[1], *fr, 1.0};
      if (r.size() > 3 && !r[3].empty()) {
        const auto w = parse_number(r[3]);
        if (!w) throw SyntaxError("non-numeric weight in row " + std::to_string(i + 1));
        p.weight = linewidth ? 1.0 / (*w * *w) : *w;
      }
      data.push_back(p);
    }
    FitOptions fo;
    if (!fi_model.empty()) {
      const json mj = read_json(fi_model);
      fo.model.Z_c = mj.value("Z_c", fo.model.Z_c);
      fo.model.modes = mj.value("modes", fo.model.modes);
      fo.model.N_max = mj.value("N_max", fo.model.N_max);
      fo.model.N_q = mj.value("N_q", fo.model.N_q);
      if (mj.contains("photon_caps")) fo.model.photon_caps = mj["photon_caps"].get<std::vector<int>>();
    }
    for (const auto& n : split(fi_fix, ','))
      if (!trim(n).empty()) fo.fixed.insert(trim(n));
    for (const auto& n : split(fi_free, ',')) {
      const std::string t = trim(n);
      if (t.empty()) continue;
      fo.fixed.erase(t);
      fo.release.insert(t);
    }
    fo.starts = fi_starts;
    fo.max_evals = fi_evals;
    fo.seed = seed;
    fo.jobs = jobs;
    const FitParameters init = fit_params_from_json(read_json(fi_init));
    FitResult r;
    try {
      r = fit(data, init, fo);
    } catch (const FitNonConvergence& e) {
      json j = error_json(e.kind(), e.what());
      j["best"] = fit_result_json(e.best(), fo.model);
      std::cerr << j.dump() << "\n";
      throw;
    }
    warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
    if (!fi_res.empty()) {
      cli::Table t;
      t.header = {"flux_ratio", "label", "f_hz", "model_hz", "residual_hz"};
      for (std::size_t i = 0; i < data.size(); ++i)
        t.rows.push_back({num(data[i].flux_ratio), data[i].label, num(data[i].f_hz),
                          num(data[i].f_hz + r.residuals_hz[i]), num(r.residuals_hz[i])});
      std::ofstream rf(fi_res);
      if (!rf) throw IoError("cannot write '" + fi_res + "'");
      cli::write_table(rf, t, cli::Format::Csv);
    }
    cli::write_object(out, fit_result_json(r, fo.model), fmt(cli::Format::Json));
  });

  bool reported = false;
  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
    if (show_version) {
      std::cout << "cqed " << kVersion << "\n";
      return 0;
    }
    if (show_caps) {
      json j = json::object();
      j["name"] = "cqed";
      j["version"] = kVersion;
      j["subcommands"] = kCommands;
      j["formats"] = {"json", "csv"};
      j["spectro_presets"] = preset_names();
      j["fit_labels"] = {"c<k>: dressed cavity mode k", "q<k>: dressed transmon level k"};
      j["fit_parameters"] = {"omega_0", "C_c", "C_a", "N_env", "E_J", "d", "alpha_<m>"};
      j["exit_codes"] = {{"0", "success"}, {"1", "computation error"}, {"2", "usage error"}};
      cli::write_json(std::cout, j);
      return 0;
    }
    if (app.get_subcommands().empty()) {
      std::cerr << app.help();
      return 2;
    }
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const FitNonConvergence&) {
    reported = true;
  } catch (const AmbiguousRegime& e) {
    json j = error_json(e.kind(), e.what());
    j["candidates"] = e.candidates();
    std::cerr << j.dump() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << error_json(e.kind(), e.what()).dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << error_json("InternalError", e.what()).dump() << "\n";
    return 1;
  }
  if (reported) return 1;

  if (!quiet)
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  if (out_path.empty()) {
    std::cout << out.str();
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
      std::cerr << error_json("IOError", "cannot write '" + out_path + "'").dump() << "\n";
      return 1;
    }
    f << out.str();
  }
  return 0;
}
