#include "cqed/circuit_model.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "cqed/constants.hpp"
#include "cqed/errors.hpp"

namespace cqed {

namespace {

std::string at_line(int line, const std::string& msg) {
  return "line " + std::to_string(line) + ": " + msg;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_number(std::string_view tok, int line) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    throw SyntaxError(at_line(line, "invalid number '" + std::string(tok) + "'"));
  return v;
}

double parse_keyed(std::string_view tok, std::string_view key, int line) {
  if (tok.size() <= key.size() + 1 || tok.substr(0, key.size()) != key ||
      tok[key.size()] != '=')
    throw SyntaxError(at_line(line, "expected " + std::string(key) + "=<value>, got '" +
                                        std::string(tok) + "'"));
  return parse_number(tok.substr(key.size() + 1), line);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<std::string> Netlist::nodes() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& c : components)
    for (const auto* n : {&c.node_a, &c.node_b})
      if (seen.insert(*n).second) out.push_back(*n);
  return out;
}

Netlist parse_netlist(std::string_view text) {
  Netlist net;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tok = split_ws(line);
    if (tok.empty()) {
      if (end == text.size()) break;
      continue;
    }

    Component c;
    c.line = line_no;
    const std::string_view kind = tok[0];
    std::size_t expected = 4;
    if (kind == "C") {
      c.kind = ComponentKind::Capacitor;
    } else if (kind == "L") {
      c.kind = ComponentKind::Inductor;
    } else if (kind == "J") {
      c.kind = ComponentKind::Junction;
    } else if (kind == "SQ") {
      c.kind = ComponentKind::Squid;
      expected = 5;
    } else {
      throw SyntaxError(at_line(line_no, "unknown component '" + std::string(kind) + "'"));
    }
    if (tok.size() != expected)
      throw SyntaxError(at_line(line_no, "expected " + std::to_string(expected) +
                                             " fields, got " + std::to_string(tok.size())));
    c.node_a = std::string(tok[1]);
    c.node_b = std::string(tok[2]);
    switch (c.kind) {
      case ComponentKind::Capacitor:
      case ComponentKind::Inductor:
        c.value = parse_number(tok[3], line_no);
        break;
      case ComponentKind::Junction:
        c.value = parse_keyed(tok[3], "lj", line_no);
        break;
      case ComponentKind::Squid:
        c.value = parse_keyed(tok[3], "ej", line_no);
        c.asymmetry = parse_keyed(tok[4], "d", line_no);
        if (c.asymmetry < 0.0 || c.asymmetry >= 1.0)
          throw ValueError(at_line(line_no, "SQUID asymmetry must satisfy 0 <= d < 1"));
        break;
    }
    if (!(c.value > 0.0)) throw ValueError(at_line(line_no, "component value must be positive"));
    if (c.node_a == c.node_b)
      throw ValueError(at_line(line_no, "component connects node '" + c.node_a + "' to itself"));
    net.components.push_back(std::move(c));
    if (end == text.size()) break;
  }

  if (net.components.empty()) throw TopologyError("netlist contains no components");

  // Connectivity and ground.
  const auto nodes = net.nodes();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) index[nodes[i]] = i;
  if (!index.count(std::string(ground_node))) throw TopologyError("netlist has no ground node \"0\"");
  std::vector<std::size_t> parent(nodes.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& c : net.components) parent[find(index[c.node_a])] = find(index[c.node_b]);
  const std::size_t root = find(index[std::string(ground_node)]);
  for (const auto& n : nodes)
    if (find(index[n]) != root) throw TopologyError("node '" + n + "' is not connected to ground");
  return net;
}

std::string serialize_netlist(const Netlist& n) {
  std::ostringstream os;
  for (const auto& c : n.components) {
    switch (c.kind) {
      case ComponentKind::Capacitor:
        os << "C " << c.node_a << ' ' << c.node_b << ' ' << format_double(c.value) << '\n';
        break;
      case ComponentKind::Inductor:
        os << "L " << c.node_a << ' ' << c.node_b << ' ' << format_double(c.value) << '\n';
        break;
      case ComponentKind::Junction:
        os << "J " << c.node_a << ' ' << c.node_b << " lj=" << format_double(c.value) << '\n';
        break;
      case ComponentKind::Squid:
        os << "SQ " << c.node_a << ' ' << c.node_b << " ej=" << format_double(c.value)
           << " d=" << format_double(c.asymmetry) << '\n';
        break;
    }
  }
  return os.str();
}

void ReducedCircuit::validate() const {
  if (!(C_a > 0.0 && C_c > 0.0 && C_r > 0.0 && L_0 > 0.0))
    throw ValueError("capacitances and inductance must be positive");
  if (!(E_J_max_over_h > 0.0)) throw ValueError("Josephson energy must be positive");
  if (d < 0.0 || d >= 1.0) throw ValueError("SQUID asymmetry must satisfy 0 <= d < 1");
}

double fold_offset_charge(double n_env) {
  double f = n_env - std::floor(n_env + 0.5);
  // floor(x + 0.5) sends +0.5 to -0.5; keep the sign of the input at the edge.
  if (f == -0.5 && n_env > 0.0) f = 0.5;
  return f;
}

double josephson_energy_from_inductance(double L_J) {
  const double phi0 = constants::reduced_flux_quantum;
  return phi0 * phi0 / L_J / constants::h;
}

double josephson_inductance_from_energy(double E_J_over_h) {
  const double phi0 = constants::reduced_flux_quantum;
  return phi0 * phi0 / (E_J_over_h * constants::h);
}

ReducedCircuit reduce_to_transmon_resonator(const Netlist& n) {
  const std::string gnd(ground_node);
  ReducedCircuit rc;

  const Component* junction = nullptr;
  const Component* inductor = nullptr;
  for (const auto& c : n.components) {
    if (c.kind == ComponentKind::Junction || c.kind == ComponentKind::Squid) {
      if (junction) throw UnsupportedTopology("more than one Josephson element");
      junction = &c;
    } else if (c.kind == ComponentKind::Inductor) {
      if (inductor) throw UnsupportedTopology("more than one inductor in the resonator branch");
      inductor = &c;
    }
  }
  if (!junction) throw UnsupportedTopology("no Josephson element found");
  if (!inductor) throw UnsupportedTopology("no resonator inductor found");
  if (junction->node_a != gnd && junction->node_b != gnd)
    throw UnsupportedTopology("Josephson element between '" + junction->node_a + "' and '" +
                              junction->node_b + "' is not grounded");
  if (inductor->node_a != gnd && inductor->node_b != gnd)
    throw UnsupportedTopology("inductor between '" + inductor->node_a + "' and '" +
                              inductor->node_b + "' is not grounded");
  rc.transmon_node = junction->node_a == gnd ? junction->node_b : junction->node_a;
  rc.resonator_node = inductor->node_a == gnd ? inductor->node_b : inductor->node_a;
  if (rc.transmon_node == rc.resonator_node)
    throw UnsupportedTopology("junction and inductor share node '" + rc.transmon_node + "'");

  const std::string& T = rc.transmon_node;
  const std::string& R = rc.resonator_node;

  // Capacitances accumulated per unordered node pair.
  std::map<std::pair<std::string, std::string>, double> caps;
  auto key = [](const std::string& a, const std::string& b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
  };
  std::set<std::string> internal;
  for (const auto& c : n.components) {
    for (const auto* node : {&c.node_a, &c.node_b})
      if (*node != gnd && *node != T && *node != R) internal.insert(*node);
    if (c.kind == ComponentKind::Capacitor) caps[key(c.node_a, c.node_b)] += c.value;
  }
  if (internal.size() > 1) {
    std::string names;
    for (const auto& s : internal) names += (names.empty() ? "" : ", ") + s;
    throw UnsupportedTopology("more than one intermediate node (" + names + ")");
  }
  if (internal.size() == 1) {
    const std::string X = *internal.begin();
    for (const auto& c : n.components)
      if ((c.node_a == X || c.node_b == X) && c.kind != ComponentKind::Capacitor)
        throw UnsupportedTopology("intermediate node '" + X + "' carries a non-capacitive element");
    // Star (X to T, R, ground) to delta on the remaining three nodes.
    const double c_t = caps[key(X, T)];
    const double c_r = caps[key(X, R)];
    const double c_g = caps[key(X, gnd)];
    const double total = c_t + c_r + c_g;
    if (!(total > 0.0)) throw UnsupportedTopology("intermediate node '" + X + "' is floating");
    caps[key(T, R)] += c_t * c_r / total;
    caps[key(T, gnd)] += c_t * c_g / total;
    caps[key(R, gnd)] += c_r * c_g / total;
  }

  rc.C_a = caps[key(T, gnd)];
  rc.C_c = caps[key(T, R)];
  rc.C_r = caps[key(R, gnd)];
  if (!(rc.C_c > 0.0))
    throw UnsupportedTopology("no capacitive coupling between transmon node '" + T +
                              "' and resonator node '" + R + "'");
  if (!(rc.C_a > 0.0)) throw UnsupportedTopology("transmon node '" + T + "' has no shunt capacitance");
  if (!(rc.C_r > 0.0)) throw UnsupportedTopology("resonator node '" + R + "' has no capacitance to ground");

  rc.L_0 = inductor->value;
  if (junction->kind == ComponentKind::Junction) {
    rc.E_J_max_over_h = josephson_energy_from_inductance(junction->value);
    rc.d = 0.0;
  } else {
    rc.E_J_max_over_h = junction->value;
    rc.d = junction->asymmetry;
  }
  return rc;
}

Netlist make_netlist(const ReducedCircuit& rc) {
  const std::string gnd(ground_node);
  const std::string T = rc.transmon_node.empty() ? "1" : rc.transmon_node;
  const std::string R = rc.resonator_node.empty() ? "2" : rc.resonator_node;
  Netlist n;
  n.components.push_back({ComponentKind::Capacitor, T, gnd, rc.C_a, 0.0, 1});
  n.components.push_back({ComponentKind::Capacitor, T, R, rc.C_c, 0.0, 2});
  n.components.push_back({ComponentKind::Capacitor, R, gnd, rc.C_r, 0.0, 3});
  n.components.push_back({ComponentKind::Inductor, R, gnd, rc.L_0, 0.0, 4});
  if (rc.d == 0.0)
    n.components.push_back(
        {ComponentKind::Junction, T, gnd, josephson_inductance_from_energy(rc.E_J_max_over_h), 0.0, 5});
  else
    n.components.push_back({ComponentKind::Squid, T, gnd, rc.E_J_max_over_h, rc.d, 5});
  return n;
}

}  // namespace cqed
