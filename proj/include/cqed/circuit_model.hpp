#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cqed {

enum class ComponentKind { Capacitor, Inductor, Junction, Squid };

// One lumped element. `value` holds Farads (Capacitor), Henries (Inductor,
// Junction as L_J) or E_J/h in Hz (Squid, with `asymmetry` = d).
struct Component {
  ComponentKind kind;
  std::string node_a;
  std::string node_b;
  double value = 0.0;
  double asymmetry = 0.0;
  int line = 0;
};

struct Netlist {
  std::vector<Component> components;

  // Distinct node names in order of first appearance.
  std::vector<std::string> nodes() const;
};

inline constexpr std::string_view ground_node = "0";

Netlist parse_netlist(std::string_view text);
std::string serialize_netlist(const Netlist& n);

// Transmon island coupled to a single resonator branch through C_c.
struct ReducedCircuit {
  double C_a = 0.0;
  double C_c = 0.0;
  double C_r = 0.0;
  double L_0 = 0.0;
  double E_J_max_over_h = 0.0;
  double d = 0.0;
  double N_env = 0.0;
  std::string transmon_node;
  std::string resonator_node;

  void validate() const;
};

// Offset charge is 1-periodic; maps into [-0.5, 0.5].
double fold_offset_charge(double n_env);

// E_J/h for a junction of linear inductance L_J, using hbar/2e.
double josephson_energy_from_inductance(double L_J);
double josephson_inductance_from_energy(double E_J_over_h);

ReducedCircuit reduce_to_transmon_resonator(const Netlist& n);

// Writes the direct three-capacitor topology back out as a netlist.
Netlist make_netlist(const ReducedCircuit& rc);

}  // namespace cqed
