#pragma once

#include <numbers>

// SI values (CODATA 2018).
namespace cqed::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double h = 6.62607015e-34;
inline constexpr double hbar = h / two_pi;
inline constexpr double e = 1.602176634e-19;
inline constexpr double k_B = 1.380649e-23;
inline constexpr double c = 299792458.0;
inline constexpr double epsilon_0 = 8.8541878128e-12;
inline constexpr double G = 6.67430e-11;
inline constexpr double m_u = 1.66053906660e-27;

// Superconducting flux quantum h/2e and its reduced form hbar/2e.
inline constexpr double flux_quantum = h / (2.0 * e);
inline constexpr double reduced_flux_quantum = hbar / (2.0 * e);

}  // namespace cqed::constants
