#pragma once

#include <string_view>

namespace phi4ion::constants {

// CODATA 2018 values, SI units.
inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double k_boltzmann = 1.380649e-23;    // J/K
inline constexpr double epsilon0 = 8.8541878128e-12;   // F/m
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg

/// e^2 / (4 pi eps0) in J m.
inline constexpr double coulomb_constant_e2() {
    return elementary_charge * elementary_charge / (4.0 * 3.14159265358979323846 * epsilon0);
}

/// Ion mass in kg for a species name ("40Ca+" built in). Throws on unknown
/// species.
double ion_mass(std::string_view species);

}  // namespace phi4ion::constants
