#include "phi4ion/constants.hpp"

#include <stdexcept>
#include <string>

namespace phi4ion::constants {

double ion_mass(std::string_view species) {
    // Atomic masses in u; the electron-mass correction is below the accuracy
    // of every trap parameter entering the pipelines.
    if (species == "40Ca+") return 39.962590866 * atomic_mass_unit;
    if (species == "24Mg+") return 23.985041697 * atomic_mass_unit;
    if (species == "9Be+") return 9.012183065 * atomic_mass_unit;
    if (species == "171Yb+") return 170.9363302 * atomic_mass_unit;
    throw std::invalid_argument("unknown ion species: " + std::string(species));
}

}  // namespace phi4ion::constants
