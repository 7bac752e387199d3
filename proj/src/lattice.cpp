#include "phi4ion/lattice.hpp"

#include <cmath>
#include <stdexcept>

#include "phi4ion/constants.hpp"
#include "phi4ion/errors.hpp"
#include "phi4ion/special_functions.hpp"

namespace phi4ion::lattice {

namespace {

void check_sites(int n_sites) {
    if (n_sites < 2 || n_sites % 2 != 0)
        throw std::invalid_argument("lattice: n_sites must be even and >= 2");
}

// Dipolar mode-sum sum_{r=1}^{N1/2} (4/r^3) sin^2(kd r/2).
double dipolar_sum(double kd, int n_sites) {
    double s = 0.0;
    for (int r = 1; r <= n_sites / 2; ++r) {
        const double sn = std::sin(0.5 * kd * r);
        s += 4.0 / (static_cast<double>(r) * r * r) * sn * sn;
    }
    return s;
}

}  // namespace

LatticeSpec LatticeSpec::nearest_neighbor(int n_sites, double spacing) {
    check_sites(n_sites);
    if (spacing <= 0.0) throw std::invalid_argument("lattice: spacing must be positive");
    return LatticeSpec{n_sites, NearestNeighbor{spacing}};
}

LatticeSpec LatticeSpec::trapped_ion(const IonReducedParams& params) {
    check_sites(params.n_sites);
    if (params.length_ratio <= 0.0 || params.axial_freq <= 0.0 || params.transverse_freq <= 0.0 ||
        params.luttinger <= 0.0)
        throw std::invalid_argument("lattice: ion parameters must be positive");
    return LatticeSpec{params.n_sites, TrappedIonDipolar{params}};
}

double lattice_momentum(double k, double spacing) {
    return 2.0 / spacing * std::sin(0.5 * k * spacing);
}

double ion_dispersion(double kd, const IonReducedParams& p) {
    const double kappa_z = (p.axial_freq / p.transverse_freq) * (p.axial_freq / p.transverse_freq);
    const double c3 = p.length_ratio * p.length_ratio * p.length_ratio;
    const double radicand = 1.0 - kappa_z * c3 * dipolar_sum(kd, p.n_sites);
    if (radicand < 0.0)
        throw InstabilityError("ion_dispersion: negative radicand, parameters beyond the zigzag transition");
    return p.transverse_freq * std::sqrt(radicand);
}

double ion_lattice_momentum_sq(double kd, const IonReducedParams& p) {
    const double c3 = p.length_ratio * p.length_ratio * p.length_ratio;
    const double wx2 = p.axial_freq * p.axial_freq;
    const double zeta3 = sf::truncated_zeta(3.0, {p.n_sites / 2});
    return wx2 * c3 * (3.5 * zeta3 - dipolar_sum(kd, p.n_sites));
}

double brillouin_phase(int n1, int n_sites) { return 2.0 * M_PI * n1 / n_sites; }

double mu_sq_floor(const LatticeSpec& spec) {
    if (!spec.is_ion()) return 0.0;
    const IonReducedParams& p = spec.ion();
    const double wx2 = p.axial_freq * p.axial_freq;
    double lo = 0.0;
    for (int n1 = 1; n1 <= spec.n_sites; ++n1)
        lo = std::min(lo, ion_lattice_momentum_sq(brillouin_phase(n1, spec.n_sites), p) / wx2);
    return -lo;
}

ModeGrid mode_grid(const LatticeSpec& spec, double mu_sq) {
    const int n = spec.n_sites;
    ModeGrid grid;
    grid.omega.resize(n);
    grid.mu_sq = mu_sq;
    if (spec.is_ion()) {
        const IonReducedParams& p = spec.ion();
        const double wx2 = p.axial_freq * p.axial_freq;
        const double c3 = p.length_ratio * p.length_ratio * p.length_ratio;
        grid.loop_c = std::sqrt(c3 * sf::truncated_eta(1.0, {n / 2}));
        for (int n1 = 1; n1 <= n; ++n1) {
            const double w2 = ion_lattice_momentum_sq(brillouin_phase(n1, n), p) / wx2 + mu_sq;
            if (w2 <= 0.0)
                throw GaplessError("mode_grid: mu^2 at or below the dipolar stability floor");
            grid.omega[n1 - 1] = std::sqrt(w2);
        }
    } else {
        const double a = spec.spacing();
        grid.loop_c = 1.0 / a;
        if (mu_sq <= 0.0) throw GaplessError("mode_grid: need mu^2 > 0");
        for (int n1 = 1; n1 <= n; ++n1) {
            const double khat = 2.0 / a * std::sin(M_PI * n1 / n);
            grid.omega[n1 - 1] = std::sqrt(khat * khat + mu_sq);
        }
    }
    return grid;
}

double tadpole_propagator(double k0, double k, double mu_sq, const LatticeSpec& spec) {
    double denom;
    if (spec.is_ion()) {
        const IonReducedParams& p = spec.ion();
        const double wx2 = p.axial_freq * p.axial_freq;
        denom = k0 * k0 + ion_lattice_momentum_sq(k, p) / wx2 + mu_sq;
    } else {
        const double khat = lattice_momentum(k, spec.spacing());
        denom = k0 * k0 + khat * khat + mu_sq;
    }
    if (denom <= 0.0) throw PoleError("tadpole_propagator: non-positive denominator");
    return 1.0 / denom;
}

DimensionlessCouplings reduce_to_dimensionless(const IonReducedParams& p, double temperature,
                                               double mass, double spacing) {
    if (temperature < 0.0 || mass <= 0.0 || spacing <= 0.0)
        throw std::invalid_argument("reduce_to_dimensionless: inputs must be positive");
    const int half = p.n_sites / 2;
    const double zeta3 = sf::truncated_zeta(3.0, {half});
    const double zeta5 = sf::truncated_zeta(5.0, {half});
    const double eta1 = sf::truncated_eta(1.0, {half});
    const double c3 = p.length_ratio * p.length_ratio * p.length_ratio;
    const double ratio = p.transverse_freq / p.axial_freq;
    DimensionlessCouplings out;
    out.mbar0_sq = ratio * ratio - 3.5 * c3 * zeta3;
    out.lambdabar0 = 0.5 * 729.0 * zeta5 *
                     (constants::hbar / (mass * p.axial_freq * spacing * spacing)) *
                     std::pow(p.length_ratio, 1.5) / std::sqrt(eta1);
    out.tbar = constants::k_boltzmann * temperature / (constants::hbar * p.axial_freq);
    out.mubar_sq = 0.0;
    return out;
}

double omega_z_from_mbar0_sq(double mbar0_sq, const IonReducedParams& p) {
    const double zeta3 = sf::truncated_zeta(3.0, {p.n_sites / 2});
    const double c3 = p.length_ratio * p.length_ratio * p.length_ratio;
    return p.axial_freq * std::sqrt(mbar0_sq + 3.5 * c3 * zeta3);
}

double temperature_from_tbar(double tbar, const IonReducedParams& p) {
    return tbar * constants::hbar * p.axial_freq / constants::k_boltzmann;
}

}  // namespace phi4ion::lattice
