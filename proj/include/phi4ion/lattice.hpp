#pragma once

#include <variant>
#include <vector>

namespace phi4ion::lattice {

/// Nearest-neighbor Hamiltonian lattice regularization; natural units with
/// spacing a (a = 1 convention used throughout the batch pipelines).
struct NearestNeighbor {
    double spacing = 1.0;
};

/// Reduced microscopic parameters of a trapped-ion chain treated as a
/// homogeneous bulk lattice of spacing d.
struct IonReducedParams {
    double length_ratio;     // l/d
    double axial_freq;       // omega_x, rad/s
    double transverse_freq;  // omega_z, rad/s
    double luttinger;        // K0
    int n_sites;             // N1, even
};

struct TrappedIonDipolar {
    IonReducedParams ion;
};

/// Discretization choice plus site count; selects dispersion and propagator.
struct LatticeSpec {
    int n_sites;
    std::variant<NearestNeighbor, TrappedIonDipolar> regularization;

    static LatticeSpec nearest_neighbor(int n_sites, double spacing = 1.0);
    static LatticeSpec trapped_ion(const IonReducedParams& params);

    bool is_ion() const { return std::holds_alternative<TrappedIonDipolar>(regularization); }
    const IonReducedParams& ion() const { return std::get<TrappedIonDipolar>(regularization).ion; }
    double spacing() const { return std::get<NearestNeighbor>(regularization).spacing; }
};

/// Dimensionless couplings of the reduced ion problem. All masses are in
/// units of hbar*omega_x/c_t^2, temperatures in units of hbar*omega_x/k_B.
struct DimensionlessCouplings {
    double mbar0_sq;    // bare mass squared
    double lambdabar0;  // quartic coupling
    double tbar;        // temperature
    double mubar_sq;    // tadpole mass squared (0 until a gap equation is solved)
};

/// Lattice momentum of the nearest-neighbor discretization, (2/a) sin(ka/2).
double lattice_momentum(double k, double spacing);

/// Transverse phonon dispersion of the bulk ion chain, rad/s. `kd` is the
/// dimensionless phase k*d on the Brillouin grid 2*pi*n1/N1.
/// Throws InstabilityError on a negative radicand (beyond the zigzag
/// transition).
double ion_dispersion(double kd, const IonReducedParams& p);

/// Spatial part of the inverse ion propagator, rad^2/s^2. Built so that the
/// propagator pole at k0 -> -i*omega reproduces ion_dispersion exactly.
double ion_lattice_momentum_sq(double kd, const IonReducedParams& p);

/// Quasi-momentum phase of grid point n1 in {1, ..., N1}: 2*pi*n1/N1.
double brillouin_phase(int n1, int n_sites);

/// Frequencies omega(n1) = sqrt(khat^2 + mu^2) on the Brillouin grid together
/// with the per-loop measure constant of the regularization (1/a for
/// nearest-neighbor, (l/d)^{3/2} eta^{1/2} for the reduced ion problem).
struct ModeGrid {
    std::vector<double> omega;  // index n1-1, n1 = 1..N1
    double loop_c;
    double mu_sq;
};

/// Smallest mu^2 for which every grid frequency is real. Zero for the
/// nearest-neighbor lattice; positive for the dipolar one, whose khat^2 dips
/// slightly below zero at the zigzag point.
double mu_sq_floor(const LatticeSpec& spec);

/// Builds the mode grid; throws GaplessError if mu_sq is at or below the
/// stability floor.
ModeGrid mode_grid(const LatticeSpec& spec, double mu_sq);

/// Euclidean tadpole-resummed propagator. Nearest-neighbor: k and k0 in
/// lattice units. Ion: k is the phase k*d, k0 is in units of omega_x, and
/// mu_sq is the dimensionless mubar^2; the value is the dimensionless form
/// (SI value times (hbar*omega_x)^2). Throws PoleError on a non-positive
/// denominator.
double tadpole_propagator(double k0, double k, double mu_sq, const LatticeSpec& spec);

/// Reduction of SI trap parameters to the dimensionless couplings.
/// temperature in kelvin, mass in kg, spacing d in meters.
DimensionlessCouplings reduce_to_dimensionless(const IonReducedParams& p, double temperature,
                                               double mass, double spacing);

/// Inverse maps used by the round-trip identity checks.
double omega_z_from_mbar0_sq(double mbar0_sq, const IonReducedParams& p);
double temperature_from_tbar(double tbar, const IonReducedParams& p);

}  // namespace phi4ion::lattice
