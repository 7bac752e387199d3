#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "phi4ion/gap.hpp"
#include "phi4ion/lattice.hpp"
#include "phi4ion/loops.hpp"

namespace phi4ion::ions {

struct IonChainSpec {
    int n_ions;
    double mass;               // kg
    double axial_freq;         // omega_x, rad/s
    double transverse_freq_y;  // rad/s
    double transverse_freq_z;  // rad/s
    int charge = 1;            // elementary charges

    static IonChainSpec species(std::string_view name, int n_ions, double axial_freq,
                                double transverse_freq_y, double transverse_freq_z);
};

/// Warns (does not error) when the chain is not deep in the linear regime.
std::optional<std::string> linear_regime_warning(const IonChainSpec& spec);

/// Characteristic length l, l^3 = q^2 e^2/(4 pi eps0 m omega_x^2).
double length_scale(const IonChainSpec& spec);

struct EquilibriumConfig {
    std::vector<double> positions;  // axial coordinates in units of l, increasing
    double residual_norm;           // max-norm of the force vector
    double bulk_spacing;            // d/l, minimum pair distance
};

/// Solves the axial force balance x_i - sum_{j != i} sign(x_i - x_j)/(x_i - x_j)^2 = 0
/// by damped Newton iteration. Throws InstabilityError when the transverse
/// confinement is below the zigzag-critical value (linear chain required).
EquilibriumConfig solve_equilibrium(const IonChainSpec& spec, double tol = 1e-12,
                                    int max_iter = 200);

/// kappa_{z,c} = (2/7) (d/l)^3 / zeta_{N1}(3).
double classical_critical_kappa(int n_ions, double bulk_spacing);

struct NormalModeSet {
    std::vector<double> frequencies;  // rad/s, sorted descending
    Eigen::MatrixXd mode_matrix;      // column n = mode n (matching frequencies)
};

/// Diagonalizes the transverse (z) Hessian of the crystal.
NormalModeSet transverse_normal_modes(const EquilibriumConfig& eq, const IonChainSpec& spec);

enum class CouplingProvenance { Exact, CoarseGrained, Renormalized };

struct SpinCouplingMatrix {
    Eigen::MatrixXd j;  // J_ij / hbar, rad/s; symmetric, zero diagonal
    CouplingProvenance provenance;
};

/// Phonon-mediated couplings from the exact normal modes,
/// J_ij = |Omega_L|^2 E_R sum_n M_in M_jn / (dw_L^2 - w_n^2).
/// rabi and detuning in rad/s, recoil energy in J.
SpinCouplingMatrix exact_spin_couplings(const IonChainSpec& spec, const NormalModeSet& modes,
                                        double rabi, double detuning, double recoil,
                                        double resonance_guard_rel = 1e-6);

/// Coarse-grained Yukawa-type couplings (dipolar + exponential) on the
/// inhomogeneous crystal positions. lamb_dicke is eta_x.
SpinCouplingMatrix coarse_grained_couplings(const IonChainSpec& spec, const EquilibriumConfig& eq,
                                            double detuning, double rabi, double lamb_dicke);

/// Same, with J_eff -> J_eff sqrt(z) and the Compton wavelength built from
/// the physical mass. Reduces bit-identically to coarse_grained_couplings
/// when mp.mp_sq equals the bare mbar0^2 and z = 1.
SpinCouplingMatrix renormalized_couplings(const IonChainSpec& spec, const EquilibriumConfig& eq,
                                          double detuning, double rabi, double lamb_dicke,
                                          const gap::PhysicalMassResult& mp);

/// Reduced bulk parameters of the chain (l/d from the solved crystal).
lattice::IonReducedParams ion_reduced_params(const IonChainSpec& spec,
                                             const EquilibriumConfig& eq);

/// Bose-Einstein occupation of a mode at temperature T (kelvin).
double mean_phonon_number(double mode_freq, double temperature);
/// Dimensionless version: mode at mbar (units of omega_x), temperature tbar.
double mean_phonon_number_dimensionless(double mbar, double tbar);
/// Inverse map T(nbar) = hbar w / (k_B ln(1 + 1/nbar)).
double temperature_for_nbar(double mode_freq, double nbar);

/// Ratio |g| sqrt(1 + 2 nbar) / sqrt(2 m w) / |w - dw_L|; values much less
/// than one certify the effective-spin-model regime.
double coupling_constraint_margin(double force_strength, double mode_freq, double nbar,
                                  double detuning, double mass);

struct PhaseMapCell {
    double omega_z;  // rad/s
    double tbar;
    bool valid;
    double mubar_sq;
    double mpbar_sq;
    double z;
    double xi_over_d;
    double nbar;
    double omega_zz_p;  // rad/s
};

struct PhaseMapGrid {
    std::vector<double> omega_z;  // rad/s
    std::vector<double> tbar;
    std::vector<PhaseMapCell> cells;  // index iz * tbar.size() + it
    std::vector<std::pair<double, double>> critical_curve;  // (omega_z, tbar) at m_P^2 = 0
    double lambdabar0;
    double bulk_spacing;
};

struct PhaseMapOptions {
    loops::MatsubaraTruncation trunc{64};
    int threads = 1;
    /// Optional spin-dependent force strength (N); when set, cells whose
    /// constraint margin at the renormalized zigzag mode exceeds margin_max
    /// are marked invalid.
    std::optional<double> force_strength;
    double margin_max = 0.1;
};

/// Physical-mass map over (omega_z, tbar): per cell the renormalized Compton
/// wavelength, zigzag frequency and phonon number; per-cell failures are
/// downgraded to invalid cells. detuning in rad/s.
PhaseMapGrid thermal_phase_map(const IonChainSpec& spec, const gap::GridSpec& omega_z_grid,
                               const gap::GridSpec& tbar_grid, double detuning,
                               PhaseMapOptions opts = {});

}  // namespace phi4ion::ions
