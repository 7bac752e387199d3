#pragma once

#include "phi4ion/lattice.hpp"

namespace phi4ion::loops {

/// Truncation of the Matsubara sums: n0 runs over {-n_modes, ..., n_modes}.
struct MatsubaraTruncation {
    int n_modes;
};

enum class LoopMethod { ClosedForm, Truncated };

struct LoopResult {
    double value;
    LoopMethod method;
    int n_modes;  // truncation actually used (0 for closed forms)
};

/// Tadpole self-energy Sigma_td with the Matsubara sum done in closed form,
/// (lambda0 C / (4 N1)) sum_n1 coth(omega/2T)/omega. T = 0 uses the
/// zero-point branch coth -> 1. Units follow the regularization of `spec`
/// (lattice units, or the dimensionless ion reduction).
LoopResult tadpole_shift(double mu_sq, double temperature, double lambda0,
                         const lattice::LatticeSpec& spec);

/// Direct double sum over Matsubara modes and the spatial grid; converges to
/// tadpole_shift as the truncation grows. Requires T > 0.
LoopResult tadpole_shift_truncated(double mu_sq, double temperature, double lambda0,
                                   const lattice::LatticeSpec& spec, MatsubaraTruncation trunc);

/// Sunrise self-energy at zero external momentum, Matsubara sums in closed
/// form. Always <= 0.
LoopResult sunrise_mass_shift(double mu_sq, double temperature, double lambda0,
                              const lattice::LatticeSpec& spec);

/// Brute-force truncated double Matsubara sum of the sunrise shift (oracle
/// and convergence studies). Requires T > 0.
LoopResult sunrise_mass_shift_truncated(double mu_sq, double temperature, double lambda0,
                                        const lattice::LatticeSpec& spec,
                                        MatsubaraTruncation trunc);

/// Un-differentiated sunrise self-energy at external (k0, 0), truncated sums.
/// Used by the finite-difference oracle for the k0^2 derivative.
double sunrise_at_k0(double k0, double mu_sq, double temperature, double lambda0,
                     const lattice::LatticeSpec& spec, MatsubaraTruncation trunc);

/// d Sigma_sr / d k0^2 at vanishing external momentum: the exact derivative
/// of the truncated sunrise sum (integrand D1 D2 (D3^2 - 4 s^2 D3^3),
/// s = nu_{n0} + nu_{l0}). T = 0 evaluates the closed-form frequency
/// integrals instead and ignores the truncation. Positive in the regimes of
/// interest, so z < 1.
LoopResult sunrise_k0_derivative(double mu_sq, double temperature, double lambda0,
                                 const lattice::LatticeSpec& spec, MatsubaraTruncation trunc);

/// The same quantity with the integrand written as D1 D2 omega3^2 D3^3.
/// Kept separate because it does not agree with the finite difference of
/// sunrise_at_k0; see sunrise_derivative_discrepancy.
LoopResult sunrise_k0_derivative_displayed(double mu_sq, double temperature, double lambda0,
                                           const lattice::LatticeSpec& spec,
                                           MatsubaraTruncation trunc);

/// Relative difference between the displayed-form derivative and the exact
/// one at the same truncation; reported, not reconciled.
double sunrise_derivative_discrepancy(double mu_sq, double temperature, double lambda0,
                                      const lattice::LatticeSpec& spec, MatsubaraTruncation trunc);

/// Wave-function renormalization z = (1 + dSigma_sr/dk0^2)^{-1}.
double wavefunction_renorm(const LoopResult& deriv);

/// Sunrise kernel K(mu, T) = -Sigma_sr(0)/lambda0^2 > 0. The critical-line
/// routines use lambda0 = sqrt(mu^2 / K).
double sunrise_kernel(double mu_sq, double temperature, const lattice::LatticeSpec& spec);

}  // namespace phi4ion::loops
