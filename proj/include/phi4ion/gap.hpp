#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phi4ion/lattice.hpp"
#include "phi4ion/loops.hpp"

namespace phi4ion::gap {

struct SolverOptions {
    double tol = 1e-10;
    int max_iter = 500;
    double damping = 0.5;
};

/// Converged tadpole-renormalized mass with its inputs and diagnostics.
struct GapSolution {
    double mu_sq;
    double m0_sq;
    double lambda0;
    double temperature;
    double sigma_td;
    int iterations;
    double residual;
};

struct PhysicalMassResult {
    double mp_sq;
    double z;
    double sigma_sr0;
    double dsigma_dk0sq;
};

struct CriticalPoint {
    double mu_sq;
    double lambda0;
    double m0_sq;
};

struct CriticalLine {
    double temperature;
    std::vector<CriticalPoint> points;  // ordered by mu_sq
};

struct ContourRow {
    double temperature;
    double m0_sq;
    double mu_sq;
    double mp_sq;
    double z;
};

struct MassContour {
    double lambda0;
    std::vector<ContourRow> rows;
};

struct GridSpec {
    double lo;
    double hi;
    int points;
    bool log_spacing = false;

    std::vector<double> values() const;
};

/// Solves mu^2 = m0^2 + Sigma_td(mu^2) by damped fixed-point iteration with a
/// bisection fallback. lambda0 = 0 returns mu^2 = m0^2 in one step. Throws
/// ConvergenceError past max_iter and GaplessError when no positive-mu^2
/// fixed point exists.
GapSolution solve_gap(double m0_sq, double lambda0, double temperature,
                      const lattice::LatticeSpec& spec, SolverOptions opts = {});

/// m_P^2 = z (mu^2 + Sigma_sr(0)) with z from the k0^2 derivative of the
/// sunrise diagram. T = 0 uses all closed forms and ignores `trunc`.
PhysicalMassResult physical_mass(double mu_sq, double lambda0, double temperature,
                                 const lattice::LatticeSpec& spec,
                                 loops::MatsubaraTruncation trunc = {64});

/// Fixed-T critical line traced in the inverse direction: for each mu^2 the
/// critical coupling is lambda0 = sqrt(mu^2 / K(mu, T)) and
/// m0^2 = mu^2 - Sigma_td. No iteration is needed.
CriticalLine trace_critical_line(double temperature, const GridSpec& mu_sq_grid,
                                 const lattice::LatticeSpec& spec, int threads = 1);

struct ContourOptions {
    double step_factor = 0.1;       // c in eps = c * m_P^2 / (1 + T a)^{1/3}
    double min_step = 1e-14;
    /// The proportional step decays geometrically near a massless endpoint;
    /// a scan terminates cleanly once m_P^2 falls below this fraction of its
    /// starting scale (relevant for lambda0 = 0, where m_P^2 never crosses
    /// zero).
    double mp_sq_stop_rel = 1e-9;
    loops::MatsubaraTruncation trunc{64};
};

/// Descends mu^2 from mu_sq_start at each temperature of the interval,
/// recording (m0^2, mu^2, m_P^2, z) rows while m_P^2 z^{-1} >= 0.
MassContour trace_mass_contour(double lambda0, const GridSpec& temperature_grid,
                               double mu_sq_start, const lattice::LatticeSpec& spec,
                               ContourOptions opts = {}, int threads = 1);

struct FitResult {
    std::string model;       // e.g. "f = c0 + c1 x"
    double f_c;              // extrapolated intercept
    double f_c_err;          // 1-sigma from the LS covariance
    std::vector<double> coeffs;
    double residual_rms;
    bool ill_conditioned;
};

struct CriticalRatioResult {
    double naive_slope;              // linear fit of lambda0 vs mu^2
    std::vector<FitResult> fits;     // the three x -> f(x) models
    std::vector<double> lambda0;     // points along the T = 0 line
    std::vector<double> f;           // lambda0 / mu^2
    std::vector<double> mu_sq;
};

/// Critical ratio f = lambda0/mu^2 along the T = 0 critical line,
/// extrapolated to lambda0 a^2 -> 0 with the three fit models
/// f1 = c0 + c1 x, f2 = c0 + c1 x + c2 x ln x, f3 = c0 + c1 x ln x.
CriticalRatioResult critical_ratio_lattice(int n_sites, const GridSpec& mu_sq_grid,
                                           double temperature = 0.0, int threads = 1);

/// Continuum critical ratio f_c = sqrt(6 (2 pi)^4 / I) with I from the
/// trigamma closed form.
double critical_ratio_continuum();

/// The trigamma combination I itself (for the quadrature cross-check).
double critical_ratio_integral();

enum class CrossingPlane { BareMass, TadpoleMass };

struct Crossing {
    double m0_sq;   // abscissa in the chosen plane
    double lambda0;
};

struct CrossingReport {
    std::vector<Crossing> crossings;
    bool identical_lines = false;
    std::string note;
};

/// Piecewise-linear intersections of two critical lines in the
/// (m0^2, lambda0) or (mu^2, lambda0) plane.
CrossingReport detect_crossings(const CriticalLine& a, const CriticalLine& b,
                                CrossingPlane plane = CrossingPlane::BareMass);

}  // namespace phi4ion::gap
