#include "phi4ion/ion_chain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "phi4ion/constants.hpp"
#include "phi4ion/errors.hpp"
#include "phi4ion/special_functions.hpp"
#include "phi4ion/util.hpp"

namespace phi4ion::ions {

namespace {

namespace cn = phi4ion::constants;

void check_spec(const IonChainSpec& spec) {
    if (spec.n_ions < 1) throw std::invalid_argument("ion chain: need at least one ion");
    if (spec.mass <= 0.0 || spec.axial_freq <= 0.0 || spec.transverse_freq_y <= 0.0 ||
        spec.transverse_freq_z <= 0.0 || spec.charge < 1)
        throw std::invalid_argument("ion chain: trap parameters must be positive");
}

// Dimensionless force F_i = x_i - sum_{j != i} sign(x_i - x_j)/(x_i - x_j)^2.
Eigen::VectorXd force(const Eigen::VectorXd& x) {
    const int n = static_cast<int>(x.size());
    Eigen::VectorXd f = x;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double d = x[i] - x[j];
            f[i] -= (d > 0 ? 1.0 : -1.0) / (d * d);
        }
    return f;
}

// Coupling matrix of the transverse Hessian in units of omega_x^2:
// B_ii = sum_{j != i} 1/|dx|^3, B_ij = -1/|dx|^3.
Eigen::MatrixXd dipole_matrix(const std::vector<double>& pos) {
    const int n = static_cast<int>(pos.size());
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double inv3 = 1.0 / std::pow(std::abs(pos[i] - pos[j]), 3);
            b(i, j) = -inv3;
            b(i, i) += inv3;
        }
    return b;
}

}  // namespace

IonChainSpec IonChainSpec::species(std::string_view name, int n_ions, double axial_freq,
                                   double transverse_freq_y, double transverse_freq_z) {
    IonChainSpec spec{n_ions, cn::ion_mass(name), axial_freq, transverse_freq_y,
                      transverse_freq_z, 1};
    check_spec(spec);
    return spec;
}

std::optional<std::string> linear_regime_warning(const IonChainSpec& spec) {
    const double r = std::min(spec.transverse_freq_y, spec.transverse_freq_z) / spec.axial_freq;
    if (r < 3.0)
        return "transverse/axial frequency ratio " + std::to_string(r) +
               " is small; the linear-chain description may be marginal";
    return std::nullopt;
}

double length_scale(const IonChainSpec& spec) {
    const double q2 = static_cast<double>(spec.charge) * spec.charge;
    return std::cbrt(q2 * cn::coulomb_constant_e2() /
                     (spec.mass * spec.axial_freq * spec.axial_freq));
}

EquilibriumConfig solve_equilibrium(const IonChainSpec& spec, double tol, int max_iter) {
    check_spec(spec);
    const int n = spec.n_ions;
    if (n == 1) return {{0.0}, 0.0, std::numeric_limits<double>::infinity()};

    // Uniformly spaced start; rescale the span until the net force on the
    // outermost ion changes sign, which brackets a sensible scale.
    Eigen::VectorXd base(n);
    for (int i = 0; i < n; ++i) base[i] = -1.0 + 2.0 * i / (n - 1);
    auto outer_force = [&](double s) { return force((s * base).eval())[n - 1]; };
    double s_lo = 0.5 * std::pow(n, 0.56), s_hi = s_lo;
    for (int it = 0; it < 200 && outer_force(s_lo) > 0.0; ++it) s_lo *= 0.5;
    for (int it = 0; it < 200 && outer_force(s_hi) < 0.0; ++it) s_hi *= 2.0;
    for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (s_lo + s_hi);
        (outer_force(mid) < 0.0 ? s_lo : s_hi) = mid;
    }
    Eigen::VectorXd x = 0.5 * (s_lo + s_hi) * base;

    int iter = 0;
    Eigen::VectorXd f = force(x);
    for (; iter < max_iter; ++iter) {
        if (f.lpNorm<Eigen::Infinity>() <= tol) break;
        Eigen::MatrixXd jac = Eigen::MatrixXd::Identity(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                const double inv3 = 2.0 / std::pow(std::abs(x[i] - x[j]), 3);
                jac(i, j) = -inv3;
                jac(i, i) += inv3;
            }
        const Eigen::VectorXd step = jac.ldlt().solve(f);
        // Backtracking on ||F||^2; also keep the ordering intact.
        double alpha = 1.0;
        const double f2 = f.squaredNorm();
        for (int bt = 0; bt < 60; ++bt) {
            Eigen::VectorXd trial = x - alpha * step;
            std::sort(trial.data(), trial.data() + n);
            const Eigen::VectorXd ft = force(trial);
            if (ft.squaredNorm() < f2) {
                x = trial;
                f = ft;
                break;
            }
            alpha *= 0.5;
            if (bt == 59) throw ConvergenceError("solve_equilibrium: line search failed");
        }
    }
    if (f.lpNorm<Eigen::Infinity>() > tol)
        throw ConvergenceError("solve_equilibrium: no convergence after max_iter Newton steps");

    // Enforce the exact inversion symmetry of the crystal.
    Eigen::VectorXd sym(n);
    for (int i = 0; i < n; ++i) sym[i] = 0.5 * (x[i] - x[n - 1 - i]);
    EquilibriumConfig out;
    out.positions.assign(sym.data(), sym.data() + n);
    out.residual_norm = force(sym).lpNorm<Eigen::Infinity>();
    double dmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i + 1 < n; ++i) dmin = std::min(dmin, out.positions[i + 1] - out.positions[i]);
    out.bulk_spacing = dmin;

    // Linear-chain precondition: the lowest transverse eigenvalue must be
    // positive for both transverse branches.
    const Eigen::MatrixXd b = dipole_matrix(out.positions);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b, Eigen::EigenvaluesOnly);
    const double lam_max = es.eigenvalues().maxCoeff();
    const double wmin = std::min(spec.transverse_freq_y, spec.transverse_freq_z);
    if (wmin * wmin <= spec.axial_freq * spec.axial_freq * lam_max)
        throw InstabilityError(
            "solve_equilibrium: transverse confinement below the zigzag-critical value");
    return out;
}

double classical_critical_kappa(int n_ions, double bulk_spacing) {
    if (n_ions < 2 || n_ions % 2 != 0)
        throw std::invalid_argument("classical_critical_kappa: n_ions must be even and >= 2");
    if (bulk_spacing <= 0.0)
        throw std::invalid_argument("classical_critical_kappa: need bulk_spacing > 0");
    const double zeta3 = sf::truncated_zeta(3.0, {n_ions / 2});
    return 2.0 / 7.0 * std::pow(bulk_spacing, 3) / zeta3;
}

NormalModeSet transverse_normal_modes(const EquilibriumConfig& eq, const IonChainSpec& spec) {
    const int n = static_cast<int>(eq.positions.size());
    const double wz2 = spec.transverse_freq_z * spec.transverse_freq_z;
    const double wx2 = spec.axial_freq * spec.axial_freq;
    Eigen::MatrixXd h = -wx2 * dipole_matrix(eq.positions);
    h.diagonal().array() += wz2;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw InstabilityError("transverse_normal_modes: negative eigenvalue (zigzag unstable)");

    NormalModeSet modes;
    modes.frequencies.resize(n);
    modes.mode_matrix.resize(n, n);
    // Descending frequencies; deterministic sign (largest component positive).
    for (int c = 0; c < n; ++c) {
        const int src = n - 1 - c;
        modes.frequencies[c] = std::sqrt(es.eigenvalues()[src]);
        Eigen::VectorXd v = es.eigenvectors().col(src);
        int imax = 0;
        for (int i = 1; i < n; ++i)
            if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
        if (v[imax] < 0.0) v = -v;
        modes.mode_matrix.col(c) = v;
    }
    return modes;
}

SpinCouplingMatrix exact_spin_couplings(const IonChainSpec& spec, const NormalModeSet& modes,
                                        double rabi, double detuning, double recoil,
                                        double resonance_guard_rel) {
    const int n = static_cast<int>(modes.frequencies.size());
    const double guard = resonance_guard_rel * spec.axial_freq;
    for (double w : modes.frequencies)
        if (std::abs(detuning - w) < guard)
            throw ResonanceError("exact_spin_couplings: beatnote within the resonance guard band");

    Eigen::VectorXd denom(n);
    for (int k = 0; k < n; ++k)
        denom[k] = detuning * detuning - modes.frequencies[k] * modes.frequencies[k];
    SpinCouplingMatrix out;
    out.provenance = CouplingProvenance::Exact;
    out.j = Eigen::MatrixXd::Zero(n, n);
    const double pref = rabi * rabi * recoil / cn::hbar;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k)
                s += modes.mode_matrix(i, k) * modes.mode_matrix(j, k) / denom[k];
            out.j(i, j) = pref * s;
            out.j(j, i) = out.j(i, j);
        }
    return out;
}

namespace {

// Shared core of the coarse-grained and renormalized couplings. meff_bar_sq
// is the squared effective mass in units of omega_x, amplitude_scale the
// sqrt(z) factor.
SpinCouplingMatrix yukawa_couplings(const IonChainSpec& spec, const EquilibriumConfig& eq,
                                    double detuning, double rabi, double lamb_dicke,
                                    double meff_bar_sq, double amplitude_scale,
                                    CouplingProvenance provenance) {
    if (meff_bar_sq <= 0.0)
        throw SoftModeError("yukawa couplings: detuning at or beyond the soft mode");
    const int n = static_cast<int>(eq.positions.size());
    const double l = length_scale(spec);
    const double d = eq.bulk_spacing * l;
    const double wx = spec.axial_freq;
    const double wz = spec.transverse_freq_z;
    const double eta1 = sf::truncated_eta(1.0, {spec.n_ions / 2});
    const double c3 = std::pow(l / d, 3);
    const double xi = d * std::sqrt(c3 * eta1) / std::sqrt(meff_bar_sq);

    const double j_eff = amplitude_scale * rabi * rabi * lamb_dicke * lamb_dicke / wx * 2.0 / eta1;
    const double dipolar_pref =
        std::pow(wx, 4) * eta1 / std::pow(wz * wz - detuning * detuning, 2);

    SpinCouplingMatrix out;
    out.provenance = provenance;
    out.j = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double r = std::abs(eq.positions[i] - eq.positions[j]) * l;
            const double sign = ((i - j) % 2 == 0) ? 1.0 : -1.0;
            const double val =
                j_eff * (dipolar_pref * l * l * l / (r * r * r) -
                         sign * (xi * d * d / (l * l * l)) * std::exp(-r / xi));
            out.j(i, j) = val;
            out.j(j, i) = val;
        }
    return out;
}

}  // namespace

SpinCouplingMatrix coarse_grained_couplings(const IonChainSpec& spec, const EquilibriumConfig& eq,
                                            double detuning, double rabi, double lamb_dicke) {
    const auto p = ion_reduced_params(spec, eq);
    const double zeta3 = sf::truncated_zeta(3.0, {spec.n_ions / 2});
    const double c3 = std::pow(p.length_ratio, 3);
    const double mbar0_sq =
        std::pow(spec.transverse_freq_z / spec.axial_freq, 2) - 3.5 * c3 * zeta3;
    const double dw = detuning / spec.axial_freq;
    return yukawa_couplings(spec, eq, detuning, rabi, lamb_dicke, mbar0_sq - dw * dw, 1.0,
                            CouplingProvenance::CoarseGrained);
}

SpinCouplingMatrix renormalized_couplings(const IonChainSpec& spec, const EquilibriumConfig& eq,
                                          double detuning, double rabi, double lamb_dicke,
                                          const gap::PhysicalMassResult& mp) {
    const double dw = detuning / spec.axial_freq;
    return yukawa_couplings(spec, eq, detuning, rabi, lamb_dicke, mp.mp_sq - dw * dw,
                            std::sqrt(mp.z), CouplingProvenance::Renormalized);
}

lattice::IonReducedParams ion_reduced_params(const IonChainSpec& spec,
                                             const EquilibriumConfig& eq) {
    const double l = length_scale(spec);
    const double d = eq.bulk_spacing * l;
    const double eta1 = sf::truncated_eta(1.0, {spec.n_ions / 2});
    const double ct = d * spec.axial_freq * std::pow(l / d, 1.5) * std::sqrt(eta1);
    lattice::IonReducedParams p;
    p.length_ratio = l / d;
    p.axial_freq = spec.axial_freq;
    p.transverse_freq = spec.transverse_freq_z;
    p.luttinger = spec.mass * d * ct / cn::hbar;
    p.n_sites = spec.n_ions;
    return p;
}

double mean_phonon_number(double mode_freq, double temperature) {
    if (mode_freq <= 0.0) throw std::invalid_argument("mean_phonon_number: need mode_freq > 0");
    if (temperature < 0.0) throw std::invalid_argument("mean_phonon_number: need T >= 0");
    if (temperature == 0.0) return 0.0;
    return 1.0 / std::expm1(cn::hbar * mode_freq / (cn::k_boltzmann * temperature));
}

double mean_phonon_number_dimensionless(double mbar, double tbar) {
    if (mbar <= 0.0) throw std::invalid_argument("mean_phonon_number: need mbar > 0");
    if (tbar < 0.0) throw std::invalid_argument("mean_phonon_number: need tbar >= 0");
    if (tbar == 0.0) return 0.0;
    return 1.0 / std::expm1(mbar / tbar);
}

double temperature_for_nbar(double mode_freq, double nbar) {
    if (nbar < 0.0) throw std::invalid_argument("temperature_for_nbar: need nbar >= 0");
    if (nbar == 0.0) return 0.0;
    return cn::hbar * mode_freq / (cn::k_boltzmann * std::log1p(1.0 / nbar));
}

double coupling_constraint_margin(double force_strength, double mode_freq, double nbar,
                                  double detuning, double mass) {
    if (mode_freq <= 0.0 || mass <= 0.0 || nbar < 0.0)
        throw std::invalid_argument("coupling_constraint_margin: bad arguments");
    const double gap = std::abs(mode_freq - detuning);
    if (gap == 0.0)
        throw ResonanceError("coupling_constraint_margin: zero detuning gap");
    return std::abs(force_strength) * std::sqrt(1.0 + 2.0 * nbar) /
           std::sqrt(2.0 * mass * mode_freq) / gap;
}

PhaseMapGrid thermal_phase_map(const IonChainSpec& spec, const gap::GridSpec& omega_z_grid,
                               const gap::GridSpec& tbar_grid, double detuning,
                               PhaseMapOptions opts) {
    const EquilibriumConfig eq = solve_equilibrium(spec);
    const lattice::IonReducedParams base = ion_reduced_params(spec, eq);
    const double dw_bar = detuning / spec.axial_freq;
    const double eta1 = sf::truncated_eta(1.0, {spec.n_ions / 2});
    const double c3 = std::pow(base.length_ratio, 3);
    const double xi_pref = std::sqrt(c3 * eta1);  // xi/d = xi_pref / meff_bar
    const double l = length_scale(spec);
    const double d = eq.bulk_spacing * l;
    const double lambdabar0 =
        lattice::reduce_to_dimensionless(base, 0.0, spec.mass, d).lambdabar0;

    PhaseMapGrid grid;
    grid.omega_z = omega_z_grid.values();
    grid.tbar = tbar_grid.values();
    grid.lambdabar0 = lambdabar0;
    grid.bulk_spacing = eq.bulk_spacing;
    const std::size_t nz = grid.omega_z.size(), nt = grid.tbar.size();
    grid.cells.resize(nz * nt);

    const auto cell_params = [&](double omega_z) {
        lattice::IonReducedParams p = base;
        p.transverse_freq = omega_z;
        return p;
    };

    parallel_for(nz * nt, opts.threads, [&](std::size_t idx) {
        const std::size_t iz = idx / nt, it = idx % nt;
        PhaseMapCell cell{};
        cell.omega_z = grid.omega_z[iz];
        cell.tbar = grid.tbar[it];
        cell.valid = false;
        cell.mubar_sq = cell.mpbar_sq = cell.z = cell.xi_over_d = cell.nbar = cell.omega_zz_p =
            std::numeric_limits<double>::quiet_NaN();
        try {
            const auto p = cell_params(cell.omega_z);
            const auto lspec = lattice::LatticeSpec::trapped_ion(p);
            const double mbar0_sq =
                std::pow(cell.omega_z / spec.axial_freq, 2) -
                3.5 * c3 * sf::truncated_zeta(3.0, {spec.n_ions / 2});
            const auto sol = gap::solve_gap(mbar0_sq, lambdabar0, cell.tbar, lspec);
            const auto pm = gap::physical_mass(sol.mu_sq, lambdabar0, cell.tbar, lspec, opts.trunc);
            cell.mubar_sq = sol.mu_sq;
            cell.mpbar_sq = pm.mp_sq;
            cell.z = pm.z;
            if (pm.mp_sq > dw_bar * dw_bar) {
                const double mbar_p = std::sqrt(pm.mp_sq);
                cell.omega_zz_p = mbar_p * spec.axial_freq;
                cell.xi_over_d = xi_pref / std::sqrt(pm.mp_sq - dw_bar * dw_bar);
                cell.nbar = mean_phonon_number_dimensionless(mbar_p, cell.tbar);
                cell.valid = true;
                if (opts.force_strength) {
                    const double margin = coupling_constraint_margin(
                        *opts.force_strength, cell.omega_zz_p, cell.nbar, detuning, spec.mass);
                    if (margin > opts.margin_max) cell.valid = false;
                }
            }
        } catch (const PhysicsError&) {
        } catch (const ConvergenceError&) {
        }
        grid.cells[idx] = cell;
    });

    // m_P^2 = 0 boundary: for each tbar row bisect G(omega_z) = mu^2 - lam^2 K.
    std::vector<std::pair<double, double>> curve(nt,
                                                 {std::numeric_limits<double>::quiet_NaN(), 0.0});
    parallel_for(nt, opts.threads, [&](std::size_t it) {
        const double tbar = grid.tbar[it];
        const auto g = [&](double omega_z) {
            const auto p = cell_params(omega_z);
            const auto lspec = lattice::LatticeSpec::trapped_ion(p);
            const double mbar0_sq = std::pow(omega_z / spec.axial_freq, 2) -
                                    3.5 * c3 * sf::truncated_zeta(3.0, {spec.n_ions / 2});
            const auto sol = gap::solve_gap(mbar0_sq, lambdabar0, tbar, lspec);
            return sol.mu_sq -
                   lambdabar0 * lambdabar0 * loops::sunrise_kernel(sol.mu_sq, tbar, lspec);
        };
        double lo = grid.omega_z.front(), hi = grid.omega_z.back();
        try {
            double glo = g(lo), ghi = g(hi);
            if (glo > 0.0 || ghi < 0.0) return;  // boundary outside the window
            for (int i = 0; i < 60; ++i) {
                const double mid = 0.5 * (lo + hi);
                (g(mid) < 0.0 ? lo : hi) = mid;
            }
            curve[it] = {0.5 * (lo + hi), tbar};
        } catch (const PhysicsError&) {
        } catch (const ConvergenceError&) {
        }
    });
    for (const auto& c : curve)
        if (std::isfinite(c.first)) grid.critical_curve.push_back(c);
    return grid;
}

}  // namespace phi4ion::ions
