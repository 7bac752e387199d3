#include "phi4ion/loops.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "phi4ion/errors.hpp"
#include "phi4ion/util.hpp"

namespace phi4ion::loops {

namespace {

using lattice::LatticeSpec;
using lattice::ModeGrid;

void check_temperature(double t) {
    if (t < 0.0) throw std::domain_error("loops: temperature must be >= 0");
}

void check_truncation(MatsubaraTruncation trunc) {
    if (trunc.n_modes < 0) throw std::domain_error("loops: truncation must be >= 0");
}

// coth(w/2T) = 1 + 2 n_B(w), with the Bose factor via expm1 (stable at low T).
double coth_half(double w, double temperature) {
    return -1.0 - 2.0 / std::expm1(-w / temperature);
}

// (e^{-b x} - e^{-b y}) / (y - x), symmetric in (x, y); stable for y -> x.
double exp_diff_quotient(double b, double x, double y) {
    if (y < x) std::swap(x, y);
    const double u = b * (y - x);
    double g;  // (1 - e^{-u})/u
    if (u < 1e-5)
        g = 1.0 - u * (0.5 - u * (1.0 / 6.0 - u / 24.0));
    else
        g = -std::expm1(-u) / u;
    return std::exp(-b * x) * b * g;
}

// Double Matsubara sum S = (1/beta^2) sum_{n,m} D(nu_n, w1) D(nu_m, w2)
// D(nu_n + nu_m, w3). Exact closed form, written so that the degenerate
// kinematics w_k + w_l = w_kl are interior points rather than poles.
double thermal_triple_sum(double w1, double w2, double w3, double temperature) {
    const double big_omega = w1 + w2 + w3;
    if (temperature == 0.0) return 1.0 / (4.0 * w1 * w2 * w3 * big_omega);
    const double b = 1.0 / temperature;
    const double denom =
        (-std::expm1(-b * w1)) * (-std::expm1(-b * w2)) * (-std::expm1(-b * w3));
    const double num = exp_diff_quotient(b, 0.0, big_omega) +
                       exp_diff_quotient(b, w3, w1 + w2) +
                       exp_diff_quotient(b, w2, w1 + w3) +
                       exp_diff_quotient(b, w1, w2 + w3);
    return num / (4.0 * w1 * w2 * w3 * denom);
}

double lambda_prefactor(const ModeGrid& grid, double lambda0) { return lambda0 * grid.loop_c; }

}  // namespace

LoopResult tadpole_shift(double mu_sq, double temperature, double lambda0,
                         const LatticeSpec& spec) {
    check_temperature(temperature);
    if (lambda0 == 0.0) return {0.0, LoopMethod::ClosedForm, 0};
    const ModeGrid grid = lattice::mode_grid(spec, mu_sq);
    KahanSum acc;
    for (double w : grid.omega)
        acc.add((temperature == 0.0 ? 1.0 : coth_half(w, temperature)) / w);
    const double value = lambda_prefactor(grid, lambda0) / (4.0 * spec.n_sites) * acc.value();
    return {value, LoopMethod::ClosedForm, 0};
}

LoopResult tadpole_shift_truncated(double mu_sq, double temperature, double lambda0,
                                   const LatticeSpec& spec, MatsubaraTruncation trunc) {
    check_truncation(trunc);
    if (temperature <= 0.0)
        throw std::domain_error("tadpole_shift_truncated: need T > 0");
    if (lambda0 == 0.0) return {0.0, LoopMethod::Truncated, trunc.n_modes};
    const ModeGrid grid = lattice::mode_grid(spec, mu_sq);
    KahanSum acc;
    for (double w : grid.omega) {
        const double w2 = w * w;
        double s = 1.0 / w2;  // n0 = 0
        for (int n0 = 1; n0 <= trunc.n_modes; ++n0) {
            const double nu = 2.0 * M_PI * temperature * n0;
            s += 2.0 / (nu * nu + w2);
        }
        acc.add(s);
    }
    const double value =
        0.5 * lambda_prefactor(grid, lambda0) * temperature / spec.n_sites * acc.value();
    return {value, LoopMethod::Truncated, trunc.n_modes};
}

LoopResult sunrise_mass_shift(double mu_sq, double temperature, double lambda0,
                              const LatticeSpec& spec) {
    check_temperature(temperature);
    if (lambda0 == 0.0) return {0.0, LoopMethod::ClosedForm, 0};
    const ModeGrid grid = lattice::mode_grid(spec, mu_sq);
    const int n = spec.n_sites;
    KahanSum acc;
    // The double spatial sum is symmetric under n1 <-> l1; fold it.
    for (int n1 = 1; n1 <= n; ++n1) {
        const double w1 = grid.omega[n1 - 1];
        for (int l1 = n1; l1 <= n; ++l1) {
            const double w2 = grid.omega[l1 - 1];
            const double w3 = grid.omega[(n1 + l1 - 1) % n];
            const double s = thermal_triple_sum(w1, w2, w3, temperature);
            acc.add(l1 == n1 ? s : 2.0 * s);
        }
    }
    const double pref = lambda_prefactor(grid, lambda0);
    const double value = -pref * pref / (6.0 * n * n) * acc.value();
    return {value, LoopMethod::ClosedForm, 0};
}

LoopResult sunrise_mass_shift_truncated(double mu_sq, double temperature, double lambda0,
                                        const LatticeSpec& spec, MatsubaraTruncation trunc) {
    const double value = sunrise_at_k0(0.0, mu_sq, temperature, lambda0, spec, trunc);
    return {value, LoopMethod::Truncated, trunc.n_modes};
}

double sunrise_at_k0(double k0, double mu_sq, double temperature, double lambda0,
                     const LatticeSpec& spec, MatsubaraTruncation trunc) {
    check_truncation(trunc);
    if (temperature <= 0.0) throw std::domain_error("sunrise_at_k0: need T > 0");
    if (lambda0 == 0.0) return 0.0;
    const ModeGrid grid = lattice::mode_grid(spec, mu_sq);
    const int n = spec.n_sites;
    const int m = trunc.n_modes;
    const double tp = 2.0 * M_PI * temperature;

    // Propagator rows D(nu_n, w(n1)) for n in [-m, m].
    std::vector<std::vector<double>> rows(n, std::vector<double>(2 * m + 1));
    for (int n1 = 0; n1 < n; ++n1) {
        const double w2 = grid.omega[n1] * grid.omega[n1];
        for (int i = -m; i <= m; ++i) rows[n1][i + m] = 1.0 / (tp * i * tp * i + w2);
    }

    KahanSum acc;
    for (int n1 = 1; n1 <= n; ++n1) {
        const auto& d1 = rows[n1 - 1];
        for (int l1 = 1; l1 <= n; ++l1) {
            const auto& d2 = rows[l1 - 1];
            const double w3sq =
                grid.omega[(n1 + l1 - 1) % n] * grid.omega[(n1 + l1 - 1) % n];
            double pair = 0.0;
            for (int i = -m; i <= m; ++i) {
                const double di = d1[i + m];
                double inner = 0.0;
                for (int j = -m; j <= m; ++j) {
                    const double s = tp * (i + j) + k0;
                    inner += d2[j + m] / (s * s + w3sq);
                }
                pair += di * inner;
            }
            acc.add(pair);
        }
    }
    const double pref = lambda_prefactor(grid, lambda0);
    return -pref * pref / 6.0 * temperature * temperature / (n * n) * acc.value();
}

namespace {

// Shared driver for the two k0^2-derivative integrands.
double derivative_sum(double mu_sq, double temperature, double lambda0, const LatticeSpec& spec,
                      MatsubaraTruncation trunc, bool displayed_form) {
    check_truncation(trunc);
    if (lambda0 == 0.0) return 0.0;
    const ModeGrid grid = lattice::mode_grid(spec, mu_sq);
    const int n = spec.n_sites;

    if (temperature == 0.0) {
        // Frequency integrals in closed form: per spatial pair
        //   exact:     1 / (4 w1 w2 w3 Omega^3)
        //   displayed: has no simple closed form used anywhere; forbid it.
        if (displayed_form)
            throw std::domain_error("sunrise_k0_derivative_displayed: need T > 0");
        KahanSum acc;
        for (int n1 = 1; n1 <= n; ++n1) {
            const double w1 = grid.omega[n1 - 1];
            for (int l1 = n1; l1 <= n; ++l1) {
                const double w2 = grid.omega[l1 - 1];
                const double w3 = grid.omega[(n1 + l1 - 1) % n];
                const double om = w1 + w2 + w3;
                const double s = 1.0 / (4.0 * w1 * w2 * w3 * om * om * om);
                acc.add(l1 == n1 ? s : 2.0 * s);
            }
        }
        const double pref = lambda_prefactor(grid, lambda0);
        return pref * pref / (6.0 * n * n) * acc.value();
    }

    const int m = trunc.n_modes;
    const double tp = 2.0 * M_PI * temperature;
    std::vector<std::vector<double>> rows(n, std::vector<double>(2 * m + 1));
    // g rows over the convolution index i+j in [-2m, 2m]:
    //   exact:     D3^2 - 4 s^2 D3^3
    //   displayed: w3^2 D3^3
    std::vector<std::vector<double>> grows(n, std::vector<double>(4 * m + 1));
    for (int n1 = 0; n1 < n; ++n1) {
        const double w2 = grid.omega[n1] * grid.omega[n1];
        for (int i = -m; i <= m; ++i) rows[n1][i + m] = 1.0 / (tp * i * tp * i + w2);
        for (int i = -2 * m; i <= 2 * m; ++i) {
            const double s2 = tp * i * tp * i;
            const double d3 = 1.0 / (s2 + w2);
            grows[n1][i + 2 * m] =
                displayed_form ? w2 * d3 * d3 * d3 : d3 * d3 - 4.0 * s2 * d3 * d3 * d3;
        }
    }

    KahanSum acc;
    for (int n1 = 1; n1 <= n; ++n1) {
        const auto& d1 = rows[n1 - 1];
        for (int l1 = n1; l1 <= n; ++l1) {
            const auto& d2 = rows[l1 - 1];
            const auto& g3 = grows[(n1 + l1 - 1) % n];
            double pair = 0.0;
            for (int i = -m; i <= m; ++i) {
                const double di = d1[i + m];
                double inner = 0.0;
                for (int j = -m; j <= m; ++j) inner += d2[j + m] * g3[i + j + 2 * m];
                pair += di * inner;
            }
            acc.add(l1 == n1 ? pair : 2.0 * pair);
        }
    }
    const double pref = lambda_prefactor(grid, lambda0);
    return pref * pref / 6.0 * temperature * temperature / (n * n) * acc.value();
}

}  // namespace

LoopResult sunrise_k0_derivative(double mu_sq, double temperature, double lambda0,
                                 const LatticeSpec& spec, MatsubaraTruncation trunc) {
    check_temperature(temperature);
    const double v = derivative_sum(mu_sq, temperature, lambda0, spec, trunc, false);
    if (temperature == 0.0) return {v, LoopMethod::ClosedForm, 0};
    return {v, LoopMethod::Truncated, trunc.n_modes};
}

LoopResult sunrise_k0_derivative_displayed(double mu_sq, double temperature, double lambda0,
                                           const LatticeSpec& spec, MatsubaraTruncation trunc) {
    check_temperature(temperature);
    const double v = derivative_sum(mu_sq, temperature, lambda0, spec, trunc, true);
    return {v, LoopMethod::Truncated, trunc.n_modes};
}

double sunrise_derivative_discrepancy(double mu_sq, double temperature, double lambda0,
                                      const LatticeSpec& spec, MatsubaraTruncation trunc) {
    const double exact = sunrise_k0_derivative(mu_sq, temperature, lambda0, spec, trunc).value;
    const double shown =
        sunrise_k0_derivative_displayed(mu_sq, temperature, lambda0, spec, trunc).value;
    return std::abs(shown - exact) / std::abs(exact);
}

double wavefunction_renorm(const LoopResult& deriv) {
    const double residue = 1.0 + deriv.value;
    if (residue <= 0.0)
        throw PhysicsError("wavefunction_renorm: non-physical residue 1 + dSigma/dk0^2 <= 0");
    return 1.0 / residue;
}

double sunrise_kernel(double mu_sq, double temperature, const LatticeSpec& spec) {
    return -sunrise_mass_shift(mu_sq, temperature, 1.0, spec).value;
}

}  // namespace phi4ion::loops
