// Acceptance suite: one pass/fail line per pinned criterion, exercising the
// library exactly the way the batch pipelines do. Exits nonzero if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "phi4ion/commands.hpp"
#include "phi4ion/config.hpp"
#include "phi4ion/constants.hpp"
#include "phi4ion/gap.hpp"
#include "phi4ion/ion_chain.hpp"
#include "phi4ion/lattice.hpp"
#include "phi4ion/loops.hpp"
#include "phi4ion/presets.hpp"
#include "phi4ion/special_functions.hpp"
#include "phi4ion/table.hpp"
#include "phi4ion/util.hpp"

using namespace phi4ion;
using lattice::LatticeSpec;

namespace {

int g_failures = 0;

void report(const std::string& name, bool ok, double seconds, const std::string& detail) {
    std::printf("[%s] %-58s (%6.2f s) %s\n", ok ? "PASS" : "FAIL", name.c_str(), seconds,
                detail.c_str());
    if (!ok) ++g_failures;
}

void criterion(const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string detail;
    try {
        std::tie(ok, detail) = fn();
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(name, ok, secs, detail);
}

int worker_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 2 : static_cast<int>(std::min(hw, 8u));
}

// ---- adaptive quadrature (independent oracle for the continuum integral) --

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fb, double fm, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, fm, flm, 0.5 * eps, depth - 1) +
           adaptive_simpson(f, m, b, fm, fb, frm, 0.5 * eps, depth - 1);
}

double quad(const std::function<double(double)>& f, double a, double b, double eps) {
    return adaptive_simpson(f, a, b, f(a), f(b), f(0.5 * (a + b)), eps, 30);
}

// Triple-propagator integral at unit mass after the radial-angular
// reduction: I = 2 pi^2 Int_0^inf dk k/(k^2+1) g(k), with the inner Feynman
// parameter integral g(k) = Int_0^1 dx / (k^2 x (1-x) + 1).
double continuum_integral_quadrature() {
    const auto inner = [](double k) {
        const double k2 = k * k;
        return quad([k2](double x) { return 1.0 / (k2 * x * (1.0 - x) + 1.0); }, 0.0, 1.0, 1e-12);
    };
    // map k = t/(1-t), dk = dt/(1-t)^2
    const auto radial = [&](double t) {
        if (t >= 1.0) return 0.0;
        const double k = t / (1.0 - t);
        const double jac = 1.0 / ((1.0 - t) * (1.0 - t));
        return k / (k * k + 1.0) * inner(k) * jac;
    };
    return 2.0 * M_PI * M_PI * quad(radial, 0.0, 1.0 - 1e-9, 1e-10);
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << v;
    return ss.str();
}

const io::ResultTable& find_table(const io::CommandOutput& out, const std::string& suffix) {
    for (const auto& [s, t] : out.tables)
        if (s == suffix) return t;
    throw std::runtime_error("missing table '" + suffix + "'");
}

}  // namespace

int main() {
    const int threads = worker_threads();
    std::printf("acceptance suite, %d worker threads\n", threads);

    criterion("1. continuum critical ratio (polygamma + quadrature)", [] {
        const double fc = gap::critical_ratio_continuum();
        const double i_closed = gap::critical_ratio_integral();
        const double i_quad = continuum_integral_quadrature();
        const bool ok_fc = std::abs(fc - 20.1055) <= 1e-3;
        const bool ok_i = std::abs(i_quad - i_closed) <= 1e-4 * std::abs(i_closed);
        return std::pair{ok_fc && ok_i, "f_c = " + fmt(fc) + ", I_closed = " + fmt(i_closed) +
                                            ", I_quad = " + fmt(i_quad)};
    });

    criterion("2. lattice critical ratio at N1 = 2000", [&] {
        gap::GridSpec grid{1e-4, 1e-3, 10, true};
        const auto res = gap::critical_ratio_lattice(2000, grid, 0.0, threads);
        bool ok = res.naive_slope >= 20.0 && res.naive_slope <= 20.2;
        std::string detail = "naive = " + fmt(res.naive_slope);
        for (const auto& fit : res.fits) {
            ok = ok && std::abs(fit.f_c - 20.11) <= 0.1;
            detail += ", " + fmt(fit.f_c);
        }
        return std::pair{ok, detail};
    });

    criterion("3. tadpole closed form vs thermodynamic limit", [] {
        const double mu_sq = 1.0;
        const double q = 1.0 + 0.25 * mu_sq;
        const double limit = 0.25 / M_PI / std::sqrt(q) * sf::elliptic_k(1.0 / q);
        const double big =
            loops::tadpole_shift(mu_sq, 0.0, 1.0, LatticeSpec::nearest_neighbor(2000)).value;
        bool ok = std::abs(big - limit) <= 1e-6 * limit;
        double prev = 1e300;
        for (int n1 : {16, 30, 60}) {
            const double dev = std::abs(
                loops::tadpole_shift(mu_sq, 0.0, 1.0, LatticeSpec::nearest_neighbor(n1)).value -
                limit);
            ok = ok && dev < prev && (n1 != 30 || dev < 1e-3 * limit);
            prev = dev;
        }
        return std::pair{ok, "N1=2000 rel dev = " + fmt(std::abs(big - limit) / limit)};
    });

    criterion("4. truncation convergence (tadpole, sunrise, derivative)", [&] {
        const auto spec = LatticeSpec::nearest_neighbor(30);
        bool ok = true;
        // tadpole approaches its closed form monotonically
        const double td_closed = loops::tadpole_shift(1.0, 1.0, 1.0, spec).value;
        double gap_prev = 1e300;
        for (int n0 : {16, 64, 256, 1024, 4096}) {
            const double g =
                std::abs(td_closed - loops::tadpole_shift_truncated(1.0, 1.0, 1.0, spec, {n0}).value);
            ok = ok && g < gap_prev;
            gap_prev = g;
        }
        // sunrise ditto
        const double sr_closed = loops::sunrise_mass_shift(1.0, 1.0, 1.0, spec).value;
        gap_prev = 1e300;
        for (int n0 : {2, 4, 8, 16, 32, 64}) {
            const double g = std::abs(
                sr_closed - loops::sunrise_mass_shift_truncated(1.0, 1.0, 1.0, spec, {n0}).value);
            ok = ok && g < gap_prev;
            gap_prev = g;
        }
        // derivative is converged between N0 = 64 and 128 across Ta in [0.1, 2]
        double worst = 0.0;
        std::vector<double> temps = {0.1, 0.3, 0.5, 1.0, 1.5, 2.0};
        std::vector<double> rel(temps.size());
        parallel_for(temps.size(), threads, [&](std::size_t i) {
            const double d64 = loops::sunrise_k0_derivative(1.0, temps[i], 1.0, spec, {64}).value;
            const double d128 = loops::sunrise_k0_derivative(1.0, temps[i], 1.0, spec, {128}).value;
            rel[i] = std::abs(d128 - d64) / std::abs(d128);
        });
        for (double r : rel) worst = std::max(worst, r);
        ok = ok && worst < 1e-4;
        return std::pair{ok, "worst derivative N0=64 vs 128 rel change = " + fmt(worst)};
    });

    criterion("5. finite-difference oracle for the k0^2 derivative", [] {
        const auto spec = LatticeSpec::nearest_neighbor(30);
        const double mu_sq = 1.0, t = 0.5;
        const loops::MatsubaraTruncation trunc{32};
        const double deriv = loops::sunrise_k0_derivative(mu_sq, t, 1.0, spec, trunc).value;
        const auto fd = [&](double h) {
            const double sp = loops::sunrise_at_k0(h, mu_sq, t, 1.0, spec, trunc);
            const double sm = loops::sunrise_at_k0(-h, mu_sq, t, 1.0, spec, trunc);
            const double s0 = loops::sunrise_at_k0(0.0, mu_sq, t, 1.0, spec, trunc);
            return (sp + sm - 2.0 * s0) / (2.0 * h * h);
        };
        const double fd_val = (4.0 * fd(2e-3) - fd(4e-3)) / 3.0;
        const double rel = std::abs(deriv - fd_val) / std::abs(deriv);
        return std::pair{rel <= 1e-6, "rel dev = " + fmt(rel)};
    });

    criterion("6. critical-line ordering, witness point, crossings", [&] {
        const auto spec = LatticeSpec::nearest_neighbor(30);
        gap::GridSpec grid{0.05, 50.0, 60, true};
        const auto l1 = gap::trace_critical_line(0.5, grid, spec, threads);
        const auto l2 = gap::trace_critical_line(1.0, grid, spec, threads);
        bool ordering = true;
        for (std::size_t i = 0; i < l1.points.size(); ++i)
            ordering = ordering && l2.points[i].lambda0 < l1.points[i].lambda0;

        // witness: broken at T1, symmetric at T2 for the same (m0^2, lambda0)
        bool witness = false;
        for (std::size_t i = 0; i < l1.points.size() && !witness; ++i) {
            const double m0 = l1.points[i].m0_sq;
            for (std::size_t j = 1; j < l2.points.size(); ++j) {
                const double x0 = l2.points[j - 1].m0_sq, x1 = l2.points[j].m0_sq;
                if ((m0 - x0) * (m0 - x1) > 0.0) continue;
                const double w = (m0 - x0) / (x1 - x0);
                const double lam2 = l2.points[j - 1].lambda0 +
                                    w * (l2.points[j].lambda0 - l2.points[j - 1].lambda0);
                witness = lam2 < l1.points[i].lambda0;
                break;
            }
        }
        const auto xm = gap::detect_crossings(l1, l2, gap::CrossingPlane::BareMass);
        const auto xu = gap::detect_crossings(l1, l2, gap::CrossingPlane::TadpoleMass);
        bool crossings = !xm.crossings.empty() && xu.crossings.empty();
        for (const auto& c : xm.crossings) crossings = crossings && c.m0_sq < 0.0;
        std::string detail = "crossings(m0^2) = " + std::to_string(xm.crossings.size()) +
                             ", crossings(mu^2) = " + std::to_string(xu.crossings.size());
        return std::pair{ordering && witness && crossings, detail};
    });

    criterion("7a. ion equilibria: 2- and 3-ion analytic positions", [] {
        const auto spec2 = ions::IonChainSpec::species("40Ca+", 2, 2 * M_PI * 127e3,
                                                       2 * M_PI * 2.93e6, 2 * M_PI * 2.89e6);
        const auto eq2 = ions::solve_equilibrium(spec2);
        const double u = std::cbrt(0.25);
        bool ok = std::abs(eq2.positions[0] + u) <= 1e-10 && std::abs(eq2.positions[1] - u) <= 1e-10;
        const auto spec3 = ions::IonChainSpec::species("40Ca+", 3, 2 * M_PI * 127e3,
                                                       2 * M_PI * 2.93e6, 2 * M_PI * 2.89e6);
        const auto eq3 = ions::solve_equilibrium(spec3);
        const double v = std::cbrt(1.25);
        ok = ok && std::abs(eq3.positions[0] + v) <= 1e-10 && std::abs(eq3.positions[2] - v) <= 1e-10 &&
             std::abs(eq3.positions[1]) <= 1e-10;
        return std::pair{ok, "u = " + fmt(u) + ", v = " + fmt(v)};
    });

    criterion("7b. 30-ion classical critical frequency within 2% of 2.70 MHz", [] {
        // Pinned to the published 2.7 MHz figure for this chain. The value
        // computed from the solved crystal (bulk formula, d = minimum
        // spacing) is reported verbatim.
        const auto spec = ions::IonChainSpec::species("40Ca+", 30, 2 * M_PI * 127e3,
                                                      2 * M_PI * 2.93e6, 2 * M_PI * 2.89e6);
        const auto eq = ions::solve_equilibrium(spec);
        const double kappa_c = ions::classical_critical_kappa(30, eq.bulk_spacing);
        const double f_c = 127e3 / std::sqrt(kappa_c);
        // second route: soften the exact zigzag mode to zero
        const auto modes = ions::transverse_normal_modes(eq, spec);
        const double wzz = modes.frequencies.back();
        const double f_c_exact =
            std::sqrt(std::pow(2.89e6, 2) - std::pow(wzz / (2 * M_PI), 2));
        const bool ok = std::abs(f_c - 2.7e6) <= 0.02 * 2.7e6;
        return std::pair{ok, "computed " + fmt(f_c / 1e6) + " MHz (exact-mode route " +
                                 fmt(f_c_exact / 1e6) + " MHz) vs pinned 2.70 MHz +- 2%"};
    });

    criterion("8. spin couplings from the fig2 preset", [&] {
        auto cfg = io::RunConfig::parse(io::preset_text("fig2"), "ion-couplings");
        const auto out = io::run_command(cfg, threads);
        const auto& table = find_table(out, "");
        // columns: i, j, separation_m, j_exact_hz, j_coarse_hz, rel_dev
        double jnn = 0.0, near = 0.0, far = 0.0;
        int n_near = 0, n_far = 0;
        for (const auto& row : table.rows) {
            const int i = static_cast<int>(row[0].num), j = static_cast<int>(row[1].num);
            if (i == 15 && j == 16) jnn = row[3].num;
            const int sep = std::abs(j - i);
            if (sep <= 2) {
                near += row[5].num;
                ++n_near;
            } else if (sep >= 5) {
                far += row[5].num;
                ++n_far;
            }
        }
        const bool ok_j = std::abs(jnn - 1400.0) <= 0.15 * 1400.0;
        const bool ok_dev = far / n_far < near / n_near;
        return std::pair{ok_j && ok_dev, "J(15,16)/h = " + fmt(jnn) + " Hz, mean dev near = " +
                                             fmt(near / n_near) + ", far = " + fmt(far / n_far)};
    });

    criterion("9. phase map from the fig6 preset", [&] {
        auto cfg = io::RunConfig::parse(io::preset_text("fig6"), "phase-map");
        const auto out = io::run_command(cfg, threads);
        const auto& cells = find_table(out, "");
        // columns: omega_z_hz, tbar, valid, mubar_sq, mpbar_sq, z, xi_over_d,
        //          nbar, omega_zz_p_hz
        bool floor_ok = true;
        std::map<double, std::vector<std::pair<double, double>>> by_wz;  // wz -> (tbar, xi)
        int n_valid = 0;
        for (const auto& row : cells.rows) {
            if (row[2].num != 1.0) continue;
            ++n_valid;
            floor_ok = floor_ok && row[8].num >= 318e3 * (1.0 - 1e-12);
            by_wz[row[0].num].emplace_back(row[1].num, row[6].num);
        }
        bool xi_monotone = true;
        for (auto& [wz, pts] : by_wz)
            for (std::size_t i = 1; i < pts.size(); ++i)
                xi_monotone = xi_monotone && pts[i].second < pts[i - 1].second;

        const auto& curve = find_table(out, "critical");
        bool boundary_monotone = curve.rows.size() >= 2;
        for (std::size_t i = 1; i < curve.rows.size(); ++i)
            boundary_monotone = boundary_monotone &&
                                curve.rows[i][1].num < curve.rows[i - 1][1].num &&
                                curve.rows[i][0].num > curve.rows[i - 1][0].num;
        return std::pair{floor_ok && xi_monotone && boundary_monotone && n_valid > 300,
                         std::to_string(n_valid) + " valid cells, boundary rows = " +
                             std::to_string(curve.rows.size())};
    });

    criterion("10. preset determinism across runs and thread counts", [&] {
        bool ok = true;
        std::string first_bad;
        for (const auto& name : io::preset_names()) {
            const auto body = [&](int nthreads) {
                auto cfg = io::RunConfig::parse(io::preset_text(name), io::preset_command(name));
                const auto out = io::run_command(cfg, nthreads);
                std::string all;
                for (const auto& [suffix, table] : out.tables)
                    all += io::stable_body(io::to_csv(table));
                return all;
            };
            const std::string a = body(1);
            const std::string b = body(1);
            const std::string c = body(threads);
            if (a != b || a != c) {
                ok = false;
                if (first_bad.empty()) first_bad = name;
            }
        }
        return std::pair{ok, ok ? "all presets byte-identical" : "first mismatch: " + first_bad};
    });

    std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
