#include "phi4ion/gap.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "phi4ion/errors.hpp"
#include "phi4ion/special_functions.hpp"
#include "phi4ion/util.hpp"

namespace phi4ion::gap {

namespace {

using lattice::LatticeSpec;

double tadpole_value(double mu_sq, double lambda0, double temperature, const LatticeSpec& spec) {
    return loops::tadpole_shift(mu_sq, temperature, lambda0, spec).value;
}

}  // namespace

std::vector<double> GridSpec::values() const {
    return log_spacing ? geomspace(lo, hi, points) : linspace(lo, hi, points);
}

GapSolution solve_gap(double m0_sq, double lambda0, double temperature, const LatticeSpec& spec,
                      SolverOptions opts) {
    if (lambda0 < 0.0) throw std::invalid_argument("solve_gap: lambda0 must be >= 0");
    const double floor = lattice::mu_sq_floor(spec);
    if (lambda0 == 0.0) {
        if (m0_sq <= floor)
            throw GaplessError("solve_gap: free theory with m0^2 at or below the stability floor");
        return {m0_sq, m0_sq, lambda0, temperature, 0.0, 1, 0.0};
    }

    const auto residual_at = [&](double mu_sq) {
        return mu_sq - m0_sq - tadpole_value(mu_sq, lambda0, temperature, spec);
    };

    // Bracket the root of the (strictly increasing) residual. Sigma_td
    // diverges at the floor, so lo is always negative there.
    const double scale = std::max({1.0, std::abs(m0_sq), floor});
    double lo = floor + 1e-12 * scale;
    double hi = std::max(m0_sq, floor) + scale;
    int iter = 0;
    while (residual_at(hi) < 0.0) {
        hi = floor + 2.0 * (hi - floor);
        if (++iter > 200) throw GaplessError("solve_gap: no positive-mu^2 fixed point found");
    }

    // Damped fixed-point iteration, falling back to bisection whenever the
    // update leaves the bracket or stops contracting.
    double mu_sq = 0.5 * (lo + hi);
    double res = residual_at(mu_sq);
    double prev_abs = std::abs(res);
    for (; iter < opts.max_iter; ++iter) {
        if (std::abs(res) <= opts.tol) {
            const double sigma = mu_sq - m0_sq - res;
            return {mu_sq, m0_sq, lambda0, temperature, sigma, iter + 1, std::abs(res)};
        }
        if (res > 0.0)
            hi = mu_sq;
        else
            lo = mu_sq;
        double next = (1.0 - opts.damping) * mu_sq + opts.damping * (mu_sq - res);
        const bool oscillating = std::abs(res) > 0.9 * prev_abs;
        if (next <= lo || next >= hi || oscillating) next = 0.5 * (lo + hi);
        prev_abs = std::abs(res);
        mu_sq = next;
        res = residual_at(mu_sq);
    }
    throw ConvergenceError("solve_gap: no convergence after max_iter iterations (last mu^2 = " +
                           std::to_string(mu_sq) + ", residual = " + std::to_string(res) + ")");
}

PhysicalMassResult physical_mass(double mu_sq, double lambda0, double temperature,
                                 const LatticeSpec& spec, loops::MatsubaraTruncation trunc) {
    const double sigma_sr = loops::sunrise_mass_shift(mu_sq, temperature, lambda0, spec).value;
    const auto deriv = loops::sunrise_k0_derivative(mu_sq, temperature, lambda0, spec, trunc);
    const double z = loops::wavefunction_renorm(deriv);
    return {z * (mu_sq + sigma_sr), z, sigma_sr, deriv.value};
}

CriticalLine trace_critical_line(double temperature, const GridSpec& mu_sq_grid,
                                 const LatticeSpec& spec, int threads) {
    const std::vector<double> grid = mu_sq_grid.values();
    if (!grid.empty() && grid.front() <= lattice::mu_sq_floor(spec))
        throw std::invalid_argument("trace_critical_line: mu^2 grid must be above the floor");
    CriticalLine line;
    line.temperature = temperature;
    line.points.resize(grid.size());
    parallel_for(grid.size(), threads, [&](std::size_t i) {
        const double mu_sq = grid[i];
        const double kernel = loops::sunrise_kernel(mu_sq, temperature, spec);
        if (kernel <= 0.0)
            throw PhysicsError("trace_critical_line: sunrise kernel not positive at mu^2 = " +
                               std::to_string(mu_sq) + ", T = " + std::to_string(temperature) +
                               " (sum bug)");
        const double lambda0 = std::sqrt(mu_sq / kernel);
        const double m0_sq = mu_sq - tadpole_value(mu_sq, lambda0, temperature, spec);
        line.points[i] = {mu_sq, lambda0, m0_sq};
    });
    return line;
}

MassContour trace_mass_contour(double lambda0, const GridSpec& temperature_grid,
                               double mu_sq_start, const LatticeSpec& spec, ContourOptions opts,
                               int threads) {
    const std::vector<double> temps = temperature_grid.values();
    const double floor = lattice::mu_sq_floor(spec);
    const double a = spec.is_ion() ? 1.0 : spec.spacing();
    std::vector<std::vector<ContourRow>> per_t(temps.size());
    const double mp_stop = opts.mp_sq_stop_rel * std::max(1.0, mu_sq_start);
    parallel_for(temps.size(), threads, [&](std::size_t ti) {
        const double t = temps[ti];
        double mu_sq = mu_sq_start;
        auto& rows = per_t[ti];
        bool first = true;
        while (mu_sq > floor) {
            const auto pm = physical_mass(mu_sq, lambda0, t, spec, opts.trunc);
            if (pm.mp_sq / pm.z < 0.0) {
                if (first)
                    throw std::invalid_argument(
                        "trace_mass_contour: mu_sq_start is already in the broken phase");
                break;
            }
            first = false;
            const double m0_sq = mu_sq - tadpole_value(mu_sq, lambda0, t, spec);
            rows.push_back({t, m0_sq, mu_sq, pm.mp_sq, pm.z});
            if (pm.mp_sq < mp_stop) break;  // effectively on the massless boundary
            const double eps =
                opts.step_factor * pm.mp_sq * a * a / std::cbrt(1.0 + t * a);
            if (eps < opts.min_step)
                throw ConvergenceError("trace_mass_contour: step underflow (stall)");
            mu_sq -= eps;
        }
    });
    MassContour contour;
    contour.lambda0 = lambda0;
    for (auto& rows : per_t)
        contour.rows.insert(contour.rows.end(), rows.begin(), rows.end());
    return contour;
}

namespace {

FitResult fit_model(const std::string& name, const std::vector<double>& x,
                    const std::vector<double>& f,
                    const std::vector<std::vector<double>>& basis) {
    const int n = static_cast<int>(x.size());
    const int p = static_cast<int>(basis.size());
    Eigen::MatrixXd design(n, p);
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) {
        rhs(i) = f[i];
        for (int j = 0; j < p; ++j) design(i, j) = basis[j][i];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd coef = svd.solve(rhs);
    const Eigen::VectorXd resid = rhs - design * coef;
    const double dof = std::max(1, n - p);
    const double sigma_sq = resid.squaredNorm() / dof;
    const Eigen::MatrixXd cov =
        sigma_sq * (design.transpose() * design).inverse();
    FitResult out;
    out.model = name;
    out.f_c = coef(0);
    out.f_c_err = std::sqrt(std::max(0.0, cov(0, 0)));
    out.coeffs.assign(coef.data(), coef.data() + p);
    out.residual_rms = std::sqrt(resid.squaredNorm() / n);
    const double cond =
        svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
    out.ill_conditioned = !(cond < 1e10);
    return out;
}

}  // namespace

CriticalRatioResult critical_ratio_lattice(int n_sites, const GridSpec& mu_sq_grid,
                                           double temperature, int threads) {
    const auto spec = LatticeSpec::nearest_neighbor(n_sites);
    const CriticalLine line = trace_critical_line(temperature, mu_sq_grid, spec, threads);
    CriticalRatioResult out;
    for (const auto& pt : line.points) {
        out.mu_sq.push_back(pt.mu_sq);
        out.lambda0.push_back(pt.lambda0);
        out.f.push_back(pt.lambda0 / pt.mu_sq);
    }
    const int n = static_cast<int>(out.f.size());
    if (n < 4) throw std::invalid_argument("critical_ratio_lattice: need at least 4 grid points");

    // Naive estimate: affine fit of lambda0 against mu^2, slope = f_c.
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (int i = 0; i < n; ++i) {
            sx += out.mu_sq[i];
            sy += out.lambda0[i];
            sxx += out.mu_sq[i] * out.mu_sq[i];
            sxy += out.mu_sq[i] * out.lambda0[i];
        }
        out.naive_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }

    std::vector<double> ones(n, 1.0), xs = out.lambda0, xlnx(n);
    for (int i = 0; i < n; ++i) xlnx[i] = xs[i] * std::log(xs[i]);
    out.fits.push_back(fit_model("f = c0 + c1 x", xs, out.f, {ones, xs}));
    out.fits.push_back(fit_model("f = c0 + c1 x + c2 x ln x", xs, out.f, {ones, xs, xlnx}));
    out.fits.push_back(fit_model("f = c0 + c1 x ln x", xs, out.f, {ones, xlnx}));
    return out;
}

double critical_ratio_integral() {
    const double psi = sf::polygamma1(1.0 / 6.0) + sf::polygamma1(1.0 / 3.0) -
                       sf::polygamma1(2.0 / 3.0) - sf::polygamma1(5.0 / 6.0);
    return M_PI * M_PI / 18.0 * psi;
}

double critical_ratio_continuum() {
    const double two_pi_4 = std::pow(2.0 * M_PI, 4);
    return std::sqrt(6.0 * two_pi_4 / critical_ratio_integral());
}

CrossingReport detect_crossings(const CriticalLine& a, const CriticalLine& b,
                                CrossingPlane plane) {
    CrossingReport report;
    const auto coord = [&](const CriticalPoint& p) {
        return plane == CrossingPlane::BareMass ? p.m0_sq : p.mu_sq;
    };

    if (a.temperature == b.temperature && a.points.size() == b.points.size()) {
        bool same = true;
        for (std::size_t i = 0; i < a.points.size() && same; ++i)
            same = a.points[i].mu_sq == b.points[i].mu_sq &&
                   a.points[i].lambda0 == b.points[i].lambda0 &&
                   a.points[i].m0_sq == b.points[i].m0_sq;
        if (same) {
            report.identical_lines = true;
            report.note = "identical lines; no crossings reported";
            return report;
        }
    }

    const auto range = [&](const CriticalLine& l) {
        double lo = coord(l.points.front()), hi = lo;
        for (const auto& p : l.points) {
            lo = std::min(lo, coord(p));
            hi = std::max(hi, coord(p));
        }
        return std::pair{lo, hi};
    };
    if (a.points.empty() || b.points.empty()) {
        report.note = "empty line";
        return report;
    }
    const auto [alo, ahi] = range(a);
    const auto [blo, bhi] = range(b);
    if (ahi < blo || bhi < alo) {
        report.note = "non-overlapping ranges";
        return report;
    }

    for (std::size_t i = 0; i + 1 < a.points.size(); ++i) {
        const double p1x = coord(a.points[i]), p1y = a.points[i].lambda0;
        const double p2x = coord(a.points[i + 1]), p2y = a.points[i + 1].lambda0;
        for (std::size_t j = 0; j + 1 < b.points.size(); ++j) {
            const double q1x = coord(b.points[j]), q1y = b.points[j].lambda0;
            const double q2x = coord(b.points[j + 1]), q2y = b.points[j + 1].lambda0;
            const double d1x = p2x - p1x, d1y = p2y - p1y;
            const double d2x = q2x - q1x, d2y = q2y - q1y;
            const double den = d1x * d2y - d1y * d2x;
            if (den == 0.0) continue;
            const double t = ((q1x - p1x) * d2y - (q1y - p1y) * d2x) / den;
            const double u = ((q1x - p1x) * d1y - (q1y - p1y) * d1x) / den;
            if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) continue;
            Crossing c{p1x + t * d1x, p1y + t * d1y};
            bool dup = false;
            for (const auto& k : report.crossings)
                dup = dup || (std::abs(k.m0_sq - c.m0_sq) <=
                                  1e-9 * (1.0 + std::abs(c.m0_sq)) &&
                              std::abs(k.lambda0 - c.lambda0) <=
                                  1e-9 * (1.0 + std::abs(c.lambda0)));
            if (!dup) report.crossings.push_back(c);
        }
    }
    return report;
}

}  // namespace phi4ion::gap
