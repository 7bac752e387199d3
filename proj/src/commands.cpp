#include "phi4ion/commands.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "phi4ion/constants.hpp"
#include "phi4ion/errors.hpp"
#include "phi4ion/gap.hpp"
#include "phi4ion/ion_chain.hpp"
#include "phi4ion/lattice.hpp"
#include "phi4ion/loops.hpp"
#include "phi4ion/special_functions.hpp"
#include "phi4ion/util.hpp"

namespace phi4ion::io {

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr double kTwoPi = 2.0 * M_PI;

void stamp(ResultTable& t, const RunConfig& cfg) {
    t.add_meta("phi4ion_version", kVersion);
    t.add_meta("command", cfg.command());
    t.add_meta("config_digest", digest_hex(cfg.canonical_text()));
}

void stamp_config(ResultTable& t, const RunConfig& cfg) {
    std::istringstream in(cfg.canonical_text());
    std::string line;
    std::getline(in, line);  // [command]
    while (std::getline(in, line)) {
        const auto eq = line.find(" = ");
        t.add_meta("cfg." + line.substr(0, eq), line.substr(eq + 3));
    }
}

gap::GridSpec mu_grid_from(RunConfig& cfg) {
    gap::GridSpec g;
    g.lo = cfg.get_double("mu2_min_lattice");
    g.hi = cfg.get_double("mu2_max_lattice");
    g.points = cfg.get_int("mu2_points");
    g.log_spacing = cfg.get_bool("mu2_log", false);
    return g;
}

CommandOutput cmd_critical_line(RunConfig& cfg, int threads) {
    const int n_sites = cfg.get_int("n_sites");
    const double spacing = cfg.get_double("spacing_lattice", 1.0);
    const auto temps = cfg.get_double_list("temperatures_lattice");
    const auto grid = mu_grid_from(cfg);
    const bool crossings_wanted = cfg.get_bool("detect_crossings", temps.size() >= 2);
    cfg.reject_unknown_keys();

    const auto spec = lattice::LatticeSpec::nearest_neighbor(n_sites, spacing);
    std::vector<gap::CriticalLine> lines;
    for (double t : temps) lines.push_back(gap::trace_critical_line(t, grid, spec, threads));

    CommandOutput out;
    ResultTable table;
    stamp(table, cfg);
    stamp_config(table, cfg);
    table.columns = {"t_lattice", "mu2_lattice", "lambda0_lattice", "m0_2_lattice"};
    for (const auto& line : lines)
        for (const auto& p : line.points) {
            auto& row = table.new_row();
            row.push_back(Cell::number(line.temperature));
            row.push_back(Cell::number(p.mu_sq));
            row.push_back(Cell::number(p.lambda0));
            row.push_back(Cell::number(p.m0_sq));
        }
    out.tables.emplace_back("", std::move(table));

    if (crossings_wanted && lines.size() >= 2) {
        ResultTable xt;
        stamp(xt, cfg);
        xt.columns = {"t_a_lattice", "t_b_lattice", "plane", "x_lattice", "lambda0_lattice"};
        for (std::size_t i = 0; i < lines.size(); ++i)
            for (std::size_t j = i + 1; j < lines.size(); ++j) {
                for (auto plane : {gap::CrossingPlane::BareMass, gap::CrossingPlane::TadpoleMass}) {
                    const auto rep = gap::detect_crossings(lines[i], lines[j], plane);
                    const char* plane_name =
                        plane == gap::CrossingPlane::BareMass ? "m0_2" : "mu2";
                    for (const auto& c : rep.crossings) {
                        auto& row = xt.new_row();
                        row.push_back(Cell::number(lines[i].temperature));
                        row.push_back(Cell::number(lines[j].temperature));
                        row.push_back(Cell::str(plane_name));
                        row.push_back(Cell::number(c.m0_sq));
                        row.push_back(Cell::number(c.lambda0));
                    }
                    if (!rep.note.empty())
                        xt.add_meta("note_" + std::string(plane_name), rep.note);
                }
            }
        out.tables.emplace_back("crossings", std::move(xt));
    }
    return out;
}

CommandOutput cmd_mass_contour(RunConfig& cfg, int threads) {
    const int n_sites = cfg.get_int("n_sites");
    const double spacing = cfg.get_double("spacing_lattice", 1.0);
    const double lambda0 = cfg.get_double("lambda0_lattice");
    gap::GridSpec tgrid;
    tgrid.lo = cfg.get_double("t_min_lattice");
    tgrid.hi = cfg.get_double("t_max_lattice");
    tgrid.points = cfg.get_int("t_points");
    const double mu_start = cfg.get_double("mu2_start_lattice");
    gap::ContourOptions opts;
    opts.step_factor = cfg.get_double("step_factor", 0.1);
    opts.trunc.n_modes = cfg.get_int("n0_modes", 64);
    cfg.reject_unknown_keys();

    const auto spec = lattice::LatticeSpec::nearest_neighbor(n_sites, spacing);
    const auto contour = gap::trace_mass_contour(lambda0, tgrid, mu_start, spec, opts, threads);

    CommandOutput out;
    ResultTable table;
    stamp(table, cfg);
    stamp_config(table, cfg);
    table.add_meta("lambda0_lattice", lambda0);
    table.columns = {"t_lattice", "m0_2_lattice", "mu2_lattice", "mp2_lattice", "z"};
    for (const auto& r : contour.rows) {
        auto& row = table.new_row();
        row.push_back(Cell::number(r.temperature));
        row.push_back(Cell::number(r.m0_sq));
        row.push_back(Cell::number(r.mu_sq));
        row.push_back(Cell::number(r.mp_sq));
        row.push_back(Cell::number(r.z));
    }
    out.tables.emplace_back("", std::move(table));
    return out;
}

CommandOutput cmd_critical_ratio(RunConfig& cfg, int threads) {
    const int n_sites = cfg.get_int("n_sites");
    const auto grid = mu_grid_from(cfg);
    const auto sweep = cfg.get_int_list("n1_sweep", {});
    cfg.reject_unknown_keys();

    const auto main = gap::critical_ratio_lattice(n_sites, grid, 0.0, threads);

    CommandOutput out;
    ResultTable table;
    stamp(table, cfg);
    stamp_config(table, cfg);
    table.columns = {"estimator", "n_sites", "f_c", "f_c_err", "residual_rms", "ill_conditioned"};
    auto push = [&](const std::string& name, int n1, double fc, double err, double rms,
                    bool ill) {
        auto& row = table.new_row();
        row.push_back(Cell::str(name));
        row.push_back(Cell::number(n1));
        row.push_back(Cell::number(fc));
        row.push_back(Cell::number(err));
        row.push_back(Cell::number(rms));
        row.push_back(Cell::number(ill ? 1.0 : 0.0));
    };
    push("continuum_polygamma", 0, gap::critical_ratio_continuum(), 0.0, 0.0, false);
    push("naive_linear_slope", n_sites, main.naive_slope, 0.0, 0.0, false);
    const char* names[] = {"f1_linear", "f2_linear_xlnx", "f3_xlnx"};
    for (std::size_t i = 0; i < main.fits.size(); ++i)
        push(names[i], n_sites, main.fits[i].f_c, main.fits[i].f_c_err,
             main.fits[i].residual_rms, main.fits[i].ill_conditioned);
    for (int n1 : sweep) {
        if (n1 == n_sites) continue;
        const auto res = gap::critical_ratio_lattice(n1, grid, 0.0, threads);
        push("f3_xlnx", n1, res.fits[2].f_c, res.fits[2].f_c_err, res.fits[2].residual_rms,
             res.fits[2].ill_conditioned);
    }
    out.tables.emplace_back("", std::move(table));

    ResultTable pts;
    stamp(pts, cfg);
    pts.columns = {"mu2_lattice", "lambda0_lattice", "f"};
    for (std::size_t i = 0; i < main.mu_sq.size(); ++i) {
        auto& row = pts.new_row();
        row.push_back(Cell::number(main.mu_sq[i]));
        row.push_back(Cell::number(main.lambda0[i]));
        row.push_back(Cell::number(main.f[i]));
    }
    out.tables.emplace_back("points", std::move(pts));
    return out;
}

CommandOutput cmd_ion_couplings(RunConfig& cfg, int threads) {
    const std::string species = cfg.get_string("species");
    const int n_ions = cfg.get_int("n_ions");
    const double wx = kTwoPi * cfg.get_double("axial_freq_hz");
    const double wy = kTwoPi * cfg.get_double("transverse_freq_y_hz");
    const double wz = kTwoPi * cfg.get_double("transverse_freq_z_hz");
    const double rabi = kTwoPi * cfg.get_double("rabi_hz");
    const double detuning = kTwoPi * cfg.get_double("detuning_hz");
    const double wavelength = cfg.get_double("laser_wavelength_m");
    const double projection = cfg.get_double("wavevector_projection", 1.0);
    const bool with_renorm = cfg.has("tbar");
    const double tbar = cfg.get_double("tbar", 0.0);
    const int n0 = cfg.get_int("n0_modes", 64);
    cfg.reject_unknown_keys();

    const auto spec = ions::IonChainSpec::species(species, n_ions, wx, wy, wz);
    const double k_eff = kTwoPi / wavelength * projection;
    const double recoil = constants::hbar * constants::hbar * k_eff * k_eff / (2.0 * spec.mass);
    const double lamb_dicke = k_eff * std::sqrt(constants::hbar / (2.0 * spec.mass * wx));

    const auto eq = ions::solve_equilibrium(spec);
    const auto modes = ions::transverse_normal_modes(eq, spec);
    const auto exact = ions::exact_spin_couplings(spec, modes, rabi, detuning, recoil);
    const auto coarse = ions::coarse_grained_couplings(spec, eq, detuning, rabi, lamb_dicke);

    std::optional<ions::SpinCouplingMatrix> renorm;
    lattice::DimensionlessCouplings dims{};
    gap::PhysicalMassResult pm{};
    if (with_renorm) {
        const auto p = ions::ion_reduced_params(spec, eq);
        const double d = ions::length_scale(spec) * eq.bulk_spacing;
        dims = lattice::reduce_to_dimensionless(p, lattice::temperature_from_tbar(tbar, p),
                                                spec.mass, d);
        const auto lspec = lattice::LatticeSpec::trapped_ion(p);
        const auto sol = gap::solve_gap(dims.mbar0_sq, dims.lambdabar0, tbar, lspec);
        pm = gap::physical_mass(sol.mu_sq, dims.lambdabar0, tbar, lspec, {n0});
        renorm = ions::renormalized_couplings(spec, eq, detuning, rabi, lamb_dicke, pm);
    }

    CommandOutput out;
    ResultTable table;
    stamp(table, cfg);
    stamp_config(table, cfg);
    if (const auto warn = ions::linear_regime_warning(spec)) table.add_meta("warning", *warn);
    table.add_meta("length_scale_m", ions::length_scale(spec));
    table.add_meta("bulk_spacing_over_l", eq.bulk_spacing);
    table.add_meta("zigzag_freq_hz", modes.frequencies.back() / kTwoPi);
    table.add_meta("recoil_energy_j", recoil);
    table.add_meta("lamb_dicke", lamb_dicke);
    if (with_renorm) {
        table.add_meta("mbar0_sq", dims.mbar0_sq);
        table.add_meta("lambdabar0", dims.lambdabar0);
        table.add_meta("mpbar_sq", pm.mp_sq);
        table.add_meta("z", pm.z);
    }
    table.columns = {"i", "j", "separation_m", "j_exact_hz", "j_coarse_hz", "rel_dev"};
    if (with_renorm) table.columns.push_back("j_renorm_hz");
    const double l = ions::length_scale(spec);
    for (int i = 0; i < n_ions; ++i)
        for (int j = i + 1; j < n_ions; ++j) {
            auto& row = table.new_row();
            row.push_back(Cell::number(i + 1));
            row.push_back(Cell::number(j + 1));
            row.push_back(Cell::number((eq.positions[j] - eq.positions[i]) * l));
            const double je = exact.j(i, j) / kTwoPi;
            const double jc = coarse.j(i, j) / kTwoPi;
            row.push_back(Cell::number(je));
            row.push_back(Cell::number(jc));
            row.push_back(Cell::number(std::abs(je - jc) / std::abs(je)));
            if (renorm) row.push_back(Cell::number(renorm->j(i, j) / kTwoPi));
        }
    out.tables.emplace_back("", std::move(table));

    ResultTable mt;
    stamp(mt, cfg);
    mt.columns = {"mode", "freq_hz"};
    for (std::size_t n = 0; n < modes.frequencies.size(); ++n) {
        auto& row = mt.new_row();
        row.push_back(Cell::number(static_cast<double>(n + 1)));
        row.push_back(Cell::number(modes.frequencies[n] / kTwoPi));
    }
    out.tables.emplace_back("modes", std::move(mt));
    (void)threads;
    return out;
}

CommandOutput cmd_phase_map(RunConfig& cfg, int threads) {
    const std::string species = cfg.get_string("species");
    const int n_ions = cfg.get_int("n_ions");
    const double wx = kTwoPi * cfg.get_double("axial_freq_hz");
    const double wy = kTwoPi * cfg.get_double("transverse_freq_y_hz");
    gap::GridSpec wz_grid;
    wz_grid.lo = kTwoPi * cfg.get_double("omega_z_min_hz");
    wz_grid.hi = kTwoPi * cfg.get_double("omega_z_max_hz");
    wz_grid.points = cfg.get_int("omega_z_points");
    gap::GridSpec tb_grid;
    tb_grid.lo = cfg.get_double("tbar_min");
    tb_grid.hi = cfg.get_double("tbar_max");
    tb_grid.points = cfg.get_int("tbar_points");
    const double detuning = kTwoPi * cfg.get_double("detuning_hz");
    ions::PhaseMapOptions opts;
    opts.trunc.n_modes = cfg.get_int("n0_modes", 64);
    opts.threads = threads;
    if (cfg.has("force_strength_n")) opts.force_strength = cfg.get_double("force_strength_n");
    opts.margin_max = cfg.get_double("margin_max", 0.1);
    cfg.reject_unknown_keys();

    const auto spec = ions::IonChainSpec::species(species, n_ions, wx, wy, wz_grid.hi);
    const auto grid = ions::thermal_phase_map(spec, wz_grid, tb_grid, detuning, opts);

    CommandOutput out;
    ResultTable table;
    stamp(table, cfg);
    stamp_config(table, cfg);
    if (const auto warn = ions::linear_regime_warning(spec)) table.add_meta("warning", *warn);
    table.add_meta("lambdabar0", grid.lambdabar0);
    table.add_meta("bulk_spacing_over_l", grid.bulk_spacing);
    table.columns = {"omega_z_hz", "tbar",       "valid", "mubar_sq", "mpbar_sq",
                     "z",          "xi_over_d",  "nbar",  "omega_zz_p_hz"};
    for (const auto& c : grid.cells) {
        auto& row = table.new_row();
        row.push_back(Cell::number(c.omega_z / kTwoPi));
        row.push_back(Cell::number(c.tbar));
        row.push_back(Cell::number(c.valid ? 1.0 : 0.0));
        row.push_back(Cell::number(c.mubar_sq));
        row.push_back(Cell::number(c.mpbar_sq));
        row.push_back(Cell::number(c.z));
        row.push_back(Cell::number(c.xi_over_d));
        row.push_back(Cell::number(c.nbar));
        row.push_back(Cell::number(c.omega_zz_p / kTwoPi));
    }
    out.tables.emplace_back("", std::move(table));

    ResultTable ct;
    stamp(ct, cfg);
    ct.columns = {"tbar", "omega_z_critical_hz"};
    for (const auto& [wz_c, tb] : grid.critical_curve) {
        auto& row = ct.new_row();
        row.push_back(Cell::number(tb));
        row.push_back(Cell::number(wz_c / kTwoPi));
    }
    out.tables.emplace_back("critical", std::move(ct));
    return out;
}

CommandOutput cmd_convergence(RunConfig& cfg, int threads) {
    const auto studies = cfg.get_string_list("study", {"tadpole", "sunrise", "wavefunction"});
    const int n_sites = cfg.get_int("n_sites");
    const double mu2 = cfg.get_double("mu2_lattice", 1.0);
    const auto spec = lattice::LatticeSpec::nearest_neighbor(n_sites);

    CommandOutput out;
    ResultTable table;
    stamp(table, cfg);

    bool sweep = false;
    for (const auto& s : studies) sweep = sweep || s == "thermal-sweep";
    if (sweep) {
        gap::GridSpec tg;
        tg.lo = cfg.get_double("t_min_lattice");
        tg.hi = cfg.get_double("t_max_lattice");
        tg.points = cfg.get_int("t_points");
        stamp_config(table, cfg);
        cfg.reject_unknown_keys();
        // Thermodynamic-limit asymptotes: elliptic closed form for the
        // tadpole, a converged large lattice for the sunrise.
        const double td_limit = 0.25 / M_PI / std::sqrt(1.0 + 0.25 * mu2) *
                                sf::elliptic_k(1.0 / (1.0 + 0.25 * mu2));
        const auto big = lattice::LatticeSpec::nearest_neighbor(2000);
        const double sr_limit = -mu2 * loops::sunrise_kernel(mu2, 0.0, big);
        table.add_meta("tadpole_t0_thermodynamic_limit", td_limit);
        table.add_meta("sunrise_t0_thermodynamic_limit", sr_limit);
        table.columns = {"t_lattice", "sigma_td_over_lambda0", "mu2_sigma_sr_over_lambda0_2"};
        const auto temps = tg.values();
        std::vector<std::pair<double, double>> vals(temps.size());
        parallel_for(temps.size(), threads, [&](std::size_t i) {
            vals[i] = {loops::tadpole_shift(mu2, temps[i], 1.0, spec).value,
                       mu2 * loops::sunrise_mass_shift(mu2, temps[i], 1.0, spec).value};
        });
        for (std::size_t i = 0; i < temps.size(); ++i) {
            auto& row = table.new_row();
            row.push_back(Cell::number(temps[i]));
            row.push_back(Cell::number(vals[i].first));
            row.push_back(Cell::number(vals[i].second));
        }
        out.tables.emplace_back("", std::move(table));
        return out;
    }

    const double t_single = cfg.get_double("t_lattice", 1.0);
    const auto t_list = cfg.get_double_list("t_list_lattice", {t_single});
    const auto n0_tad = cfg.get_int_list("n0_list_tadpole", {4, 8, 16, 32, 64, 128, 256, 512,
                                                             1024, 2048, 4096});
    const auto n0_sr = cfg.get_int_list("n0_list_sunrise", {2, 4, 8, 16, 32, 64});
    const auto n0_wf = cfg.get_int_list("n0_list_wavefunction", {8, 16, 32, 64, 128});
    stamp_config(table, cfg);
    cfg.reject_unknown_keys();

    table.columns = {"study", "t_lattice", "n0", "value", "closed_form", "abs_gap"};
    struct Job {
        std::string study;
        double t;
        int n0;
    };
    std::vector<Job> jobs;
    for (const auto& s : studies)
        for (double t : t_list) {
            const auto& list = s == "tadpole" ? n0_tad : (s == "sunrise" ? n0_sr : n0_wf);
            for (int n0 : list) jobs.push_back({s, t, n0});
        }
    std::vector<std::pair<double, double>> results(jobs.size());  // value, closed form
    parallel_for(jobs.size(), threads, [&](std::size_t i) {
        const auto& job = jobs[i];
        if (job.study == "tadpole")
            results[i] = {loops::tadpole_shift_truncated(mu2, job.t, 1.0, spec, {job.n0}).value,
                          loops::tadpole_shift(mu2, job.t, 1.0, spec).value};
        else if (job.study == "sunrise")
            results[i] = {
                loops::sunrise_mass_shift_truncated(mu2, job.t, 1.0, spec, {job.n0}).value,
                loops::sunrise_mass_shift(mu2, job.t, 1.0, spec).value};
        else if (job.study == "wavefunction")
            results[i] = {loops::sunrise_k0_derivative(mu2, job.t, 1.0, spec, {job.n0}).value,
                          std::numeric_limits<double>::quiet_NaN()};
        else
            throw ConfigError("convergence: unknown study '" + job.study + "'");
    });
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        auto& row = table.new_row();
        row.push_back(Cell::str(jobs[i].study));
        row.push_back(Cell::number(jobs[i].t));
        row.push_back(Cell::number(jobs[i].n0));
        row.push_back(Cell::number(results[i].first));
        row.push_back(Cell::number(results[i].second));
        row.push_back(Cell::number(std::abs(results[i].first - results[i].second)));
    }
    out.tables.emplace_back("", std::move(table));
    return out;
}

}  // namespace

CommandOutput run_command(RunConfig& cfg, int threads) {
    const auto t0 = std::chrono::steady_clock::now();
    CommandOutput out;
    const std::string& cmd = cfg.command();
    if (cmd == "critical-line")
        out = cmd_critical_line(cfg, threads);
    else if (cmd == "mass-contour")
        out = cmd_mass_contour(cfg, threads);
    else if (cmd == "critical-ratio")
        out = cmd_critical_ratio(cfg, threads);
    else if (cmd == "ion-couplings")
        out = cmd_ion_couplings(cfg, threads);
    else if (cmd == "phase-map")
        out = cmd_phase_map(cfg, threads);
    else if (cmd == "convergence")
        out = cmd_convergence(cfg, threads);
    else
        throw ConfigError("unknown command '" + cmd + "'");
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    for (auto& [suffix, table] : out.tables)
        table.run_info =
            "wall_clock_ms=" + std::to_string(ms) + " threads=" + std::to_string(threads);
    return out;
}

std::vector<std::string> command_names() {
    return {"critical-line", "mass-contour", "critical-ratio",
            "ion-couplings", "phase-map",    "convergence"};
}

}  // namespace phi4ion::io
