#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "phi4ion/commands.hpp"
#include "phi4ion/config.hpp"
#include "phi4ion/constants.hpp"
#include "phi4ion/errors.hpp"
#include "phi4ion/gap.hpp"
#include "phi4ion/ion_chain.hpp"
#include "phi4ion/lattice.hpp"
#include "phi4ion/loops.hpp"
#include "phi4ion/presets.hpp"
#include "phi4ion/special_functions.hpp"
#include "phi4ion/table.hpp"

namespace py = pybind11;
using namespace phi4ion;

namespace {

lattice::LatticeSpec make_spec(int n_sites, double spacing) {
    return lattice::LatticeSpec::nearest_neighbor(n_sites, spacing);
}

}  // namespace

PYBIND11_MODULE(_phi4ion, m) {
    m.doc() = "Self-consistent thermal renormalization of the 1+1d lattice phi^4 model and "
              "trapped-ion spin-coupling pipelines";

    // ---- special functions ----
    m.def(
        "truncated_zeta", [](double s, std::int64_t n) { return sf::truncated_zeta(s, {n}); },
        py::arg("s"), py::arg("n_terms"));
    m.def(
        "truncated_eta", [](double s, std::int64_t n) { return sf::truncated_eta(s, {n}); },
        py::arg("s"), py::arg("n_terms"));
    m.def("elliptic_k", &sf::elliptic_k, py::arg("m"));
    m.def("polygamma1", &sf::polygamma1, py::arg("z"));

    // ---- loops on the nearest-neighbor lattice ----
    m.def(
        "tadpole_shift",
        [](double mu_sq, double t, double lambda0, int n_sites, double spacing) {
            return loops::tadpole_shift(mu_sq, t, lambda0, make_spec(n_sites, spacing)).value;
        },
        py::arg("mu_sq"), py::arg("temperature"), py::arg("lambda0"), py::arg("n_sites"),
        py::arg("spacing") = 1.0);
    m.def(
        "sunrise_mass_shift",
        [](double mu_sq, double t, double lambda0, int n_sites, double spacing) {
            return loops::sunrise_mass_shift(mu_sq, t, lambda0, make_spec(n_sites, spacing)).value;
        },
        py::arg("mu_sq"), py::arg("temperature"), py::arg("lambda0"), py::arg("n_sites"),
        py::arg("spacing") = 1.0);
    m.def(
        "sunrise_k0_derivative",
        [](double mu_sq, double t, double lambda0, int n_sites, int n0) {
            return loops::sunrise_k0_derivative(mu_sq, t, lambda0, make_spec(n_sites, 1.0), {n0})
                .value;
        },
        py::arg("mu_sq"), py::arg("temperature"), py::arg("lambda0"), py::arg("n_sites"),
        py::arg("n0_modes") = 64);

    // ---- gap equation and critical quantities ----
    py::class_<gap::GapSolution>(m, "GapSolution")
        .def_readonly("mu_sq", &gap::GapSolution::mu_sq)
        .def_readonly("m0_sq", &gap::GapSolution::m0_sq)
        .def_readonly("lambda0", &gap::GapSolution::lambda0)
        .def_readonly("temperature", &gap::GapSolution::temperature)
        .def_readonly("sigma_td", &gap::GapSolution::sigma_td)
        .def_readonly("iterations", &gap::GapSolution::iterations)
        .def_readonly("residual", &gap::GapSolution::residual);
    py::class_<gap::PhysicalMassResult>(m, "PhysicalMassResult")
        .def_readonly("mp_sq", &gap::PhysicalMassResult::mp_sq)
        .def_readonly("z", &gap::PhysicalMassResult::z)
        .def_readonly("sigma_sr0", &gap::PhysicalMassResult::sigma_sr0)
        .def_readonly("dsigma_dk0sq", &gap::PhysicalMassResult::dsigma_dk0sq);

    m.def(
        "solve_gap",
        [](double m0_sq, double lambda0, double t, int n_sites, double spacing) {
            return gap::solve_gap(m0_sq, lambda0, t, make_spec(n_sites, spacing));
        },
        py::arg("m0_sq"), py::arg("lambda0"), py::arg("temperature"), py::arg("n_sites"),
        py::arg("spacing") = 1.0);
    m.def(
        "physical_mass",
        [](double mu_sq, double lambda0, double t, int n_sites, int n0) {
            return gap::physical_mass(mu_sq, lambda0, t, make_spec(n_sites, 1.0), {n0});
        },
        py::arg("mu_sq"), py::arg("lambda0"), py::arg("temperature"), py::arg("n_sites"),
        py::arg("n0_modes") = 64);
    m.def(
        "trace_critical_line",
        [](double t, double mu_lo, double mu_hi, int points, bool log_spacing, int n_sites,
           int threads) {
            const auto line = gap::trace_critical_line(
                t, {mu_lo, mu_hi, points, log_spacing}, make_spec(n_sites, 1.0), threads);
            std::vector<std::tuple<double, double, double>> out;
            for (const auto& p : line.points) out.emplace_back(p.mu_sq, p.lambda0, p.m0_sq);
            return out;
        },
        py::arg("temperature"), py::arg("mu_sq_lo"), py::arg("mu_sq_hi"), py::arg("points"),
        py::arg("log_spacing") = true, py::arg("n_sites") = 30, py::arg("threads") = 1);
    m.def("critical_ratio_continuum", &gap::critical_ratio_continuum);

    // ---- ion chain ----
    py::class_<ions::EquilibriumConfig>(m, "EquilibriumConfig")
        .def_readonly("positions", &ions::EquilibriumConfig::positions)
        .def_readonly("residual_norm", &ions::EquilibriumConfig::residual_norm)
        .def_readonly("bulk_spacing", &ions::EquilibriumConfig::bulk_spacing);

    m.def(
        "solve_equilibrium",
        [](const std::string& species, int n_ions, double fx_hz, double fy_hz, double fz_hz) {
            const auto spec = ions::IonChainSpec::species(species, n_ions, 2 * M_PI * fx_hz,
                                                          2 * M_PI * fy_hz, 2 * M_PI * fz_hz);
            return ions::solve_equilibrium(spec);
        },
        py::arg("species"), py::arg("n_ions"), py::arg("axial_freq_hz"),
        py::arg("transverse_freq_y_hz"), py::arg("transverse_freq_z_hz"));
    m.def(
        "transverse_mode_freqs_hz",
        [](const std::string& species, int n_ions, double fx_hz, double fy_hz, double fz_hz) {
            const auto spec = ions::IonChainSpec::species(species, n_ions, 2 * M_PI * fx_hz,
                                                          2 * M_PI * fy_hz, 2 * M_PI * fz_hz);
            const auto modes = ions::transverse_normal_modes(ions::solve_equilibrium(spec), spec);
            std::vector<double> out;
            for (double w : modes.frequencies) out.push_back(w / (2 * M_PI));
            return out;
        },
        py::arg("species"), py::arg("n_ions"), py::arg("axial_freq_hz"),
        py::arg("transverse_freq_y_hz"), py::arg("transverse_freq_z_hz"));
    m.def(
        "exact_spin_couplings_hz",
        [](const std::string& species, int n_ions, double fx_hz, double fy_hz, double fz_hz,
           double rabi_hz, double detuning_hz, double wavelength_m, double projection) {
            const auto spec = ions::IonChainSpec::species(species, n_ions, 2 * M_PI * fx_hz,
                                                          2 * M_PI * fy_hz, 2 * M_PI * fz_hz);
            const auto eq = ions::solve_equilibrium(spec);
            const auto modes = ions::transverse_normal_modes(eq, spec);
            const double k = 2 * M_PI / wavelength_m * projection;
            const double recoil = constants::hbar * constants::hbar * k * k / (2 * spec.mass);
            Eigen::MatrixXd j = ions::exact_spin_couplings(spec, modes, 2 * M_PI * rabi_hz,
                                                           2 * M_PI * detuning_hz, recoil)
                                    .j /
                                (2 * M_PI);
            return j;
        },
        py::arg("species"), py::arg("n_ions"), py::arg("axial_freq_hz"),
        py::arg("transverse_freq_y_hz"), py::arg("transverse_freq_z_hz"), py::arg("rabi_hz"),
        py::arg("detuning_hz"), py::arg("laser_wavelength_m") = 729.147e-9,
        py::arg("wavevector_projection") = 1.0);
    m.def("mean_phonon_number", &ions::mean_phonon_number, py::arg("mode_freq_rad_s"),
          py::arg("temperature_k"));
    m.def("temperature_for_nbar", &ions::temperature_for_nbar, py::arg("mode_freq_rad_s"),
          py::arg("nbar"));

    // ---- batch pipelines ----
    m.def("preset_names", &io::preset_names);
    m.def(
        "run_preset",
        [](const std::string& name, int threads, const std::string& format,
           const std::vector<std::string>& overrides) {
            auto cfg = io::RunConfig::parse(io::preset_text(name), io::preset_command(name));
            for (const auto& kv : overrides) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos)
                    throw ConfigError("override expects key=value, got '" + kv + "'");
                cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
            }
            const auto out = io::run_command(cfg, threads);
            std::vector<std::pair<std::string, std::string>> res;
            for (const auto& [suffix, table] : out.tables)
                res.emplace_back(suffix, format == "json" ? io::to_json(table) : io::to_csv(table));
            return res;
        },
        py::arg("name"), py::arg("threads") = 1, py::arg("format") = "csv",
        py::arg("overrides") = std::vector<std::string>{});
    m.def(
        "run_config",
        [](const std::string& text, const std::string& command, int threads,
           const std::string& format) {
            auto cfg = io::RunConfig::parse(text, command);
            const auto out = io::run_command(cfg, threads);
            std::vector<std::pair<std::string, std::string>> res;
            for (const auto& [suffix, table] : out.tables)
                res.emplace_back(suffix, format == "json" ? io::to_json(table) : io::to_csv(table));
            return res;
        },
        py::arg("config_text"), py::arg("command"), py::arg("threads") = 1,
        py::arg("format") = "csv");

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
    py::register_exception<PhysicsError>(m, "PhysicsError", PyExc_ValueError);
}
