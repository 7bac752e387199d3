#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "phi4ion/commands.hpp"
#include "phi4ion/config.hpp"
#include "phi4ion/errors.hpp"
#include "phi4ion/presets.hpp"
#include "phi4ion/table.hpp"

namespace {

std::string with_suffix(const std::string& path, const std::string& suffix) {
    if (suffix.empty()) return path;
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return path + "_" + suffix;
    return path.substr(0, dot) + "_" + suffix + path.substr(dot);
}

int run(const std::string& command, const std::string& preset, const std::string& config_path,
        const std::vector<std::string>& sets, const std::string& out_path,
        const std::string& format, int threads) {
    using namespace phi4ion;

    std::string text;
    if (!preset.empty() && !config_path.empty())
        throw ConfigError("use either --preset or --config, not both");
    if (!preset.empty()) {
        if (io::preset_command(preset) != command)
            throw ConfigError("preset '" + preset + "' belongs to command '" +
                              io::preset_command(preset) + "'");
        text = io::preset_text(preset);
    } else if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("cannot open config file '" + config_path + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    } else {
        throw ConfigError("one of --preset or --config is required");
    }

    io::RunConfig cfg = io::RunConfig::parse(text, command);
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }

    const io::CommandOutput out = io::run_command(cfg, threads);
    for (const auto& [suffix, table] : out.tables) {
        const std::string body = format == "json" ? io::to_json(table) : io::to_csv(table);
        if (out_path.empty()) {
            std::cout << body;
            if (out.tables.size() > 1) std::cout << "\n";
        } else {
            const std::string path = with_suffix(out_path, suffix);
            std::ofstream f(path, std::ios::binary);
            if (!f) throw ConfigError("cannot write output file '" + path + "'");
            f << body;
            std::cerr << "wrote " << path << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"thermal self-consistent lattice phi^4 renormalization and trapped-ion "
                 "spin-coupling pipelines"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string preset, config_path, out_path, format = "csv";
    std::vector<std::string> sets;
    int threads = 1;
    app.add_option("--preset", preset, "built-in run configuration (fig2..fig9)");
    app.add_option("--config", config_path, "run configuration file");
    app.add_option("--set", sets, "override a config key (key=value), repeatable");
    app.add_option("--out", out_path, "output file path (stdout when omitted)");
    app.add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", threads, "worker threads for grid sweeps")
        ->check(CLI::PositiveNumber);

    for (const auto& name : phi4ion::io::command_names())
        app.add_subcommand(name, "run the " + name + " pipeline");

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        return run(command, preset, config_path, sets, out_path, format, threads);
    } catch (const phi4ion::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const phi4ion::ConvergenceError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const phi4ion::PhysicsError& e) {
        std::cerr << "physics error: " << e.what() << "\n";
        return 4;
    } catch (const std::domain_error& e) {
        std::cerr << "physics error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
