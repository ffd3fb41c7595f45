// app.hpp
// Command-line front end: run, plot, fit, feasibility, list-golden.

#pragma once

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "oscunruh/cli/config.hpp"
#include "oscunruh/cli/golden_configs.hpp"
#include "oscunruh/cli/plot.hpp"
#include "oscunruh/cli/scan_io.hpp"
#include "oscunruh/cli/scenario.hpp"

namespace oscunruh::cli {

inline std::optional<std::string> golden_text(const std::string& name) {
    for (const auto& g : golden_configs)
        if (g.name == name) return std::string(g.text);
    return std::nullopt;
}

// A path to an existing file, otherwise the name of a bundled config.
inline ScenarioConfig load_config(const std::string& arg) {
    if (std::filesystem::is_regular_file(arg)) {
        std::ifstream in(arg);
        std::stringstream buf;
        buf << in.rdbuf();
        try {
            return parse_config(buf.str());
        } catch (const ConfigError& e) {
            throw ConfigError(arg + ": " + e.what());
        }
    }
    if (auto text = golden_text(arg)) return parse_config(*text);
    throw ConfigError("'" + arg + "' is neither a config file nor a bundled config (see list-golden)");
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Oscillatory Unruh detector simulator"};
    app.require_subcommand(1);

    std::string config_arg, out_dir = ".";
    auto* run = app.add_subcommand("run", "Run a scenario config (file path or bundled name)");
    run->add_option("config", config_arg, "Config file or bundled config name")->required();
    run->add_option("-o,--out-dir", out_dir, "Directory for output files");

    std::string csv_path, svg_path;
    std::vector<std::string> columns;
    auto* plot = app.add_subcommand("plot", "Render CSV columns as an SVG line plot");
    plot->add_option("csv", csv_path, "Trace CSV from run")->required();
    plot->add_option("--cols", columns, "Columns to draw")->required()->delimiter(',');
    plot->add_option("-o,--output", svg_path, "Output SVG (default: CSV path with .svg)");

    std::string red_path, blue_path, fit_out;
    int n_max = 5;
    std::string truncation = "aic";
    auto* fit = app.add_subcommand("fit", "Fit a phonon distribution to red and blue scan files");
    fit->add_option("red", red_path, "Red sideband scan file")->required();
    fit->add_option("blue", blue_path, "Blue sideband scan file")->required();
    fit->add_option("--n-max", n_max, "Largest phonon number in the fit")->check(CLI::Range(1, 5));
    fit->add_option("--truncation", truncation, "aic or fixed")->check(CLI::IsMember({"aic", "fixed"}));
    fit->add_option("-o,--output", fit_out, "Write the fitted table as CSV");

    std::string feas_arg;
    auto* feas = app.add_subcommand("feasibility", "Excitation-rate estimate from a feasibility config");
    feas->add_option("config", feas_arg, "Config file or bundled config name")->required();

    std::string show;
    auto* list = app.add_subcommand("list-golden", "List bundled configs");
    list->add_option("--show", show, "Print one bundled config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_validation;
    }

    try {
        if (*run) {
            const auto config = load_config(config_arg);
            const auto outcome = run_scenario(config, out_dir);
            for (const auto& f : outcome.files) out << "wrote " << f << "\n";
            out << outcome.summary << "\n";
            return outcome.exit_code;
        }
        if (*plot) {
            if (svg_path.empty()) svg_path = std::filesystem::path(csv_path).replace_extension(".svg").string();
            emit_plot(csv_path, columns, svg_path);
            out << "wrote " << svg_path << "\n";
            return exit_ok;
        }
        if (*fit) {
            const auto result = fit_distribution(read_scan(red_path), read_scan(blue_path), n_max,
                                                 truncation == "aic" ? Truncation::Aic : Truncation::Fixed);
            const auto table = format_fit_csv(result);
            if (!fit_out.empty()) {
                write_text(fit_out, table);
                out << "wrote " << fit_out << "\n";
            } else {
                out << table;
            }
            out << describe_fit(result) << "\n";
            return exit_ok;
        }
        if (*feas) {
            const auto config = load_config(feas_arg);
            if (config.type != ScenarioType::Feasibility)
                throw ConfigError("'" + feas_arg + "' is a " + to_string(config.type) + " config, not feasibility");
            out << describe_feasibility(feasibility_estimate(config.feasibility)) << "\n";
            return exit_ok;
        }
        if (*list) {
            if (!show.empty()) {
                const auto text = golden_text(show);
                if (!text) throw ConfigError("no bundled config named '" + show + "'");
                out << *text;
                return exit_ok;
            }
            for (const auto& g : golden_configs) out << g.name << "\n";
            return exit_ok;
        }
    } catch (const IntegrationFailure& e) {
        err << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const NumericalInconsistency& e) {
        err << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const IllConditionedFit& e) {
        err << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const UndefinedPeriod& e) {
        err << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_validation;
    }
    return exit_ok;
}

}  // namespace oscunruh::cli
