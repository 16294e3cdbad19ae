#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "CLI11.hpp"
#include "biot/cli.hpp"

namespace biot::cli {

namespace {

double parse_number(const std::string& text, const std::string& key) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw ConfigError(key + ": not a number: '" + text + "'");
    }
    if (pos != text.size() || !std::isfinite(v)) throw ConfigError(key + ": not a number: '" + text + "'");
    return v;
}

}  // namespace

double parse_step(const std::string& text) {
    const auto slash = text.find('/');
    if (slash == std::string::npos) return parse_number(text, "tau");
    const double num = parse_number(text.substr(0, slash), "tau");
    const double den = parse_number(text.substr(slash + 1), "tau");
    if (den == 0.0) throw ConfigError("tau: zero denominator in '" + text + "'");
    return num / den;
}

RunConfig parse_config(int argc, const char* const* argv) {
    RunConfig c;
    CLI::App app{"Quasi-static poroelasticity time loops"};
    app.allow_config_extras(false);
    app.set_config("--config", "", "flat key=value file with the same keys as the flags");

    std::string tau_text;
    std::optional<double> T;
    std::optional<int> n_time;
    std::optional<int> ny;
    std::optional<int> n_iter;
    std::optional<int> pilot;
    std::optional<double> tol;
    std::optional<double> permeability;
    std::string stabilization = "on";
    std::string output;

    app.add_option("--case", c.case_name, "trig | barry-mercer | mandel | zero")
        ->check(CLI::IsMember({"trig", "barry-mercer", "mandel", "zero"}));
    app.add_option("--nx", c.nx, "cells in x");
    app.add_option("--ny", ny, "cells in y (default nx)");
    app.add_option("--tau", tau_text, "time step, decimal or fraction such as 1/1024");
    app.add_option("--T", T, "final time");
    app.add_option("--n-time", n_time, "number of steps");
    app.add_option("--engine", c.engine, "sequential | inverted | pipeline")
        ->check(CLI::IsMember({"sequential", "inverted", "pipeline"}));
    app.add_option("--precond", c.precond, "p1 | p2")->check(CLI::IsMember({"p1", "p2"}));
    app.add_option("--threads", c.threads, "worker threads (pipeline) or sweeps (inverted)");
    app.add_option("--n-iter", n_iter, "iterations per visit");
    app.add_option("--pilot-steps", pilot, "calibrate n_iter from this many sequential steps");
    app.add_option("--tol", tol, "relative residual tolerance");
    app.add_option("--restart", c.restart, "GMRES restart length");
    app.add_option("--max-iters", c.max_iters, "iteration cap for solves to tolerance");
    app.add_option("--stabilization", stabilization, "on | off")->check(CLI::IsMember({"on", "off"}));
    app.add_option("--permeability", permeability, "Barry-Mercer permeability K");
    app.add_flag("--match-tolerance", c.match_tolerance, "inverted visits stop at the tolerance");
    app.add_option("--stage-budget", c.stage_budget, "pipeline watchdog budget per stage, seconds");
    app.add_option("--repeat", c.repeat, "timed repetitions of the time loop");
    app.add_option("--output", output, "CSV path (default $BIOT_OUTPUT_DIR/biot_results.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested(app.help());
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }

    c.ny = ny.value_or(c.nx);
    if (c.nx < 1) throw ConfigError("nx: must be >= 1");
    if (c.ny < 1) throw ConfigError("ny: must be >= 1");
    if (c.threads < 1) throw ConfigError("threads: must be >= 1");
    if (c.restart < 1) throw ConfigError("restart: must be >= 1");
    if (c.max_iters < 1) throw ConfigError("max-iters: must be >= 1");
    if (c.repeat < 1) throw ConfigError("repeat: must be >= 1");
    if (c.stage_budget < 0.0) throw ConfigError("stage-budget: must be >= 0");

    if (tau_text.empty()) throw ConfigError("tau: required");
    c.tau = parse_step(tau_text);
    if (!(c.tau > 0.0)) throw ConfigError("tau: must be positive");
    if (T && !(*T > 0.0)) throw ConfigError("T: must be positive");
    if (n_time && *n_time < 1) throw ConfigError("n-time: must be >= 1");
    if (!T && !n_time) throw ConfigError("T: one of T or n-time is required");
    if (T) {
        const double ratio = *T / c.tau;
        const double rounded = std::round(ratio);
        if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
            throw ConfigError("T: not a whole number of steps of size tau");
        }
        if (n_time && *n_time != static_cast<int>(rounded)) throw ConfigError("n-time: inconsistent with T/tau");
        c.n_time = static_cast<int>(rounded);
    } else {
        c.n_time = *n_time;
    }
    c.T = c.tau * c.n_time;

    if (n_iter && pilot) throw ConfigError("n-iter: give either n-iter or pilot-steps, not both");
    if (n_iter && *n_iter < 1) throw ConfigError("n-iter: must be >= 1");
    if (pilot && *pilot < 1) throw ConfigError("pilot-steps: must be >= 1");
    c.n_iter = n_iter;
    c.pilot_steps = pilot.value_or(std::min(c.n_time, 16));
    if (c.engine == "sequential" && c.threads != 1) throw ConfigError("threads: the sequential engine uses one thread");

    c.tol = tol.value_or(c.case_name == "barry-mercer" ? 1e-10 : 1e-7);
    if (!(c.tol > 0.0)) throw ConfigError("tol: must be positive");
    if (permeability) {
        if (c.case_name != "barry-mercer") throw ConfigError("permeability: only used by the barry-mercer case");
        if (!(*permeability > 0.0)) throw ConfigError("permeability: must be positive");
    }
    c.permeability = permeability;
    c.stabilization = stabilization == "on";

    if (output.empty()) {
        const char* dir = std::getenv("BIOT_OUTPUT_DIR");
        const std::filesystem::path base = (dir != nullptr && *dir != '\0') ? dir : ".";
        output = (base / "biot_results.csv").string();
    }
    c.output = output;
    return c;
}

RunConfig parse_config(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("biot_run");
    for (const auto& a : args) argv.push_back(a.c_str());
    return parse_config(static_cast<int>(argv.size()), argv.data());
}

}  // namespace biot::cli
