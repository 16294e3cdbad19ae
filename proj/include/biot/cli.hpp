#pragma once

#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "biot/benchmark_case.hpp"

namespace biot::cli {

/// Invalid or inconsistent configuration. The message is one line and names the offending key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// --help was given; carries the usage text.
class HelpRequested : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string case_name = "trig";  // trig | barry-mercer | mandel | zero
    int nx = 16;
    int ny = 16;
    double tau = 0.0;
    double T = 0.0;
    int n_time = 0;
    std::string engine = "sequential";  // sequential | inverted | pipeline
    std::string precond = "p1";         // p1 | p2
    int threads = 1;
    /// Fixed iterations per visit; unset means calibration from a pilot run.
    std::optional<int> n_iter;
    int pilot_steps = 0;
    double tol = 1e-7;
    int restart = 30;
    int max_iters = 1000;
    bool stabilization = true;
    /// Barry-Mercer permeability.
    std::optional<double> permeability;
    /// Inverted/pipeline visits stop early once the tolerance is met.
    bool match_tolerance = false;
    double stage_budget = 0.0;
    int repeat = 1;
    std::string output;
};

/// "0.0009765625" or "1/1024".
double parse_step(const std::string& text);

/**
 * Parses flags (argv[0] is the program name). `--config FILE` reads a flat
 * key=value file with the same keys as the long flags; flags win over file
 * values. Throws ConfigError or HelpRequested.
 */
RunConfig parse_config(int argc, const char* const* argv);
RunConfig parse_config(const std::vector<std::string>& args);

/// Builds the case named in the config, applying permeability and stabilization.
BenchmarkCase make_case(const RunConfig& config);

/// Exit codes of `run`.
enum ExitCode : int { ok = 0, failure = 1, tolerance_violation = 2 };

/// Runs the configured experiment, writes the CSV and a summary to `out`, diagnostics to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace biot::cli
