#pragma once

#include <optional>
#include <string>
#include <vector>

namespace biot {

/**
 * One engine run. Column order of the CSV (fixed):
 *   case, h, tau, n_time, engine, preconditioner, n_threads, n_iter, N_iter,
 *   wall_seconds, total_seconds, max_final_residual, mean_iterations,
 *   max_iterations, l2_error_p, l2_error_u, E1, E2, E, mandel_cryer, timestamp
 * Missing optional values are written as empty fields.
 */
struct RunRecord {
    std::string case_name;
    double h = 0.0;
    double tau = 0.0;
    int n_time = 0;
    std::string engine;          // sequential | inverted | pipeline
    std::string preconditioner;  // p1 | p2
    int n_threads = 1;
    int n_iter = 0;
    int N_iter = 0;
    double wall_seconds = 0.0;   // time loop only
    double total_seconds = 0.0;  // including assembly and factorization
    double max_final_residual = 0.0;
    double mean_iterations = 0.0;
    int max_iterations = 0;
    std::optional<double> l2_error_p;
    std::optional<double> l2_error_u;
    std::optional<double> E1;
    std::optional<double> E2;
    std::optional<double> E;
    std::string mandel_cryer;  // present | absent | empty when not applicable
    std::string timestamp;     // ISO 8601 UTC

    bool operator==(const RunRecord&) const = default;
};

const std::vector<std::string>& csv_columns();

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

/// Header plus one line per record. Throws std::runtime_error naming the path on I/O failure.
void emit_csv(const std::vector<RunRecord>& records, const std::string& path);
std::string to_csv(const std::vector<RunRecord>& records);
/// Inverse of to_csv. Throws std::invalid_argument on a malformed document.
std::vector<RunRecord> parse_csv(const std::string& text);

struct SpeedupRow {
    std::string case_name;
    double h = 0.0;
    double tau = 0.0;
    std::string preconditioner;
    int n_threads = 1;
    double wall_seconds = 0.0;
    double speedup = 1.0;
    double efficiency = 1.0;
    /// E1 E2 of the record when available.
    std::optional<double> theoretical;
};

/// speedup(k) = wall(1) / wall(k) within each (case, h, tau, preconditioner) group.
/// Throws std::invalid_argument when a group has no 1-thread record.
std::vector<SpeedupRow> speedup_table(const std::vector<RunRecord>& records);

}  // namespace biot
