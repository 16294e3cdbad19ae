#include "biot/reporting.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace biot {

const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols = {
        "case",          "h",           "tau",          "n_time",         "engine",          "preconditioner",
        "n_threads",     "n_iter",      "N_iter",       "wall_seconds",   "total_seconds",   "max_final_residual",
        "mean_iterations", "max_iterations", "l2_error_p", "l2_error_u",  "E1",              "E2",
        "E",             "mandel_cryer", "timestamp",
    };
    return cols;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> fields_of(const RunRecord& r) {
    return {
        r.case_name,         fmt(r.h),
        fmt(r.tau),          std::to_string(r.n_time),
        r.engine,            r.preconditioner,
        std::to_string(r.n_threads), std::to_string(r.n_iter),
        std::to_string(r.N_iter),    fmt(r.wall_seconds),
        fmt(r.total_seconds), fmt(r.max_final_residual),
        fmt(r.mean_iterations), std::to_string(r.max_iterations),
        fmt(r.l2_error_p),   fmt(r.l2_error_u),
        fmt(r.E1),           fmt(r.E2),
        fmt(r.E),            r.mandel_cryer,
        r.timestamp,
    };
}

void append_row(std::string& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out += ',';
        out += quote(fields[i]);
    }
    out += '\n';
}

/// Splits an RFC 4180 document into rows of fields.
std::vector<std::vector<std::string>> split_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool row_started = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        row_started = true;
        if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            row.push_back(std::move(field));
            field.clear();
            rows.push_back(std::move(row));
            row.clear();
            row_started = false;
        } else {
            field += c;
        }
    }
    if (in_quotes) throw std::invalid_argument("parse_csv: unterminated quoted field");
    if (row_started) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

double to_double(const std::string& s, const char* col) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string("parse_csv: bad number in column ") + col);
    }
    if (pos != s.size()) throw std::invalid_argument(std::string("parse_csv: bad number in column ") + col);
    return v;
}

int to_int(const std::string& s, const char* col) {
    std::size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string("parse_csv: bad integer in column ") + col);
    }
    if (pos != s.size()) throw std::invalid_argument(std::string("parse_csv: bad integer in column ") + col);
    return v;
}

std::optional<double> to_opt(const std::string& s, const char* col) {
    if (s.empty()) return std::nullopt;
    return to_double(s, col);
}

}  // namespace

std::string to_csv(const std::vector<RunRecord>& records) {
    std::string out;
    append_row(out, csv_columns());
    for (const auto& r : records) append_row(out, fields_of(r));
    return out;
}

void emit_csv(const std::vector<RunRecord>& records, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << to_csv(records);
    os.flush();
    if (!os) throw std::runtime_error("failed writing " + path);
}

std::vector<RunRecord> parse_csv(const std::string& text) {
    const auto rows = split_rows(text);
    if (rows.empty()) throw std::invalid_argument("parse_csv: missing header");
    if (rows[0] != csv_columns()) throw std::invalid_argument("parse_csv: unexpected header");
    std::vector<RunRecord> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& f = rows[i];
        if (f.size() != csv_columns().size()) {
            throw std::invalid_argument("parse_csv: row " + std::to_string(i) + " has the wrong field count");
        }
        RunRecord r;
        r.case_name = f[0];
        r.h = to_double(f[1], "h");
        r.tau = to_double(f[2], "tau");
        r.n_time = to_int(f[3], "n_time");
        r.engine = f[4];
        r.preconditioner = f[5];
        r.n_threads = to_int(f[6], "n_threads");
        r.n_iter = to_int(f[7], "n_iter");
        r.N_iter = to_int(f[8], "N_iter");
        r.wall_seconds = to_double(f[9], "wall_seconds");
        r.total_seconds = to_double(f[10], "total_seconds");
        r.max_final_residual = to_double(f[11], "max_final_residual");
        r.mean_iterations = to_double(f[12], "mean_iterations");
        r.max_iterations = to_int(f[13], "max_iterations");
        r.l2_error_p = to_opt(f[14], "l2_error_p");
        r.l2_error_u = to_opt(f[15], "l2_error_u");
        r.E1 = to_opt(f[16], "E1");
        r.E2 = to_opt(f[17], "E2");
        r.E = to_opt(f[18], "E");
        r.mandel_cryer = f[19];
        r.timestamp = f[20];
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<SpeedupRow> speedup_table(const std::vector<RunRecord>& records) {
    using Key = std::tuple<std::string, double, double, std::string>;
    std::map<Key, double> baseline;
    for (const auto& r : records) {
        if (r.n_threads == 1) baseline.emplace(Key{r.case_name, r.h, r.tau, r.preconditioner}, r.wall_seconds);
    }
    std::vector<SpeedupRow> rows;
    for (const auto& r : records) {
        const auto it = baseline.find(Key{r.case_name, r.h, r.tau, r.preconditioner});
        if (it == baseline.end()) {
            throw std::invalid_argument("speedup_table: no 1-thread baseline for case " + r.case_name);
        }
        if (!(r.wall_seconds > 0.0)) throw std::invalid_argument("speedup_table: wall_seconds must be positive");
        SpeedupRow row;
        row.case_name = r.case_name;
        row.h = r.h;
        row.tau = r.tau;
        row.preconditioner = r.preconditioner;
        row.n_threads = r.n_threads;
        row.wall_seconds = r.wall_seconds;
        row.speedup = it->second / r.wall_seconds;
        row.efficiency = row.speedup / r.n_threads;
        if (r.E1 && r.E2) row.theoretical = *r.E1 * *r.E2;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace biot
