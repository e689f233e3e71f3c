#pragma once

#include <string>
#include <utility>

#include "bifirom/rom_offline.hpp"
#include "bifirom/rom_online.hpp"

namespace bifirom {

// Benchmark run description, read from a flat INI file with sections
// [problem] id; [grids] hf/lf as "128x128"; [sampling] n_p, test_n,
// seed_train, seed_test; [rom] N_rb, n_L, n_f; [iteration] method, tol_rel,
// max_iter; [output] dir.
struct RunConfig {
    std::string problem_id;
    std::string hf = "128x128";
    std::string lf = "8x8";
    std::size_t n_p = 0;
    std::size_t test_n = 0;
    std::uint64_t seed_train = 1;
    std::uint64_t seed_test = 2;
    std::size_t N_rb = 0;
    std::size_t n_L = 0;
    std::size_t n_f = 1;
    std::string method;  // empty means the problem's default
    double tol_rel = 1e-10;
    int max_iter = 50;
    std::string output_dir = ".";

    void validate() const;
    OfflineConfig offline() const;
    ParameterSet test_set() const;
};

// Throws IoError on missing file, ContractError on unknown keys or bad
// values. Lines are `key = value`; `#` and `;` start comments.
RunConfig load_run_config(const std::string& path);

// Roundtrip-safe real formatting (17 significant digits).
std::string csv_real(double v);

// RFC-4180-style CSV, LF endings. One row per test point.
void emit_errors_csv(const ErrorTable& table, std::size_t N_rb, const std::string& path,
                     bool append = false);
// Aggregate means, medians and the speedup ratio, one row per N_rb entry.
void emit_summary_csv(const std::vector<std::pair<std::size_t, ErrorTable>>& runs,
                      const std::string& path);
// Per-point proposed / reference / LF errors.
void emit_compare_csv(const ErrorTable& table, const std::string& path);
// log10-error histogram, bin width 0.5, for the three error columns.
void emit_hist_csv(const ErrorTable& table, const std::string& path);

}  // namespace bifirom
