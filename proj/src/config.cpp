#include "bifirom/config.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "bifirom/nonlinear.hpp"

namespace bifirom {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct IniData {
    // "section.key" -> value
    std::map<std::string, std::string> values;

    const std::string* find(const std::string& key) const {
        auto it = values.find(key);
        return it == values.end() ? nullptr : &it->second;
    }
};

IniData parse_ini(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("config: cannot open '" + path + "'");
    IniData ini;
    std::string line, section;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ContractError("config: malformed section header at line " +
                                    std::to_string(lineno));
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ContractError("config: expected 'key = value' at line " +
                                std::to_string(lineno));
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ContractError("config: empty key at line " + std::to_string(lineno));
        }
        ini.values[section + "." + key] = value;
    }
    return ini;
}

std::size_t to_size(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size() || x < 0) throw std::invalid_argument(v);
        return static_cast<std::size_t>(x);
    } catch (const std::exception&) {
        throw ContractError("config: " + key + " is not a non-negative integer: '" + v + "'");
    }
}

double to_real(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ContractError("config: " + key + " is not a real number: '" + v + "'");
    }
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
    const IniData ini = parse_ini(path);

    static const std::vector<std::string> known = {
        "problem.id", "grids.hf", "grids.lf",
        "sampling.n_p", "sampling.test_n", "sampling.seed_train", "sampling.seed_test",
        "rom.N_rb", "rom.n_L", "rom.n_f",
        "iteration.method", "iteration.tol_rel", "iteration.max_iter",
        "output.dir"};
    for (const auto& [key, value] : ini.values) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ContractError("config: unknown key '" + key + "'");
        }
    }

    RunConfig cfg;
    auto get = [&](const char* key) { return ini.find(key); };
    if (const auto* v = get("problem.id")) cfg.problem_id = *v;
    if (const auto* v = get("grids.hf")) cfg.hf = *v;
    if (const auto* v = get("grids.lf")) cfg.lf = *v;
    if (const auto* v = get("sampling.n_p")) cfg.n_p = to_size("sampling.n_p", *v);
    if (const auto* v = get("sampling.test_n")) cfg.test_n = to_size("sampling.test_n", *v);
    if (const auto* v = get("sampling.seed_train"))
        cfg.seed_train = to_size("sampling.seed_train", *v);
    if (const auto* v = get("sampling.seed_test"))
        cfg.seed_test = to_size("sampling.seed_test", *v);
    if (const auto* v = get("rom.N_rb")) cfg.N_rb = to_size("rom.N_rb", *v);
    if (const auto* v = get("rom.n_L")) cfg.n_L = to_size("rom.n_L", *v);
    if (const auto* v = get("rom.n_f")) cfg.n_f = to_size("rom.n_f", *v);
    if (const auto* v = get("iteration.method")) cfg.method = *v;
    if (const auto* v = get("iteration.tol_rel"))
        cfg.tol_rel = to_real("iteration.tol_rel", *v);
    if (const auto* v = get("iteration.max_iter"))
        cfg.max_iter = static_cast<int>(to_size("iteration.max_iter", *v));
    if (const auto* v = get("output.dir")) cfg.output_dir = *v;

    cfg.validate();
    return cfg;
}

void RunConfig::validate() const {
    if (problem_id.empty()) throw ContractError("config: [problem] id is required");
    get_problem(problem_id);
    if (test_n < 1) throw ContractError("config: [sampling] test_n must be >= 1");
    offline().validate();
}

OfflineConfig RunConfig::offline() const {
    const ProblemSpec& problem = get_problem(problem_id);
    const StructuredGrid hf_size = parse_grid(hf);
    const StructuredGrid lf_size = parse_grid(lf);

    OfflineConfig cfg;
    cfg.problem_id = problem_id;
    cfg.hf_grid = grid_for_problem(problem, hf_size.nx, hf_size.ny);
    cfg.lf_grid = grid_for_problem(problem, lf_size.nx, lf_size.ny);
    cfg.n_p = n_p;
    cfg.N_rb = N_rb;
    cfg.n_L = n_L;
    cfg.n_f = n_f;
    cfg.seed = seed_train;

    IterationConfig it;
    it.method = method.empty() ? default_method(problem) : parse_method(method);
    it.tol_rel = tol_rel;
    it.max_iter = max_iter;
    cfg.it_hf = it;
    cfg.it_lf = it;
    return cfg;
}

ParameterSet RunConfig::test_set() const {
    return sample_parameters(get_problem(problem_id), test_n, seed_test, "test");
}

std::string csv_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_csv(const std::string& path, bool append) {
    std::ofstream f(path, append ? std::ios::app : std::ios::trunc);
    if (!f) throw IoError("csv: cannot open '" + path + "' for writing");
    return f;
}

void write_mu_header(std::ofstream& f, std::size_t d) {
    for (std::size_t i = 0; i < d; ++i) f << "mu" << (i + 1) << ",";
}

void write_mu(std::ofstream& f, const ParameterPoint& mu) {
    for (double v : mu) f << csv_real(v) << ",";
}

std::size_t mu_dim(const ErrorTable& table) {
    return table.rows.empty() ? 0 : table.rows.front().mu.size();
}

}  // namespace

void emit_errors_csv(const ErrorTable& table, std::size_t N_rb, const std::string& path,
                     bool append) {
    std::ofstream f = open_csv(path, append);
    if (!append) {
        f << "N_rb,";
        write_mu_header(f, mu_dim(table));
        f << "e_u,e_u_ref,e_u_lf,t_lf_s,t_online_s,t_hf_s\n";
    }
    for (const auto& r : table.rows) {
        f << N_rb << ",";
        write_mu(f, r.mu);
        f << csv_real(r.e_u) << "," << csv_real(r.e_u_ref) << "," << csv_real(r.e_u_lf)
          << "," << csv_real(r.t_lf) << "," << csv_real(r.t_online) << ","
          << csv_real(r.t_hf) << "\n";
    }
    if (!f) throw IoError("csv: write failed for '" + path + "'");
}

void emit_summary_csv(const std::vector<std::pair<std::size_t, ErrorTable>>& runs,
                      const std::string& path) {
    std::ofstream f = open_csv(path, false);
    f << "N_rb,n_test,excluded,mean_e_u,mean_e_u_ref,mean_e_u_lf,"
         "mean_t_online_s,mean_t_hf_s,median_t_online_s,median_t_hf_s,speedup_median\n";
    for (const auto& [N_rb, t] : runs) {
        f << N_rb << "," << t.rows.size() << "," << t.excluded << ","
          << csv_real(t.mean_e_u) << "," << csv_real(t.mean_e_u_ref) << ","
          << csv_real(t.mean_e_u_lf) << "," << csv_real(t.mean_t_online) << ","
          << csv_real(t.mean_t_hf) << "," << csv_real(t.median_t_online) << ","
          << csv_real(t.median_t_hf) << "," << csv_real(t.speedup_median()) << "\n";
    }
    if (!f) throw IoError("csv: write failed for '" + path + "'");
}

void emit_compare_csv(const ErrorTable& table, const std::string& path) {
    std::ofstream f = open_csv(path, false);
    write_mu_header(f, mu_dim(table));
    f << "e_u_proposed,e_u_reference,e_u_lf\n";
    for (const auto& r : table.rows) {
        write_mu(f, r.mu);
        f << csv_real(r.e_u) << "," << csv_real(r.e_u_ref) << "," << csv_real(r.e_u_lf)
          << "\n";
    }
    if (!f) throw IoError("csv: write failed for '" + path + "'");
}

void emit_hist_csv(const ErrorTable& table, const std::string& path) {
    // log10-error bins of width 0.5; an error of exactly a bin edge counts
    // into the bin above it.
    auto bin_of = [](double e) {
        const double l = std::log10(std::max(e, 1e-300));
        return static_cast<long>(std::floor(l / 0.5));
    };
    std::map<long, std::array<std::size_t, 3>> bins;
    for (const auto& r : table.rows) {
        ++bins[bin_of(r.e_u)][0];
        ++bins[bin_of(r.e_u_ref)][1];
        ++bins[bin_of(r.e_u_lf)][2];
    }
    std::ofstream f = open_csv(path, false);
    f << "log10_lo,log10_hi,count_proposed,count_reference,count_lf\n";
    for (const auto& [b, counts] : bins) {
        f << csv_real(0.5 * b) << "," << csv_real(0.5 * (b + 1)) << "," << counts[0]
          << "," << counts[1] << "," << counts[2] << "\n";
    }
    if (!f) throw IoError("csv: write failed for '" + path + "'");
}

}  // namespace bifirom
