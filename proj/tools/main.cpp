// Command-line front door: offline builds, single online queries, benchmark
// sweeps, method comparisons and FEM verification. Exit codes: 0 success,
// 1 usage/config error, 2 numerical failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "bifirom/artifact_io.hpp"
#include "bifirom/config.hpp"
#include "bifirom/kernels.hpp"

namespace {

using namespace bifirom;

ParameterPoint parse_mu(const std::string& text) {
    ParameterPoint mu;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            mu.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ContractError("--mu: '" + item + "' is not a real number");
        }
    }
    if (mu.empty()) throw ContractError("--mu: empty parameter list");
    return mu;
}

std::vector<std::size_t> parse_nrb_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            const long long v = std::stoll(item, &pos);
            if (pos != item.size() || v < 1) throw std::invalid_argument(item);
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw ContractError("--nrb-list: '" + item + "' is not a positive integer");
        }
    }
    if (out.empty()) throw ContractError("--nrb-list: empty list");
    return out;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.output_dir);
    return (std::filesystem::path(cfg.output_dir) / name).string();
}

// One LF sweep and one HF solve cache shared across basis sizes.
struct SweepContext {
    RunConfig cfg;
    OfflineConfig base;
    ParameterSet gamma;
    SnapshotSet lf;
    SparsityPattern hf_pattern;
    std::map<std::size_t, LinearizedSystem> hf_cache;
    std::size_t hf_calls = 0;

    explicit SweepContext(const RunConfig& run) : cfg(run), base(run.offline()) {
        const ProblemSpec& problem = get_problem(base.problem_id);
        std::cerr << "[offline] LF sweep over " << base.n_p << " candidates on "
                  << cfg.lf << "\n";
        gamma = sample_parameters(problem, base.n_p, base.seed, "candidate");
        lf = sweep(problem, base.lf_grid, gamma, base.it_lf, "low");
        hf_pattern = build_pattern(problem, base.hf_grid);
    }

    RomArtifact build(std::size_t N_rb, OfflineBuildData* data) {
        OfflineConfig c = base;
        c.N_rb = N_rb;
        c.validate();
        const ProblemSpec& problem = get_problem(c.problem_id);
        std::size_t calls = 0;
        HfSolverFn hf = [&](std::size_t idx) {
            auto it = hf_cache.find(idx);
            if (it == hf_cache.end()) {
                ++hf_calls;
                it = hf_cache
                         .emplace(idx, solve_fidelity(problem, c.hf_grid, gamma.points[idx],
                                                      c.it_hf, &hf_pattern))
                         .first;
            }
            ++calls;
            return it->second;
        };
        std::cerr << "[offline] building basis, N_rb = " << N_rb << "\n";
        RomArtifact art = build_artifact_from_snapshots(c, lf, hf, data);
        art.hf_run_count = calls;
        return art;
    }
};

int cmd_offline(const std::string& config_path, const std::string& artifact_path) {
    const RunConfig cfg = load_run_config(config_path);
    OfflineBuildData data;
    const RomArtifact art = build_artifact(cfg.offline(), &data);
    save_artifact(art, artifact_path);
    std::cout << "problem: " << art.problem_id << "\n"
              << "basis_size: " << art.basis_size() << "\n"
              << "n_L: " << art.n_L() << "\n"
              << "n_f: " << art.n_f() << "\n"
              << "hf_runs: " << art.hf_run_count << "\n"
              << "artifact: " << artifact_path << "\n";
    return 0;
}

int cmd_online(const std::string& artifact_path, const std::string& mu_text,
               const std::string& dump_path) {
    const RomArtifact art = load_artifact(artifact_path);
    const ParameterPoint mu = parse_mu(mu_text);
    const OnlineReport rep = online_solve(art, mu);

    std::cout << "problem: " << art.problem_id << "\n"
              << "basis_size: " << art.basis_size() << "\n"
              << "lf_iterations: " << rep.lf_iterations << "\n";
    for (std::size_t j = 0; j < rep.a_l.size(); ++j) {
        std::cout << "a_" << (j + 1) << ": " << csv_real(rep.a_l[j]) << "\n";
    }
    for (std::size_t j = 0; j < rep.b_l.size(); ++j) {
        std::cout << "b_" << (j + 1) << ": " << csv_real(rep.b_l[j]) << "\n";
    }
    std::cout << "ls_residual_operator: " << csv_real(rep.ls_residual_op) << "\n"
              << "ls_residual_rhs: " << csv_real(rep.ls_residual_rhs) << "\n"
              << "reduced_residual: " << csv_real(rep.reduced_residual) << "\n"
              << "t_lf_s: " << csv_real(rep.timings.lf_solve_s) << "\n"
              << "t_online_s: " << csv_real(rep.timings.total_s()) << "\n"
              << "core_flops: " << rep.flops.core_total() << "\n";

    if (!dump_path.empty()) {
        std::ofstream f(dump_path, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open '" + dump_path + "' for writing");
        f.write(reinterpret_cast<const char*>(rep.u_r.data()),
                static_cast<std::streamsize>(rep.u_r.size() * sizeof(double)));
        if (!f) throw IoError("write failed for '" + dump_path + "'");
        std::cout << "solution_file: " << dump_path << "\n"
                  << "solution_len: " << rep.u_r.size() << "\n";
    }
    return 0;
}

int cmd_bench(const std::string& config_path, const std::string& nrb_text) {
    const RunConfig cfg = load_run_config(config_path);
    std::vector<std::size_t> nrb_list =
        nrb_text.empty() ? std::vector<std::size_t>{cfg.N_rb} : parse_nrb_list(nrb_text);

    SweepContext ctx(cfg);
    const ParameterSet test = cfg.test_set();
    const std::string errors_path = out_path(cfg, "errors.csv");

    std::vector<std::pair<std::size_t, ErrorTable>> runs;
    bool first = true;
    for (std::size_t N_rb : nrb_list) {
        OfflineBuildData data;
        const RomArtifact art = ctx.build(N_rb, &data);
        std::cerr << "[bench] evaluating " << test.size() << " test points, N_rb = "
                  << N_rb << "\n";
        ErrorTable table = evaluate(art, data, test);
        emit_errors_csv(table, N_rb, errors_path, !first);
        first = false;
        std::cerr << "[bench] N_rb = " << N_rb << ": mean e_u = " << table.mean_e_u
                  << ", speedup (median) = " << table.speedup_median() << "\n";
        runs.emplace_back(N_rb, std::move(table));
    }
    emit_summary_csv(runs, out_path(cfg, "summary.csv"));
    std::cout << "errors: " << errors_path << "\n"
              << "summary: " << out_path(cfg, "summary.csv") << "\n";
    return 0;
}

int cmd_compare(const std::string& config_path) {
    const RunConfig cfg = load_run_config(config_path);
    SweepContext ctx(cfg);
    OfflineBuildData data;
    const RomArtifact art = ctx.build(cfg.N_rb, &data);
    std::cerr << "[compare] evaluating " << cfg.test_n << " test points\n";
    const ErrorTable table = evaluate(art, data, cfg.test_set());
    emit_compare_csv(table, out_path(cfg, "compare.csv"));
    emit_hist_csv(table, out_path(cfg, "hist.csv"));
    std::cout << "mean_e_u_proposed: " << csv_real(table.mean_e_u) << "\n"
              << "mean_e_u_reference: " << csv_real(table.mean_e_u_ref) << "\n"
              << "mean_e_u_lf: " << csv_real(table.mean_e_u_lf) << "\n"
              << "compare: " << out_path(cfg, "compare.csv") << "\n"
              << "hist: " << out_path(cfg, "hist.csv") << "\n";
    return 0;
}

int cmd_fem_verify() {
    const ProblemSpec& problem = get_problem("manufactured");
    std::printf("%6s %14s %8s %14s %8s\n", "grid", "l2_rel", "rate", "h1_rel", "rate");
    double prev_l2 = 0.0, prev_h1 = 0.0;
    for (int n : {8, 16, 32, 64, 128}) {
        const StructuredGrid grid = grid_for_problem(problem, n, n);
        const AssemblyResult sys = assemble(problem, grid, {});
        const DenseVector u = solve_sparse(sys.op, sys.rhs);
        const ErrorNorms err = fem_error_norms(u, problem, grid);
        if (prev_l2 > 0.0) {
            std::printf("%3dx%-3d %14.6e %8.3f %14.6e %8.3f\n", n, n, err.l2_rel,
                        std::log2(prev_l2 / err.l2_rel), err.h1_rel,
                        std::log2(prev_h1 / err.h1_rel));
        } else {
            std::printf("%3dx%-3d %14.6e %8s %14.6e %8s\n", n, n, err.l2_rel, "-",
                        err.h1_rel, "-");
        }
        prev_l2 = err.l2_rel;
        prev_h1 = err.h1_rel;
    }
    return 0;
}

int cmd_list_problems() {
    for (const auto& id : problem_ids()) {
        const ProblemSpec& p = get_problem(id);
        std::cout << id << ": " << p.description << " (d = " << p.param_dim
                  << ", fields = " << p.n_fields << ")\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bi-fidelity reduced-basis toolkit"};
    app.require_subcommand(1);

    std::string config_path, artifact_path, mu_text, dump_path, nrb_text;

    auto* offline = app.add_subcommand("offline", "build and save a ROM artifact");
    offline->add_option("--config", config_path, "run config file")->required();
    offline->add_option("--out", artifact_path, "artifact output path")->required();

    auto* online = app.add_subcommand("online", "single online query against an artifact");
    online->add_option("--artifact", artifact_path, "artifact file")->required();
    online->add_option("--mu", mu_text, "comma-separated parameter values")->required();
    online->add_option("--dump-solution", dump_path, "write the reconstruction as raw f64");

    auto* bench = app.add_subcommand("bench", "benchmark sweep over basis sizes");
    bench->add_option("--config", config_path, "run config file")->required();
    bench->add_option("--nrb-list", nrb_text, "comma-separated basis sizes");

    auto* compare = app.add_subcommand("compare", "proposed vs reference vs LF");
    compare->add_option("--config", config_path, "run config file")->required();

    app.add_subcommand("fem-verify", "manufactured-solution convergence table");
    app.add_subcommand("list-problems", "registered problem ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        std::cerr << "[kernels] backend: " << kernels::backend() << "\n";
        if (offline->parsed()) return cmd_offline(config_path, artifact_path);
        if (online->parsed()) return cmd_online(artifact_path, mu_text, dump_path);
        if (bench->parsed()) return cmd_bench(config_path, nrb_text);
        if (compare->parsed()) return cmd_compare(config_path);
        if (app.get_subcommand("fem-verify")->parsed()) return cmd_fem_verify();
        if (app.get_subcommand("list-problems")->parsed()) return cmd_list_problems();
    } catch (const NonConvergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const SolverError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
