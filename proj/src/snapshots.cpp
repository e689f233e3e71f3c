#include "bifirom/snapshots.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_map>

namespace bifirom {

ParameterSet sample_parameters(const ProblemSpec& problem, std::size_t count,
                               std::uint64_t seed, const std::string& provenance) {
    std::mt19937_64 rng(seed);
    ParameterSet set;
    set.seed = seed;
    set.provenance = provenance;
    set.points.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        ParameterPoint mu(problem.param_dim);
        for (int a = 0; a < problem.param_dim; ++a) {
            std::uniform_real_distribution<double> dist(problem.param_domain[a][0],
                                                        problem.param_domain[a][1]);
            mu[a] = dist(rng);
        }
        set.points.push_back(std::move(mu));
    }
    return set;
}

unsigned worker_count() {
    if (const char* env = std::getenv("BIFIROM_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? hc : 1;
}

SnapshotSet sweep(const ProblemSpec& problem, const StructuredGrid& grid,
                  const ParameterSet& params, const IterationConfig& config,
                  const std::string& fidelity) {
    if (params.points.empty()) throw ContractError("sweep: empty parameter set");

    const SparsityPattern pattern = build_pattern(problem, grid);
    const std::size_t n = params.size();

    std::vector<LinearizedSystem> systems(n);
    std::vector<std::string> failures(n);

    const unsigned workers = std::min<std::size_t>(worker_count(), n);
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            try {
                systems[i] = solve_fidelity(problem, grid, params.points[i], config, &pattern);
            } catch (const std::exception& e) {
                failures[i] = e.what();
            }
        }
    };
    if (workers <= 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(run);
        for (auto& t : pool) t.join();
    }

    std::ostringstream offenders;
    std::size_t n_failed = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!failures[i].empty()) {
            ++n_failed;
            offenders << "\n  point " << i << ": " << failures[i];
        }
    }
    if (n_failed > 0) {
        throw SolverError("sweep: " + std::to_string(n_failed) + " of " +
                          std::to_string(n) + " points failed:" + offenders.str());
    }

    SnapshotSet out;
    out.params = params;
    out.pattern = pattern;
    out.fidelity = fidelity;
    const std::size_t dofs = systems[0].solution.size();
    out.U = DenseMatrix(dofs, n);
    out.Lvec = DenseMatrix(pattern.nnz(), n);
    out.F = DenseMatrix(dofs, n);
    out.iterations.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        out.U.set_col(j, systems[j].solution);
        out.Lvec.set_col(j, vectorize_operator(systems[j].op, pattern));
        out.F.set_col(j, systems[j].rhs);
        out.iterations[j] = systems[j].iterations;
    }
    return out;
}

DedupUnion dedup_union(const std::vector<std::size_t>& gamma_u,
                       const std::vector<std::size_t>& gamma_L,
                       const std::vector<std::size_t>& gamma_f) {
    DedupUnion out;
    std::unordered_map<std::size_t, std::size_t> pos;
    auto place = [&](std::size_t idx) {
        auto [it, inserted] = pos.try_emplace(idx, out.union_indices.size());
        if (inserted) out.union_indices.push_back(idx);
        return it->second;
    };
    for (auto i : gamma_u) out.u_map.push_back(place(i));
    for (auto i : gamma_L) out.L_map.push_back(place(i));
    for (auto i : gamma_f) out.f_map.push_back(place(i));
    return out;
}

}  // namespace bifirom
