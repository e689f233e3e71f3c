#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bifirom/nonlinear.hpp"

namespace bifirom {

struct ParameterSet {
    std::vector<ParameterPoint> points;
    std::string provenance;  // "candidate", "selected-u", "selected-L", "selected-f", "test"
    std::uint64_t seed = 0;

    std::size_t size() const { return points.size(); }
};

// Uniform i.i.d. samples over the problem's parameter box with a seeded PRNG.
ParameterSet sample_parameters(const ProblemSpec& problem, std::size_t count,
                               std::uint64_t seed, const std::string& provenance);

// Column-stacked solution / vectorized-operator / rhs snapshots over a
// parameter list; column j of each matrix belongs to params.points[j].
struct SnapshotSet {
    DenseMatrix U;
    DenseMatrix Lvec;
    DenseMatrix F;
    ParameterSet params;
    SparsityPattern pattern;
    std::string fidelity;  // "low" or "high"
    std::vector<int> iterations;
};

// Runs solve_fidelity per point (parallel over points, gathered in input
// order). Any non-convergent point fails the whole sweep with an offender
// list; dropped columns would silently corrupt the column<->parameter map.
SnapshotSet sweep(const ProblemSpec& problem, const StructuredGrid& grid,
                  const ParameterSet& params, const IterationConfig& config,
                  const std::string& fidelity = "low");

// Worker count: BIFIROM_THREADS when set, hardware concurrency otherwise.
unsigned worker_count();

struct DedupUnion {
    // Distinct candidate-set indices, first-occurrence order over (u, L, f).
    std::vector<std::size_t> union_indices;
    // Position of every input index inside union_indices.
    std::vector<std::size_t> u_map, L_map, f_map;
};

DedupUnion dedup_union(const std::vector<std::size_t>& gamma_u,
                       const std::vector<std::size_t>& gamma_L,
                       const std::vector<std::size_t>& gamma_f);

}  // namespace bifirom
