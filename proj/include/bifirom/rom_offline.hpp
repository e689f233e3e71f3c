#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bifirom/linalg.hpp"
#include "bifirom/snapshots.hpp"

namespace bifirom {

struct OfflineConfig {
    std::string problem_id;
    StructuredGrid hf_grid;
    StructuredGrid lf_grid;
    std::size_t n_p = 0;
    std::size_t N_rb = 0;
    std::size_t n_L = 0;
    std::size_t n_f = 1;
    IterationConfig it_hf;
    IterationConfig it_lf;
    std::uint64_t seed = 1;

    void validate() const;
};

struct StageTimings {
    double lf_sweep_s = 0.0;
    double selection_s = 0.0;
    double hf_runs_s = 0.0;
    double projection_s = 0.0;
};

// Everything the online stage needs, precomputed offline. All reduced
// dimensions follow the effective basis size (Gram-Schmidt may drop
// dependent columns below the requested N_rb).
struct RomArtifact {
    std::string problem_id;
    StructuredGrid hf_grid, lf_grid;
    std::size_t n_p = 0;
    std::size_t N_rb_requested = 0;
    std::uint64_t seed = 0;
    IterationConfig it_hf, it_lf;

    DenseMatrix Q;                          // N_h x N_rb, orthonormal
    std::vector<DenseMatrix> L_rb_basis;    // n_L matrices, N_rb x N_rb
    std::vector<DenseVector> f_rb_basis;    // n_f vectors, N_rb
    DenseMatrix G_L;                        // n_L x n_L Gramian
    DenseMatrix G_F;                        // n_f x n_f Gramian
    DenseMatrix Llow_gamma;                 // nnz_l x n_L, row-equilibrated
    DenseVector lf_op_scale;                // per-entry weights for vec(L_l)
    DenseMatrix Flow_gamma;                 // N_l x n_f
    std::vector<ParameterPoint> gamma_u, gamma_L, gamma_f;
    std::vector<std::size_t> gamma_u_idx, gamma_L_idx, gamma_f_idx;
    SparsityPattern lf_pattern;

    std::size_t hf_run_count = 0;
    StageTimings timings;

    std::size_t basis_size() const { return Q.cols(); }
    std::size_t n_L() const { return L_rb_basis.size(); }
    std::size_t n_f() const { return f_rb_basis.size(); }

    // Build/load-time consistency checks (orthonormality, Gramian factors).
    void validate() const;
};

// Per-candidate-index access to high-fidelity final-iteration systems. The
// default implementation solves on demand and counts invocations; the
// synthetic tests substitute their own.
using HfSolverFn = std::function<LinearizedSystem(std::size_t candidate_index)>;

// Side products of a build that the evaluation drivers reuse in-process
// (not persisted with the artifact).
struct OfflineBuildData {
    SnapshotSet lf;          // full LF snapshots over the candidate set
    DenseMatrix Uh_gamma;    // HF solution snapshots at gamma_u (pre Gram-Schmidt)
    DenseMatrix Ul_gamma;    // LF solution snapshots at gamma_u
};

// Algorithms "construct reduced basis" + "construct coarse and reduced
// operators/sources" end to end: LF sweep, three pivoted-Cholesky
// selections, deduplicated HF runs, Gram-Schmidt, projections, Gramians.
RomArtifact build_artifact(const OfflineConfig& config,
                           OfflineBuildData* build_data = nullptr);

// Core that works from given LF snapshots and an HF source; build_artifact
// delegates here. `hf_calls` reports the number of HF solver invocations.
RomArtifact build_artifact_from_snapshots(const OfflineConfig& config,
                                          const SnapshotSet& lf,
                                          const HfSolverFn& hf_solver,
                                          OfflineBuildData* build_data = nullptr);

struct LemmaReport {
    // Operator side
    double op_coeff_norm = 0.0;       // ||A_l||_2
    double op_coeff_bound = 0.0;      // sqrt(n_L (n_p - n_L) + 1)
    double op_residual_norm = 0.0;    // ||L_l(Gamma) - L_l(gamma) A_l||_2
    double op_residual_bound = 0.0;   // coeff bound * sigma_{n_L+1}
    double op_sigma_next = 0.0;
    bool op_coeff_violated = false;
    bool op_residual_violated = false;
    // Right-hand-side side
    double rhs_coeff_norm = 0.0;
    double rhs_coeff_bound = 0.0;
    double rhs_residual_norm = 0.0;
    double rhs_residual_bound = 0.0;
    double rhs_sigma_next = 0.0;
    bool rhs_coeff_violated = false;
    bool rhs_residual_violated = false;
};

// Empirical check of the interpolative-decomposition bounds on the LF
// snapshot matrices. Violations are flagged, never fatal: the LS-based
// coefficients are not the strong-RRQR decomposition the bound assumes.
LemmaReport lemma_diagnostics(const SnapshotSet& lf,
                              const std::vector<std::size_t>& gamma_L_idx,
                              const std::vector<std::size_t>& gamma_f_idx);

}  // namespace bifirom
