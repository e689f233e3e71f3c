#include "bifirom/rom_offline.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "bifirom/kernels.hpp"

namespace bifirom {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Q^T L Q via one spmv per basis column followed by dense dots.
DenseMatrix project_operator(const SparseMatrix& L, const DenseMatrix& Q) {
    const std::size_t k = Q.cols();
    DenseMatrix LQ(Q.rows(), k);
    for (std::size_t j = 0; j < k; ++j) {
        LQ.set_col(j, spmv(L, Q.get_col(j)));
    }
    return tmatmat(Q, LQ);
}

}  // namespace

void OfflineConfig::validate() const {
    hf_grid.validate();
    lf_grid.validate();
    it_hf.validate();
    it_lf.validate();
    if (n_p < 1) throw ContractError("offline config: n_p must be >= 1");
    if (N_rb < 1 || N_rb > n_p) throw ContractError("offline config: need 1 <= N_rb <= n_p");
    if (n_L < 1 || n_L > n_p) throw ContractError("offline config: need 1 <= n_L <= n_p");
    if (n_f < 1 || n_f > n_p) throw ContractError("offline config: need 1 <= n_f <= n_p");
    if (lf_grid.interior_nodes() >= hf_grid.interior_nodes()) {
        throw ContractError("offline config: LF grid must be strictly coarser than HF grid");
    }
}

void RomArtifact::validate() const {
    const std::size_t k = Q.cols();
    if (k == 0) throw ContractError("artifact: empty basis");

    // Orthonormality of Q.
    DenseMatrix QtQ = gram(Q);
    double err = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < k; ++i) {
            err = std::max(err, std::abs(QtQ(i, j) - (i == j ? 1.0 : 0.0)));
        }
    }
    if (err > 1e-10) {
        std::ostringstream os;
        os << "artifact: basis not orthonormal (max deviation " << err << ")";
        throw ContractError(os.str());
    }

    // Gramians must match their stored factors.
    auto check_gram = [](const DenseMatrix& G, const DenseMatrix& S, const char* name) {
        DenseMatrix ref = gram(S);
        const double scale = std::max(max_abs(ref), 1e-300);
        for (std::size_t j = 0; j < G.cols(); ++j) {
            for (std::size_t i = 0; i < G.rows(); ++i) {
                if (std::abs(G(i, j) - ref(i, j)) > 1e-12 * scale) {
                    throw ContractError(std::string("artifact: Gramian ") + name +
                                        " inconsistent with stored factor");
                }
            }
        }
    };
    check_gram(G_L, Llow_gamma, "G_L");
    check_gram(G_F, Flow_gamma, "G_F");

    for (const auto& M : L_rb_basis) {
        if (M.rows() != k || M.cols() != k) {
            throw ContractError("artifact: reduced operator basis dimension mismatch");
        }
    }
    for (const auto& v : f_rb_basis) {
        if (v.size() != k) throw ContractError("artifact: reduced rhs basis dimension mismatch");
    }
}

RomArtifact build_artifact(const OfflineConfig& config, OfflineBuildData* build_data) {
    config.validate();
    const ProblemSpec& problem = get_problem(config.problem_id);

    const auto t0 = std::chrono::steady_clock::now();
    const ParameterSet gamma =
        sample_parameters(problem, config.n_p, config.seed, "candidate");
    SnapshotSet lf = sweep(problem, config.lf_grid, gamma, config.it_lf, "low");
    const double lf_time = seconds_since(t0);

    const SparsityPattern hf_pattern = build_pattern(problem, config.hf_grid);
    std::size_t hf_calls = 0;
    HfSolverFn hf_solver = [&](std::size_t idx) {
        ++hf_calls;
        return solve_fidelity(problem, config.hf_grid, gamma.points[idx], config.it_hf,
                              &hf_pattern);
    };

    RomArtifact art = build_artifact_from_snapshots(config, lf, hf_solver, build_data);
    art.timings.lf_sweep_s = lf_time;
    art.hf_run_count = hf_calls;
    return art;
}

RomArtifact build_artifact_from_snapshots(const OfflineConfig& config,
                                          const SnapshotSet& lf,
                                          const HfSolverFn& hf_solver,
                                          OfflineBuildData* build_data) {
    const auto t_sel = std::chrono::steady_clock::now();

    // Row equilibration of the vectorized operators. High-contrast media put
    // entries of wildly different magnitude into vec(L_l); an unweighted fit
    // is dominated by the large rows and resolves the small (background) rows
    // only to cancellation level, which the reduced solve then amplifies.
    // Weighting each row by its largest candidate magnitude keeps the fit
    // Gramian conditioned at the coefficient-geometry scale instead of the
    // squared contrast.
    DenseVector op_scale(lf.Lvec.rows(), 1.0);
    for (std::size_t i = 0; i < lf.Lvec.rows(); ++i) {
        double m = 0.0;
        for (std::size_t j = 0; j < lf.Lvec.cols(); ++j) {
            m = std::max(m, std::abs(lf.Lvec(i, j)));
        }
        if (m > 0.0) op_scale[i] = 1.0 / m;
    }
    DenseMatrix Lvec_w = lf.Lvec;
    for (std::size_t j = 0; j < Lvec_w.cols(); ++j) {
        for (std::size_t i = 0; i < Lvec_w.rows(); ++i) Lvec_w(i, j) *= op_scale[i];
    }

    // Three independent pivoted-Cholesky selections on the LF snapshots.
    const SelectionResult sel_u = pivoted_cholesky_select(lf.U, config.N_rb);
    const SelectionResult sel_L = pivoted_cholesky_select(Lvec_w, config.n_L);
    const SelectionResult sel_f = pivoted_cholesky_select(lf.F, config.n_f);
    const double sel_time = seconds_since(t_sel);

    // One HF run per distinct selected parameter; a parameter appearing in
    // several selections yields its solution, operator and rhs from a single
    // LinearizedSystem.
    const auto t_hf = std::chrono::steady_clock::now();
    const DedupUnion uni =
        dedup_union(sel_u.pivot_indices, sel_L.pivot_indices, sel_f.pivot_indices);
    std::vector<LinearizedSystem> hf_systems;
    hf_systems.reserve(uni.union_indices.size());
    for (std::size_t idx : uni.union_indices) hf_systems.push_back(hf_solver(idx));
    const double hf_time = seconds_since(t_hf);

    const auto t_proj = std::chrono::steady_clock::now();
    const std::size_t n_h = hf_systems.front().solution.size();

    DenseMatrix Uh_gamma(n_h, config.N_rb);
    for (std::size_t j = 0; j < config.N_rb; ++j) {
        Uh_gamma.set_col(j, hf_systems[uni.u_map[j]].solution);
    }

    RomArtifact art;
    art.problem_id = config.problem_id;
    art.hf_grid = config.hf_grid;
    art.lf_grid = config.lf_grid;
    art.n_p = config.n_p;
    art.N_rb_requested = config.N_rb;
    art.seed = config.seed;
    art.it_hf = config.it_hf;
    art.it_lf = config.it_lf;
    art.lf_pattern = lf.pattern;
    art.hf_run_count = uni.union_indices.size();

    art.Q = gram_schmidt(Uh_gamma);

    for (std::size_t j = 0; j < config.n_L; ++j) {
        art.L_rb_basis.push_back(project_operator(hf_systems[uni.L_map[j]].op, art.Q));
    }
    for (std::size_t j = 0; j < config.n_f; ++j) {
        art.f_rb_basis.push_back(tmatvec(art.Q, hf_systems[uni.f_map[j]].rhs));
    }

    art.Llow_gamma = Lvec_w.select_cols(sel_L.pivot_indices);
    art.lf_op_scale = op_scale;
    art.Flow_gamma = lf.F.select_cols(sel_f.pivot_indices);
    art.G_L = gram(art.Llow_gamma);
    art.G_F = gram(art.Flow_gamma);

    auto points_at = [&](const std::vector<std::size_t>& idx) {
        std::vector<ParameterPoint> pts;
        for (std::size_t i : idx) pts.push_back(lf.params.points[i]);
        return pts;
    };
    art.gamma_u_idx = sel_u.pivot_indices;
    art.gamma_L_idx = sel_L.pivot_indices;
    art.gamma_f_idx = sel_f.pivot_indices;
    art.gamma_u = points_at(sel_u.pivot_indices);
    art.gamma_L = points_at(sel_L.pivot_indices);
    art.gamma_f = points_at(sel_f.pivot_indices);

    art.timings.selection_s = sel_time;
    art.timings.hf_runs_s = hf_time;
    art.timings.projection_s = seconds_since(t_proj);

    art.validate();

    if (build_data != nullptr) {
        build_data->lf = lf;
        build_data->Uh_gamma = std::move(Uh_gamma);
        build_data->Ul_gamma = lf.U.select_cols(sel_u.pivot_indices);
    }
    return art;
}

namespace {

struct SideDiag {
    double coeff_norm, coeff_bound, residual_norm, residual_bound, sigma_next, scale;
};

SideDiag diagnose_side(const DenseMatrix& full, const std::vector<std::size_t>& idx) {
    const std::size_t n_p = full.cols();
    const std::size_t k = idx.size();
    const DenseMatrix basis = full.select_cols(idx);
    const DenseMatrix G = gram(basis);

    // LS coefficients of every candidate column in the selected basis.
    DenseMatrix A(k, n_p);
    for (std::size_t j = 0; j < n_p; ++j) {
        const DenseVector g = tmatvec(basis, full.get_col(j));
        A.set_col(j, least_squares_gram(G, g).coeffs);
    }

    DenseMatrix residual = full;
    for (std::size_t j = 0; j < n_p; ++j) {
        for (std::size_t t = 0; t < k; ++t) {
            kernels::axpy(-A(t, j), basis.col(t), residual.col(j), full.rows());
        }
    }

    SideDiag d;
    d.coeff_norm = spectral_norm(A);
    d.coeff_bound = std::sqrt(static_cast<double>(k * (n_p - k) + 1));
    d.residual_norm = spectral_norm(residual);
    const auto sv = singular_values_via_gram(full);
    d.sigma_next = (k < sv.size()) ? sv[k] : 0.0;
    d.residual_bound = d.coeff_bound * d.sigma_next;
    d.scale = sv.empty() ? 0.0 : sv.front();
    return d;
}

}  // namespace

LemmaReport lemma_diagnostics(const SnapshotSet& lf,
                              const std::vector<std::size_t>& gamma_L_idx,
                              const std::vector<std::size_t>& gamma_f_idx) {
    LemmaReport r;
    const SideDiag op = diagnose_side(lf.Lvec, gamma_L_idx);
    r.op_coeff_norm = op.coeff_norm;
    r.op_coeff_bound = op.coeff_bound;
    r.op_residual_norm = op.residual_norm;
    r.op_residual_bound = op.residual_bound;
    r.op_sigma_next = op.sigma_next;
    r.op_coeff_violated = op.coeff_norm > op.coeff_bound * (1.0 + 1e-10);
    r.op_residual_violated = op.residual_norm > op.residual_bound + 1e-9 * op.scale;

    const SideDiag rhs = diagnose_side(lf.F, gamma_f_idx);
    r.rhs_coeff_norm = rhs.coeff_norm;
    r.rhs_coeff_bound = rhs.coeff_bound;
    r.rhs_residual_norm = rhs.residual_norm;
    r.rhs_residual_bound = rhs.residual_bound;
    r.rhs_sigma_next = rhs.sigma_next;
    r.rhs_coeff_violated = rhs.coeff_norm > rhs.coeff_bound * (1.0 + 1e-10);
    r.rhs_residual_violated = rhs.residual_norm > rhs.residual_bound + 1e-9 * rhs.scale;
    return r;
}

}  // namespace bifirom
