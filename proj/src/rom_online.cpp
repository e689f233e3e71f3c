#include "bifirom/rom_online.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "bifirom/kernels.hpp"

namespace bifirom {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel_ls_residual(const DenseMatrix& basis, const DenseVector& coeffs,
                       const DenseVector& target) {
    DenseVector r = target;
    for (std::size_t j = 0; j < basis.cols(); ++j) {
        kernels::axpy(-coeffs[j], basis.col(j), r.data(), r.size());
    }
    const double tn = vec_norm(target);
    return tn > 0.0 ? vec_norm(r) / tn : vec_norm(r);
}

}  // namespace

OnlineReport online_solve_from_lf(const RomArtifact& artifact, const ParameterPoint& mu,
                                  const DenseVector& lf_operator_vec,
                                  const DenseVector& lf_rhs) {
    const std::size_t n_L = artifact.n_L();
    const std::size_t n_f = artifact.n_f();
    const std::size_t k = artifact.basis_size();

    OnlineReport rep;
    rep.mu = mu;

    // Apply the offline row equilibration so the fit happens in the same
    // weighted norm the stored basis and Gramian were built in.
    DenseVector op_vec = lf_operator_vec;
    if (artifact.lf_op_scale.size() == op_vec.size()) {
        for (std::size_t i = 0; i < op_vec.size(); ++i) op_vec[i] *= artifact.lf_op_scale[i];
    }

    // Expansion-coefficient fits. Both touch only LF-sized data (nnz_l and
    // N_l rows), nothing of dimension N_h. The tall QR solve is used instead
    // of the precomputed Gramian: the Gramian normal equations square the
    // condition number, and for high-contrast operators that erases the
    // background rows the reduced solve depends on.
    const auto t_ls = Clock::now();
    rep.a_l = least_squares_tall(artifact.Llow_gamma, op_vec);
    rep.b_l = least_squares_tall(artifact.Flow_gamma, lf_rhs);
    rep.timings.ls_s = since(t_ls);
    // Householder QR plus one triangular solve per system.
    rep.flops.ls = 2 * artifact.Llow_gamma.rows() * n_L * n_L + n_L * n_L +
                   2 * artifact.Flow_gamma.rows() * n_f * n_f + n_f * n_f;

    const auto t_asm = Clock::now();
    DenseMatrix L_rb(k, k);
    for (std::size_t j = 0; j < n_L; ++j) {
        kernels::axpy(rep.a_l[j], artifact.L_rb_basis[j].data(), L_rb.data(), k * k);
    }
    DenseVector f_rb(k, 0.0);
    for (std::size_t j = 0; j < n_f; ++j) {
        kernels::axpy(rep.b_l[j], artifact.f_rb_basis[j].data(), f_rb.data(), k);
    }
    rep.timings.assembly_s = since(t_asm);
    rep.flops.assembly = 2 * n_L * k * k + 2 * n_f * k;

    const auto t_red = Clock::now();
    rep.u_rb = lu_solve(L_rb, f_rb);
    rep.timings.reduced_solve_s = since(t_red);
    rep.flops.reduced_solve = (2 * k * k * k) / 3 + 2 * k * k;

    {
        const DenseVector resid = matvec(L_rb, rep.u_rb);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double d = resid[i] - f_rb[i];
            num += d * d;
            den += f_rb[i] * f_rb[i];
        }
        rep.reduced_residual = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    }

    const auto t_rec = Clock::now();
    rep.u_r = matvec(artifact.Q, rep.u_rb);
    rep.timings.reconstruction_s = since(t_rec);

    rep.ls_residual_op = rel_ls_residual(artifact.Llow_gamma, rep.a_l, op_vec);
    rep.ls_residual_rhs = rel_ls_residual(artifact.Flow_gamma, rep.b_l, lf_rhs);
    return rep;
}

OnlineReport online_solve(const RomArtifact& artifact, const ParameterPoint& mu) {
    const ProblemSpec& problem = get_problem(artifact.problem_id);
    problem.check_mu(mu);

    // The LF operator is defined at the converged LF state, so the full
    // nonlinear LF solve runs here, not just one assembly.
    const auto t_lf = Clock::now();
    const LinearizedSystem lf =
        solve_fidelity(problem, artifact.lf_grid, mu, artifact.it_lf, &artifact.lf_pattern);
    const double lf_time = since(t_lf);

    OnlineReport rep = online_solve_from_lf(
        artifact, mu, vectorize_operator(lf.op, artifact.lf_pattern), lf.rhs);
    rep.timings.lf_solve_s = lf_time;
    rep.u_lf = lf.solution;
    rep.lf_iterations = lf.iterations;
    return rep;
}

DenseVector reference_bifidelity_solve(const DenseMatrix& Ul_gamma,
                                       const DenseMatrix& Uh_gamma,
                                       const DenseVector& u_l_at_mu) {
    const DenseMatrix G = gram(Ul_gamma);
    const DenseVector g = tmatvec(Ul_gamma, u_l_at_mu);
    const DenseVector c = least_squares_gram(G, g).coeffs;
    return matvec(Uh_gamma, c);
}

void ErrorTable::finalize() {
    mean_e_u = mean_e_u_ref = mean_e_u_lf = 0.0;
    mean_t_lf = mean_t_online = mean_t_hf = 0.0;
    if (rows.empty()) return;
    std::vector<double> t_on, t_hf;
    for (const auto& r : rows) {
        mean_e_u += r.e_u;
        mean_e_u_ref += r.e_u_ref;
        mean_e_u_lf += r.e_u_lf;
        mean_t_lf += r.t_lf;
        mean_t_online += r.t_online;
        mean_t_hf += r.t_hf;
        t_on.push_back(r.t_online);
        t_hf.push_back(r.t_hf);
    }
    const double n = static_cast<double>(rows.size());
    mean_e_u /= n;
    mean_e_u_ref /= n;
    mean_e_u_lf /= n;
    mean_t_lf /= n;
    mean_t_online /= n;
    mean_t_hf /= n;
    auto median = [](std::vector<double>& v) {
        std::sort(v.begin(), v.end());
        const std::size_t m = v.size() / 2;
        return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
    };
    median_t_online = median(t_on);
    median_t_hf = median(t_hf);
}

ErrorTable evaluate(const RomArtifact& artifact, const OfflineBuildData& build,
                    const ParameterSet& test_set) {
    const ProblemSpec& problem = get_problem(artifact.problem_id);
    const SparsityPattern hf_pattern = build_pattern(problem, artifact.hf_grid);

    ErrorTable table;
    for (const auto& mu : test_set.points) {
        try {
            const auto t_hf0 = Clock::now();
            const LinearizedSystem hf =
                solve_fidelity(problem, artifact.hf_grid, mu, artifact.it_hf, &hf_pattern);
            const double t_hf = since(t_hf0);

            const OnlineReport rep = online_solve(artifact, mu);

            const DenseVector u_ref = reference_bifidelity_solve(
                build.Ul_gamma, build.Uh_gamma, rep.u_lf);
            const DenseVector u_lf_fine =
                prolongate(artifact.lf_grid, artifact.hf_grid, rep.u_lf, problem.n_fields);

            const double hn = vec_norm(hf.solution);
            ErrorRow row;
            row.mu = mu;
            row.e_u = vec_dist(rep.u_r, hf.solution) / hn;
            row.e_u_ref = vec_dist(u_ref, hf.solution) / hn;
            row.e_u_lf = vec_dist(u_lf_fine, hf.solution) / hn;
            row.t_lf = rep.timings.lf_solve_s;
            row.t_online = rep.timings.total_s();
            row.t_hf = t_hf;
            table.rows.push_back(std::move(row));
        } catch (const SolverError&) {
            ++table.excluded;
        }
    }
    table.finalize();
    return table;
}

}  // namespace bifirom
