#pragma once

#include "bifirom/rom_offline.hpp"

namespace bifirom {

struct OnlineTimings {
    double lf_solve_s = 0.0;
    double ls_s = 0.0;
    double assembly_s = 0.0;
    double reduced_solve_s = 0.0;
    double reconstruction_s = 0.0;

    double total_s() const {
        return lf_solve_s + ls_s + assembly_s + reduced_solve_s + reconstruction_s;
    }
};

// Arithmetic-operation counters of the N_h-independent online core (LS
// solves, reduced assembly, reduced solve). Depends only on the reduced
// dimensions, which the tests assert across HF grid sizes.
struct OnlineFlops {
    std::uint64_t ls = 0;
    std::uint64_t assembly = 0;
    std::uint64_t reduced_solve = 0;

    std::uint64_t core_total() const { return ls + assembly + reduced_solve; }
};

struct OnlineReport {
    ParameterPoint mu;
    DenseVector a_l;           // operator expansion coefficients
    DenseVector b_l;           // rhs expansion coefficients
    DenseVector u_rb;          // reduced solution
    DenseVector u_r;           // reconstruction Q u_rb
    DenseVector u_lf;          // the LF solution computed on the way
    int lf_iterations = 0;
    double ls_residual_op = 0.0;   // relative LS fit residual for vec(L_l(mu))
    double ls_residual_rhs = 0.0;  // and for f_l(mu)
    double reduced_residual = 0.0;
    OnlineTimings timings;
    OnlineFlops flops;
};

// Full online stage for a new parameter: one LF solve, the two Gramian
// least-squares fits, reduced assembly, reduced dense solve, reconstruction.
OnlineReport online_solve(const RomArtifact& artifact, const ParameterPoint& mu);

// Steps after the LF solve, driven by a given LF final-iteration system;
// used directly by the synthetic exact-recovery tests.
OnlineReport online_solve_from_lf(const RomArtifact& artifact, const ParameterPoint& mu,
                                  const DenseVector& lf_operator_vec,
                                  const DenseVector& lf_rhs);

// The reference bi-fidelity baseline: LS coefficients of the LF solution at
// mu against the LF solutions at gamma_u, applied to the HF snapshots. No
// reduced equation is solved.
DenseVector reference_bifidelity_solve(const DenseMatrix& Ul_gamma,
                                       const DenseMatrix& Uh_gamma,
                                       const DenseVector& u_l_at_mu);

struct ErrorRow {
    ParameterPoint mu;
    double e_u = 0.0;      // proposed method vs HF
    double e_u_ref = 0.0;  // reference bi-fidelity vs HF
    double e_u_lf = 0.0;   // prolongated LF vs HF
    double t_lf = 0.0;
    double t_online = 0.0;  // full online stage including the LF solve
    double t_hf = 0.0;
};

struct ErrorTable {
    std::vector<ErrorRow> rows;
    std::size_t excluded = 0;
    double mean_e_u = 0.0, mean_e_u_ref = 0.0, mean_e_u_lf = 0.0;
    double mean_t_lf = 0.0, mean_t_online = 0.0, mean_t_hf = 0.0;
    double median_t_online = 0.0, median_t_hf = 0.0;

    double speedup_median() const {
        return median_t_online > 0.0 ? median_t_hf / median_t_online : 0.0;
    }
    void finalize();  // recompute aggregates from rows
};

// Per test point: HF reference solve, proposed online solve, reference
// bi-fidelity solve, relative l2 errors and timings. Failing points are
// excluded and counted.
ErrorTable evaluate(const RomArtifact& artifact, const OfflineBuildData& build,
                    const ParameterSet& test_set);

}  // namespace bifirom
