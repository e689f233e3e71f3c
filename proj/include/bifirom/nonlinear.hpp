#pragma once

#include <string>
#include <vector>

#include "bifirom/fem.hpp"

namespace bifirom {

enum class IterationMethod { direct, picard, newton };

struct IterationConfig {
    IterationMethod method = IterationMethod::direct;
    double tol_rel = 1e-10;
    int max_iter = 50;
    // Cold zero start unless supplied.
    DenseVector initial_guess;

    void validate() const {
        if (!(tol_rel > 0.0 && tol_rel < 1.0)) throw ContractError("iteration: tol_rel must be in (0,1)");
        if (max_iter < 1) throw ContractError("iteration: max_iter must be >= 1");
    }
};

// The method a problem's registry entry calls for.
IterationMethod default_method(const ProblemSpec& problem);
IterationMethod parse_method(const std::string& name);

// Final linearized triple a fidelity solver emits for one mu: the operator
// and rhs assembled at the second-to-last iterate plus the converged
// solution, so op * solution = rhs to solver tolerance. Linear problems take
// exactly one iteration.
struct LinearizedSystem {
    SparseMatrix op;
    DenseVector rhs;
    DenseVector solution;
    int iterations = 0;
    bool converged = false;
    double residual_rel = 0.0;
    std::vector<double> step_history;
};

LinearizedSystem solve_fidelity(const ProblemSpec& problem, const StructuredGrid& grid,
                                const ParameterPoint& mu, const IterationConfig& config,
                                const SparsityPattern* pattern = nullptr);

}  // namespace bifirom
