#include "bifirom/nonlinear.hpp"

#include <cmath>
#include <sstream>

namespace bifirom {

IterationMethod default_method(const ProblemSpec& problem) {
    switch (problem.nonlinearity) {
        case Nonlinearity::linear: return IterationMethod::direct;
        case Nonlinearity::picard: return IterationMethod::picard;
        case Nonlinearity::newton: return IterationMethod::newton;
    }
    return IterationMethod::direct;
}

IterationMethod parse_method(const std::string& name) {
    if (name == "direct" || name == "auto") return IterationMethod::direct;
    if (name == "picard") return IterationMethod::picard;
    if (name == "newton") return IterationMethod::newton;
    throw ContractError("unknown iteration method '" + name + "'");
}

LinearizedSystem solve_fidelity(const ProblemSpec& problem, const StructuredGrid& grid,
                                const ParameterPoint& mu, const IterationConfig& config,
                                const SparsityPattern* pattern) {
    config.validate();
    problem.check_mu(mu);

    SparsityPattern local;
    if (pattern == nullptr) {
        local = build_pattern(problem, grid);
        pattern = &local;
    }

    LinearizedSystem out;

    if (problem.nonlinearity == Nonlinearity::linear) {
        auto [op, rhs] = assemble(problem, grid, mu, nullptr, pattern);
        out.solution = solve_sparse(op, rhs);
        out.op = std::move(op);
        out.rhs = std::move(rhs);
        out.iterations = 1;
        out.converged = true;
        out.residual_rel = 0.0;
        return out;
    }

    IterationMethod method = config.method;
    if (method == IterationMethod::direct) method = default_method(problem);
    if (method == IterationMethod::newton && problem.nonlinearity != Nonlinearity::newton) {
        throw ContractError("problem '" + problem.id +
                            "' has no Newton linearization in the registry");
    }
    // A Newton-default problem iterated with Picard uses its alternate
    // freezing; everything else uses the registry's primary linearization.
    const bool picard_alt =
        method == IterationMethod::picard && problem.nonlinearity == Nonlinearity::newton;

    const std::size_t n =
        static_cast<std::size_t>(problem.n_fields) * grid.interior_nodes();
    DenseVector u_prev = config.initial_guess.empty() ? DenseVector(n, 0.0)
                                                      : config.initial_guess;
    if (u_prev.size() != n) throw ContractError("initial guess size mismatch");

    for (int k = 1; k <= config.max_iter; ++k) {
        auto [op, rhs] = assemble(problem, grid, mu, &u_prev, pattern, picard_alt);
        DenseVector u = solve_sparse(op, rhs);
        const double un = vec_norm(u);
        const double step = (un > 0.0) ? vec_dist(u, u_prev) / un : vec_dist(u, u_prev);
        out.step_history.push_back(step);
        if (step <= config.tol_rel) {
            out.op = std::move(op);
            out.rhs = std::move(rhs);
            out.solution = std::move(u);
            out.iterations = k;
            out.converged = true;
            out.residual_rel = step;
            return out;
        }
        u_prev = std::move(u);
    }

    std::ostringstream os;
    os << "solve_fidelity: no convergence for problem '" << problem.id << "' after "
       << config.max_iter << " iterations (last step " << out.step_history.back() << ")";
    throw NonConvergenceError(os.str(), out.step_history);
}

}  // namespace bifirom
