#include <doctest.h>

#include <cmath>

#include "bifirom/nonlinear.hpp"

using namespace bifirom;

TEST_CASE("linear problem solves in one iteration, bit-identical to assembly") {
    const ProblemSpec& problem = get_problem("wavespeed");
    const StructuredGrid grid = grid_for_problem(problem, 8, 8);
    const ParameterPoint mu{0.9, 1.4};

    IterationConfig cfg;
    const LinearizedSystem sys = solve_fidelity(problem, grid, mu, cfg);
    CHECK(sys.iterations == 1);
    CHECK(sys.converged);

    const AssemblyResult direct = assemble(problem, grid, mu);
    CHECK(sys.op.values == direct.op.values);
    CHECK(sys.rhs == direct.rhs);
}

TEST_CASE("Newton contracts quadratically on the pure-cubic case") {
    // mu1 = 0 turns the reaction into u^3; widen the registered box so the
    // driver accepts it.
    ProblemSpec problem = get_problem("cubic");
    problem.param_domain[0][0] = 0.0;
    const StructuredGrid grid = grid_for_problem(problem, 8, 8);

    IterationConfig cfg;
    cfg.method = IterationMethod::newton;
    const LinearizedSystem sys = solve_fidelity(problem, grid, {0.0, 1.0}, cfg);
    REQUIRE(sys.converged);
    REQUIRE(sys.step_history.size() >= 3);

    // Once inside the basin the step norms square per iteration; check the
    // log-step at least 1.8x the previous for every step below 1e-3.
    bool saw_contraction = false;
    for (std::size_t k = 0; k + 1 < sys.step_history.size(); ++k) {
        const double s0 = sys.step_history[k], s1 = sys.step_history[k + 1];
        if (s0 < 1e-3 && s0 > 0.0 && s1 > 0.0 && s1 < s0) {
            CHECK(std::log(s1) <= 1.8 * std::log(s0));
            saw_contraction = true;
        }
    }
    CHECK(saw_contraction);
}

TEST_CASE("Picard and Newton agree on the cubic problem") {
    const ProblemSpec& problem = get_problem("cubic");
    const StructuredGrid grid = grid_for_problem(problem, 8, 8);
    const ParameterPoint mu{1.0, 1.0};

    IterationConfig newton;
    newton.method = IterationMethod::newton;
    IterationConfig picard;
    picard.method = IterationMethod::picard;

    const LinearizedSystem a = solve_fidelity(problem, grid, mu, newton);
    const LinearizedSystem b = solve_fidelity(problem, grid, mu, picard);
    CHECK(vec_dist(a.solution, b.solution) <=
          10.0 * newton.tol_rel * vec_norm(a.solution));
}

TEST_CASE("fixed-point consistency of the emitted system") {
    const ProblemSpec& problem = get_problem("nl-elliptic");
    const StructuredGrid grid = grid_for_problem(problem, 8, 8);
    const ParameterPoint mu{0.3, 0.8, 0.5};

    IterationConfig cfg;
    const LinearizedSystem sys = solve_fidelity(problem, grid, mu, cfg);
    REQUIRE(sys.converged);

    // Re-assemble at the converged state and solve once.
    const AssemblyResult re = assemble(problem, grid, mu, &sys.solution);
    const DenseVector u = solve_sparse(re.op, re.rhs);
    CHECK(vec_dist(u, sys.solution) <= 10.0 * cfg.tol_rel * vec_norm(sys.solution));
}

TEST_CASE("non-convergence carries the step history") {
    const ProblemSpec& problem = get_problem("cubic");
    const StructuredGrid grid = grid_for_problem(problem, 8, 8);
    IterationConfig cfg;
    cfg.method = IterationMethod::newton;
    cfg.max_iter = 1;
    try {
        solve_fidelity(problem, grid, {2.0, 1.0}, cfg);
        FAIL("expected NonConvergenceError");
    } catch (const NonConvergenceError& e) {
        CHECK(e.step_history.size() == 1);
    }
}

TEST_CASE("mu outside the parameter box is rejected") {
    const ProblemSpec& problem = get_problem("wavespeed");
    const StructuredGrid grid = grid_for_problem(problem, 4, 4);
    IterationConfig cfg;
    CHECK_THROWS_AS(solve_fidelity(problem, grid, {9.0, 0.5}, cfg), DomainError);
}
