#pragma once

#include <utility>

#include "bifirom/dense.hpp"
#include "bifirom/grid.hpp"
#include "bifirom/problem.hpp"
#include "bifirom/sparse.hpp"

namespace bifirom {

// Union sparsity pattern over every term of the PDE for a (problem, grid)
// pair. The pattern never depends on mu or on a nonlinear iterate; vanishing
// terms keep explicit zero slots.
SparsityPattern build_pattern(const ProblemSpec& problem, const StructuredGrid& grid);

struct AssemblyResult {
    SparseMatrix op;
    DenseVector rhs;
};

// Q1 assembly with 2x2 Gauss quadrature over interior (free) DOFs,
// homogeneous Dirichlet rows/columns eliminated. `state` is the previous
// iterate (stacked fields, interior DOFs) and must be supplied exactly when
// the problem is nonlinear. `picard_alt` selects the alternate Picard
// freezing of a Newton-default problem.
AssemblyResult assemble(const ProblemSpec& problem, const StructuredGrid& grid,
                        const ParameterPoint& mu, const DenseVector* state = nullptr,
                        const SparsityPattern* pattern = nullptr,
                        bool picard_alt = false);

// Direct sparse solve with relative residual <= 1e-12 on valid assemblies.
DenseVector solve_sparse(const SparseMatrix& L, const DenseVector& f);

struct ErrorNorms {
    double l2_rel;
    double h1_rel;
};

// Discrete relative l2 error over interior nodes plus H1-seminorm error via
// element quadrature. Uses the problem's analytic gradient when available,
// otherwise the gradient of the nodal interpolant of `exact`.
ErrorNorms fem_error_norms(const DenseVector& u_num, const ProblemSpec& problem,
                           const StructuredGrid& grid);

// Full nodal field (per stacked field) with exact zeros on boundary nodes.
DenseVector expand_interior(const StructuredGrid& grid, const DenseVector& u_interior,
                            int n_fields);

// Q1 interpolation of a coarse interior field onto the fine grid's interior
// nodes (same physical domain, stacked fields).
DenseVector prolongate(const StructuredGrid& coarse, const StructuredGrid& fine,
                       const DenseVector& u_coarse, int n_fields);

// Grid of the given "NXxNY" size over the problem's physical domain.
StructuredGrid grid_for_problem(const ProblemSpec& problem, int nx, int ny);

}  // namespace bifirom
