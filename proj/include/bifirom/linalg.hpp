#pragma once

#include <cstddef>
#include <vector>

#include "bifirom/dense.hpp"

namespace bifirom {

struct SelectionResult {
    std::vector<std::size_t> pivot_indices;
    std::vector<double> pivot_values;  // residual diagonal at selection time
    std::size_t k = 0;
    bool rank_deficient = false;
};

// Greedy pivoted Cholesky on the Gramian G = S^T S (formed once, n x n).
// Ranks columns by residual energy; ties break to the lowest index. Never
// touches the tall matrix after the Gramian is formed.
SelectionResult pivoted_cholesky_select(const DenseMatrix& S, std::size_t k);
// Same selection driven by a precomputed Gramian.
SelectionResult pivoted_cholesky_select_gram(const DenseMatrix& G, std::size_t k);

// Modified Gram-Schmidt with one reorthogonalization pass. Columns whose
// post-projection norm falls below 1e-12 of their original norm are dropped.
DenseMatrix gram_schmidt(const DenseMatrix& S);

struct GramLsResult {
    DenseVector coeffs;
    double jitter = 0.0;  // 0 when the plain Cholesky succeeded
    int attempts = 1;
};

// Solve G a = g with G a symmetric PSD Gramian, via Cholesky with escalating
// diagonal jitter (1e-12 .. 1e-6 of trace(G)/k) on factorization failure.
GramLsResult least_squares_gram(const DenseMatrix& G, const DenseVector& g);

// Conditioning escape hatch: LS on the tall matrix itself via MGS QR,
// min ||S x - b||_2. Kept alongside the Gramian path for comparisons.
DenseVector least_squares_tall(const DenseMatrix& S, const DenseVector& b);

// Largest singular value by power iteration on S^T S, 1e-8 relative.
double spectral_norm(const DenseMatrix& S);

// Eigenvalues of a symmetric matrix (cyclic Jacobi), descending order.
std::vector<double> sym_eigenvalues(DenseMatrix G);

// Singular values of S from the Gramian spectrum, descending.
std::vector<double> singular_values_via_gram(const DenseMatrix& S);

// Dense LU with partial pivoting; throws SolverError on singularity and
// reports a crude condition estimate via the pivot ratio.
DenseVector lu_solve(DenseMatrix A, DenseVector b);

}  // namespace bifirom
