#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bifirom/dense.hpp"

namespace bifirom {

// Canonical CSR pattern: row_ptr nondecreasing, column indices strictly
// increasing within each row. All operators assembled for one
// (problem, grid) share one pattern, so operator columns can be compared
// and vectorized deterministically.
struct SparsityPattern {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<std::uint64_t> row_ptr;
    std::vector<std::uint64_t> col_idx;

    std::size_t nnz() const { return col_idx.size(); }

    bool operator==(const SparsityPattern& other) const = default;
};

struct SparseMatrix {
    SparsityPattern pattern;
    std::vector<double> values;

    std::size_t n_rows() const { return pattern.n_rows; }
    std::size_t n_cols() const { return pattern.n_cols; }
    std::size_t nnz() const { return values.size(); }
};

// y = A x
DenseVector spmv(const SparseMatrix& A, const DenseVector& x);

// Nonzero values in canonical CSR order. Throws ContractError when the
// matrix pattern differs from the expected one.
DenseVector vectorize_operator(const SparseMatrix& A, const SparsityPattern& pattern);

// Inverse of vectorize_operator.
SparseMatrix unvectorize_operator(const DenseVector& values, const SparsityPattern& pattern);

DenseMatrix sparse_to_dense(const SparseMatrix& A);

}  // namespace bifirom
