#include "bifirom/sparse.hpp"

#include <cassert>

#include "bifirom/errors.hpp"

namespace bifirom {

DenseVector spmv(const SparseMatrix& A, const DenseVector& x) {
    assert(x.size() == A.n_cols());
    DenseVector y(A.n_rows(), 0.0);
    const auto& p = A.pattern;
    for (std::size_t i = 0; i < p.n_rows; ++i) {
        double s = 0.0;
        for (std::uint64_t k = p.row_ptr[i]; k < p.row_ptr[i + 1]; ++k) {
            s += A.values[k] * x[p.col_idx[k]];
        }
        y[i] = s;
    }
    return y;
}

DenseVector vectorize_operator(const SparseMatrix& A, const SparsityPattern& pattern) {
    if (A.pattern != pattern) {
        throw ContractError("vectorize_operator: operator pattern differs from the canonical pattern");
    }
    return A.values;
}

SparseMatrix unvectorize_operator(const DenseVector& values, const SparsityPattern& pattern) {
    if (values.size() != pattern.nnz()) {
        throw ContractError("unvectorize_operator: value count does not match pattern nnz");
    }
    SparseMatrix A;
    A.pattern = pattern;
    A.values = values;
    return A;
}

DenseMatrix sparse_to_dense(const SparseMatrix& A) {
    DenseMatrix D(A.n_rows(), A.n_cols());
    const auto& p = A.pattern;
    for (std::size_t i = 0; i < p.n_rows; ++i) {
        for (std::uint64_t k = p.row_ptr[i]; k < p.row_ptr[i + 1]; ++k) {
            D(i, p.col_idx[k]) = A.values[k];
        }
    }
    return D;
}

}  // namespace bifirom
