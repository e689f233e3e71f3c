#include "bifirom/dense.hpp"

#include <cassert>
#include <cmath>

#include "bifirom/kernels.hpp"

namespace bifirom {

void DenseMatrix::set_col(std::size_t j, const DenseVector& v) {
    assert(v.size() == rows_);
    std::copy(v.begin(), v.end(), col(j));
}

DenseVector DenseMatrix::get_col(std::size_t j) const {
    return DenseVector(col(j), col(j) + rows_);
}

DenseMatrix DenseMatrix::select_cols(const std::vector<std::size_t>& idx) const {
    DenseMatrix out(rows_, idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) {
        assert(idx[j] < cols_);
        std::copy(col(idx[j]), col(idx[j]) + rows_, out.col(j));
    }
    return out;
}

DenseVector matvec(const DenseMatrix& A, const DenseVector& x) {
    assert(x.size() == A.cols());
    DenseVector y(A.rows(), 0.0);
    for (std::size_t j = 0; j < A.cols(); ++j) {
        kernels::axpy(x[j], A.col(j), y.data(), A.rows());
    }
    return y;
}

DenseVector tmatvec(const DenseMatrix& A, const DenseVector& x) {
    assert(x.size() == A.rows());
    DenseVector y(A.cols());
    for (std::size_t j = 0; j < A.cols(); ++j) {
        y[j] = kernels::dot(A.col(j), x.data(), A.rows());
    }
    return y;
}

DenseMatrix tmatmat(const DenseMatrix& A, const DenseMatrix& B) {
    assert(A.rows() == B.rows());
    DenseMatrix C(A.cols(), B.cols());
    for (std::size_t j = 0; j < B.cols(); ++j) {
        for (std::size_t i = 0; i < A.cols(); ++i) {
            C(i, j) = kernels::dot(A.col(i), B.col(j), A.rows());
        }
    }
    return C;
}

DenseMatrix gram(const DenseMatrix& S) {
    DenseMatrix G(S.cols(), S.cols());
    for (std::size_t j = 0; j < S.cols(); ++j) {
        for (std::size_t i = 0; i <= j; ++i) {
            const double g = kernels::dot(S.col(i), S.col(j), S.rows());
            G(i, j) = g;
            G(j, i) = g;
        }
    }
    return G;
}

double max_abs(const DenseMatrix& A) {
    double m = 0.0;
    for (double v : A.storage()) m = std::max(m, std::abs(v));
    return m;
}

double frobenius_norm(const DenseMatrix& A) {
    return kernels::nrm2(A.data(), A.storage().size());
}

double vec_norm(const DenseVector& v) { return kernels::nrm2(v.data(), v.size()); }

double vec_dist(const DenseVector& a, const DenseVector& b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace bifirom
