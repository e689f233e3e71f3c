#pragma once

#include <cstddef>
#include <vector>

namespace bifirom {

using DenseVector = std::vector<double>;

// Column-major dense matrix. Columns are contiguous, which is the access
// pattern of every snapshot/basis operation in the toolkit.
class DenseMatrix {
  public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

    double* col(std::size_t j) { return data_.data() + j * rows_; }
    const double* col(std::size_t j) const { return data_.data() + j * rows_; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    std::vector<double>& storage() { return data_; }
    const std::vector<double>& storage() const { return data_; }

    void set_col(std::size_t j, const DenseVector& v);
    DenseVector get_col(std::size_t j) const;

    // Columns picked by index, in the given order.
    DenseMatrix select_cols(const std::vector<std::size_t>& idx) const;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// y = A x
DenseVector matvec(const DenseMatrix& A, const DenseVector& x);
// y = A^T x
DenseVector tmatvec(const DenseMatrix& A, const DenseVector& x);
// C = A^T B
DenseMatrix tmatmat(const DenseMatrix& A, const DenseMatrix& B);
// G = S^T S, symmetric by construction
DenseMatrix gram(const DenseMatrix& S);

double max_abs(const DenseMatrix& A);
double frobenius_norm(const DenseMatrix& A);

double vec_norm(const DenseVector& v);
// ||a - b||_2
double vec_dist(const DenseVector& a, const DenseVector& b);

}  // namespace bifirom
