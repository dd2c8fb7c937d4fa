#pragma once

#include <initializer_list>
#include <vector>

#include "lqriter/errors.hpp"

namespace lqriter {

/// Dense real matrix, 64-bit entries, column-major storage. Column-major is
/// fixed so that vec() is exactly the storage order; nothing in the library
/// may assume otherwise.
class Mat {
public:
    Mat() : rows_(0), cols_(0) {}

    /// Zero matrix.
    Mat(int rows, int cols);

    /// From column-major data; length must equal rows·cols.
    Mat(int rows, int cols, std::vector<double> column_major);

    /// From rows written out literally: Mat::from_rows({{1,2},{3,4}}).
    static Mat from_rows(std::initializer_list<std::initializer_list<double>> rows);

    static Mat identity(int n);
    /// Rectangular "identity": ones where row == col.
    static Mat eye(int rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(int i, int j) { return data_[static_cast<std::size_t>(j) * rows_ + i]; }
    double operator()(int i, int j) const { return data_[static_cast<std::size_t>(j) * rows_ + i]; }

    double* col(int j) { return data_.data() + static_cast<std::size_t>(j) * rows_; }
    const double* col(int j) const { return data_.data() + static_cast<std::size_t>(j) * rows_; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    bool same_shape(const Mat& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

private:
    int rows_, cols_;
    std::vector<double> data_;
};

// value-semantic arithmetic -------------------------------------------------

Mat operator+(const Mat& a, const Mat& b);
Mat operator-(const Mat& a, const Mat& b);
Mat operator*(const Mat& a, const Mat& b); // matrix product
Mat operator*(double s, const Mat& a);
Mat operator-(const Mat& a);

Mat transpose(const Mat& a);

/// max |a(i,j) - b(i,j)|
double max_abs_diff(const Mat& a, const Mat& b);

/// Symmetric matrix. Construction checks max|M - Mᵀ| against the tolerance
/// and then symmetrizes exactly, so the stored entries always satisfy
/// m(i,j) == m(j,i) bit for bit.
class SymMat {
public:
    SymMat() = default;

    /// Checked: rejects non-square input and asymmetry beyond tolerance.
    explicit SymMat(const Mat& m);

    /// Unchecked symmetrization (M + Mᵀ)/2 of a square matrix. For results
    /// of computations that are symmetric in exact arithmetic.
    static SymMat from_average(const Mat& m);

    static SymMat identity(int n) { return SymMat(Mat::identity(n)); }
    static SymMat zero(int n) { return SymMat(Mat(n, n)); }
    static SymMat diag(std::initializer_list<double> d);

    int dim() const { return m_.rows(); }
    const Mat& mat() const { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }

private:
    Mat m_;
};

SymMat operator+(const SymMat& a, const SymMat& b);
SymMat operator-(const SymMat& a, const SymMat& b);
SymMat operator*(double s, const SymMat& a);

} // namespace lqriter
