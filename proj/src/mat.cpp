#include "lqriter/mat.hpp"

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include "lqriter/kernels.hpp"
#include "lqriter/tolerances.hpp"

namespace lqriter {

namespace {

void require_positive_dims(int rows, int cols) {
    if (rows <= 0 || cols <= 0)
        throw DimensionError("matrix dimensions must be positive, got " +
                             std::to_string(rows) + "x" + std::to_string(cols));
}

} // namespace

Mat::Mat(int rows, int cols) : rows_(rows), cols_(cols) {
    require_positive_dims(rows, cols);
    data_.assign(static_cast<std::size_t>(rows) * cols, 0.0);
}

Mat::Mat(int rows, int cols, std::vector<double> column_major)
    : rows_(rows), cols_(cols), data_(std::move(column_major)) {
    require_positive_dims(rows, cols);
    if (data_.size() != static_cast<std::size_t>(rows) * cols)
        throw DimensionError("entry count " + std::to_string(data_.size()) +
                             " does not match " + std::to_string(rows) + "x" +
                             std::to_string(cols));
}

Mat Mat::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const int r = static_cast<int>(rows.size());
    if (r == 0) throw DimensionError("empty row list");
    const int c = static_cast<int>(rows.begin()->size());
    Mat m(r, c);
    int i = 0;
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != c)
            throw DimensionError("ragged row list");
        int j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

Mat Mat::identity(int n) { return eye(n, n); }

Mat Mat::eye(int rows, int cols) {
    Mat m(rows, cols);
    const int d = rows < cols ? rows : cols;
    for (int i = 0; i < d; ++i) m(i, i) = 1.0;
    return m;
}

Mat operator+(const Mat& a, const Mat& b) {
    if (!a.same_shape(b)) throw DimensionError("shape mismatch in +");
    Mat out(a.rows(), a.cols());
    kernels::add(a.data(), b.data(), out.data(), a.size());
    return out;
}

Mat operator-(const Mat& a, const Mat& b) {
    if (!a.same_shape(b)) throw DimensionError("shape mismatch in -");
    Mat out(a.rows(), a.cols());
    kernels::sub(a.data(), b.data(), out.data(), a.size());
    return out;
}

Mat operator*(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows()) throw DimensionError("shape mismatch in *");
    Mat out(a.rows(), b.cols());
    // column-major: out.col(j) = Σ_k a.col(k)·b(k,j)
    for (int j = 0; j < b.cols(); ++j) {
        double* cj = out.col(j);
        for (int k = 0; k < a.cols(); ++k)
            kernels::axpy(b(k, j), a.col(k), cj, static_cast<std::size_t>(a.rows()));
    }
    return out;
}

Mat operator*(double s, const Mat& a) {
    Mat out(a.rows(), a.cols());
    kernels::scale(s, a.data(), out.data(), a.size());
    return out;
}

Mat operator-(const Mat& a) { return -1.0 * a; }

Mat transpose(const Mat& a) {
    Mat out(a.cols(), a.rows());
    for (int j = 0; j < a.cols(); ++j)
        for (int i = 0; i < a.rows(); ++i) out(j, i) = a(i, j);
    return out;
}

double max_abs_diff(const Mat& a, const Mat& b) {
    if (!a.same_shape(b)) throw DimensionError("shape mismatch in max_abs_diff");
    double m = 0.0;
    const double* pa = a.data();
    const double* pb = b.data();
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = std::fabs(pa[i] - pb[i]);
        if (d > m) m = d;
    }
    return m;
}

SymMat::SymMat(const Mat& m) {
    if (!m.is_square()) throw DimensionError("SymMat requires a square matrix");
    double asym = max_abs_diff(m, transpose(m));
    if (asym > tols().sym_max_asym)
        throw InvalidArgumentError("matrix is not symmetric: max|M-Mt| = " +
                                   std::to_string(asym));
    *this = from_average(m);
}

SymMat SymMat::from_average(const Mat& m) {
    if (!m.is_square()) throw DimensionError("SymMat requires a square matrix");
    SymMat s;
    s.m_ = Mat(m.rows(), m.cols());
    for (int j = 0; j < m.cols(); ++j) {
        s.m_(j, j) = m(j, j);
        for (int i = 0; i < j; ++i) {
            double v = 0.5 * (m(i, j) + m(j, i));
            s.m_(i, j) = v;
            s.m_(j, i) = v;
        }
    }
    return s;
}

SymMat SymMat::diag(std::initializer_list<double> d) {
    Mat m(static_cast<int>(d.size()), static_cast<int>(d.size()));
    int i = 0;
    for (double v : d) {
        m(i, i) = v;
        ++i;
    }
    return SymMat(m);
}

SymMat operator+(const SymMat& a, const SymMat& b) {
    return SymMat::from_average(a.mat() + b.mat());
}

SymMat operator-(const SymMat& a, const SymMat& b) {
    return SymMat::from_average(a.mat() - b.mat());
}

SymMat operator*(double s, const SymMat& a) {
    return SymMat::from_average(s * a.mat());
}

const Tolerances& tols() {
    static const Tolerances t{};
    return t;
}

} // namespace lqriter
