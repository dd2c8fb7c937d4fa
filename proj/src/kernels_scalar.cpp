#include "lqriter/kernels.hpp"

// Reference implementations. Plain sequential loops: these define the
// semantics the SIMD variants are tested against.

namespace lqriter::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double a, const double* x, double* dst, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = a * x[i];
}

void add_scalar(const double* x, const double* y, double* dst, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = x[i] + y[i];
}

void sub_scalar(const double* x, const double* y, double* dst, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = x[i] - y[i];
}

double sum_sq_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

} // namespace

const Ops& scalar_ops() {
    static const Ops ops = {dot_scalar, axpy_scalar, scale_scalar,
                            add_scalar, sub_scalar, sum_sq_scalar};
    return ops;
}

} // namespace lqriter::kernels
