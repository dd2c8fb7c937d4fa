#include "lqriter/kernels.hpp"

// NEON variants, two doubles per lane. NEON with float64x2_t is baseline on
// aarch64, so no runtime feature probe is needed there.

#if defined(__aarch64__)

#include <arm_neon.h>

namespace lqriter::kernels {
namespace {

double dot_neon(const double* x, const double* y, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        acc = vfmaq_f64(acc, vld1q_f64(x + i), vld1q_f64(y + i));
    double result = vaddvq_f64(acc);
    for (; i < n; ++i) result += x[i] * y[i];
    return result;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
    float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

void scale_neon(double a, const double* x, double* dst, std::size_t n) {
    float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(dst + i, vmulq_f64(va, vld1q_f64(x + i)));
    for (; i < n; ++i) dst[i] = a * x[i];
}

void add_neon(const double* x, const double* y, double* dst, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(dst + i, vaddq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
    for (; i < n; ++i) dst[i] = x[i] + y[i];
}

void sub_neon(const double* x, const double* y, double* dst, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(dst + i, vsubq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
    for (; i < n; ++i) dst[i] = x[i] - y[i];
}

double sum_sq_neon(const double* x, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t vx = vld1q_f64(x + i);
        acc = vfmaq_f64(acc, vx, vx);
    }
    double result = vaddvq_f64(acc);
    for (; i < n; ++i) result += x[i] * x[i];
    return result;
}

} // namespace

const Ops* neon_ops() {
    static const Ops ops = {dot_neon, axpy_neon, scale_neon,
                            add_neon, sub_neon, sum_sq_neon};
    return &ops;
}

} // namespace lqriter::kernels

#else

namespace lqriter::kernels {
const Ops* neon_ops() { return nullptr; }
} // namespace lqriter::kernels

#endif
