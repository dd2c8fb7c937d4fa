#pragma once

#include <cstddef>

// Arithmetic inner loops shared by the whole library. Each primitive has a
// scalar reference implementation and, where the host supports it, a SIMD
// variant (AVX2+FMA on x86-64, NEON on aarch64). The backend is selected
// once at runtime; see select_backend(). SIMD reductions reassociate, so
// results may differ from the scalar reference in the last bits; the
// equivalence tests bound that difference, and a given process always uses
// one backend, keeping runs reproducible.
namespace lqriter::kernels {

enum class Backend { scalar, avx2, neon };

/// Backend currently in use.
Backend active_backend();

/// Force a backend (tests). Throws InvalidArgumentError if unsupported here.
void set_backend(Backend b);

/// Best supported backend, honoring the LQRITER_KERNELS environment
/// variable ("scalar", "avx2", "neon") when set to a supported value.
Backend select_backend();

const char* backend_name(Backend b);

// primitives ---------------------------------------------------------------

/// Σ x[i]·y[i]
double dot(const double* x, const double* y, std::size_t n);

/// y += a·x
void axpy(double a, const double* x, double* y, std::size_t n);

/// dst = a·x
void scale(double a, const double* x, double* dst, std::size_t n);

/// dst = x + y
void add(const double* x, const double* y, double* dst, std::size_t n);

/// dst = x - y
void sub(const double* x, const double* y, double* dst, std::size_t n);

/// Σ x[i]²
double sum_sq(const double* x, std::size_t n);

// per-backend tables (exposed for the equivalence tests) --------------------

struct Ops {
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*scale)(double, const double*, double*, std::size_t);
    void (*add)(const double*, const double*, double*, std::size_t);
    void (*sub)(const double*, const double*, double*, std::size_t);
    double (*sum_sq)(const double*, std::size_t);
};

const Ops& scalar_ops();
const Ops* avx2_ops(); // nullptr when not compiled in or not supported
const Ops* neon_ops(); // nullptr when not compiled in

} // namespace lqriter::kernels
