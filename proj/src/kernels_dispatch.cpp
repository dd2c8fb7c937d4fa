#include "lqriter/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "lqriter/errors.hpp"

namespace lqriter::kernels {
namespace {

struct Active {
    const Ops* ops;
    Backend backend;
};

const Ops* for_backend(Backend b) {
    switch (b) {
        case Backend::scalar: return &scalar_ops();
        case Backend::avx2: return avx2_ops();
        case Backend::neon: return neon_ops();
    }
    return nullptr;
}

Active detect() {
    if (const char* env = std::getenv("LQRITER_KERNELS")) {
        Backend want = Backend::scalar;
        bool known = true;
        if (std::strcmp(env, "scalar") == 0) want = Backend::scalar;
        else if (std::strcmp(env, "avx2") == 0) want = Backend::avx2;
        else if (std::strcmp(env, "neon") == 0) want = Backend::neon;
        else known = false;
        if (known)
            if (const Ops* ops = for_backend(want)) return {ops, want};
        // unknown or unsupported value: fall through to auto-detection
    }
    if (const Ops* ops = avx2_ops()) return {ops, Backend::avx2};
    if (const Ops* ops = neon_ops()) return {ops, Backend::neon};
    return {&scalar_ops(), Backend::scalar};
}

std::atomic<const Active*> g_active{nullptr};

const Active& active() {
    const Active* a = g_active.load(std::memory_order_acquire);
    if (!a) {
        static Active detected = detect();
        const Active* expected = nullptr;
        g_active.compare_exchange_strong(expected, &detected,
                                         std::memory_order_acq_rel);
        a = g_active.load(std::memory_order_acquire);
    }
    return *a;
}

} // namespace

Backend active_backend() { return active().backend; }

Backend select_backend() { return detect().backend; }

void set_backend(Backend b) {
    const Ops* ops = for_backend(b);
    if (!ops)
        throw InvalidArgumentError(std::string("kernel backend not available: ") +
                                   backend_name(b));
    static Active forced[] = {{nullptr, Backend::scalar},
                              {nullptr, Backend::avx2},
                              {nullptr, Backend::neon}};
    Active& slot = forced[static_cast<int>(b)];
    slot = {ops, b};
    g_active.store(&slot, std::memory_order_release);
}

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
        case Backend::neon: return "neon";
    }
    return "?";
}

double dot(const double* x, const double* y, std::size_t n) {
    return active().ops->dot(x, y, n);
}
void axpy(double a, const double* x, double* y, std::size_t n) {
    active().ops->axpy(a, x, y, n);
}
void scale(double a, const double* x, double* dst, std::size_t n) {
    active().ops->scale(a, x, dst, n);
}
void add(const double* x, const double* y, double* dst, std::size_t n) {
    active().ops->add(x, y, dst, n);
}
void sub(const double* x, const double* y, double* dst, std::size_t n) {
    active().ops->sub(x, y, dst, n);
}
double sum_sq(const double* x, std::size_t n) {
    return active().ops->sum_sq(x, n);
}

} // namespace lqriter::kernels
