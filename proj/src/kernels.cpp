#include "bifirom/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>

namespace bifirom::kernels {

namespace {

struct Backend {
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*scal)(double, double*, std::size_t);
    const char* name;
};

constexpr Backend kScalar{detail::dot_scalar, detail::axpy_scalar,
                          detail::scal_scalar, "scalar"};

Backend detect() {
    if (const char* env = std::getenv("BIFIROM_FORCE_SCALAR");
        env != nullptr && env[0] == '1') {
        return kScalar;
    }
#if defined(__x86_64__)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
        return {detail::dot_avx2, detail::axpy_avx2, detail::scal_avx2, "avx2"};
    }
#elif defined(__aarch64__)
    return {detail::dot_neon, detail::axpy_neon, detail::scal_neon, "neon"};
#endif
    return kScalar;
}

Backend g_backend = detect();
bool g_forced_scalar = false;
Backend g_detected = g_backend;

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
    return g_backend.dot(a, b, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    g_backend.axpy(alpha, x, y, n);
}

void scal(double alpha, double* x, std::size_t n) {
    g_backend.scal(alpha, x, n);
}

double nrm2(const double* x, std::size_t n) {
    return std::sqrt(g_backend.dot(x, x, n));
}

const char* backend() { return g_backend.name; }

void force_scalar(bool on) {
    g_forced_scalar = on;
    g_backend = on ? kScalar : g_detected;
}

}  // namespace bifirom::kernels
