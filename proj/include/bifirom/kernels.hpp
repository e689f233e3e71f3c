#pragma once

#include <cstddef>

// Data-parallel inner loops behind the dense linear algebra. A scalar
// reference implementation always exists; an AVX2 (x86-64) or NEON (aarch64)
// variant is selected once at startup when the CPU supports it. Setting the
// environment variable BIFIROM_FORCE_SCALAR=1 pins the scalar path, which the
// equivalence tests use to compare backends.

namespace bifirom::kernels {

double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scal(double alpha, double* x, std::size_t n);
double nrm2(const double* x, std::size_t n);

// Name of the active backend: "scalar", "avx2" or "neon".
const char* backend();

// Test hook: force the scalar reference path on/off at runtime.
void force_scalar(bool on);

namespace detail {
double dot_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
void scal_scalar(double alpha, double* x, std::size_t n);

#if defined(__x86_64__)
double dot_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
void scal_avx2(double alpha, double* x, std::size_t n);
#endif
#if defined(__aarch64__)
double dot_neon(const double* a, const double* b, std::size_t n);
void axpy_neon(double alpha, const double* x, double* y, std::size_t n);
void scal_neon(double alpha, double* x, std::size_t n);
#endif
}  // namespace detail

}  // namespace bifirom::kernels
