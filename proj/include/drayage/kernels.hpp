#pragma once

#include <cstddef>

// Dense vector kernels used by the hot loops of the LP solver and the
// statistics helpers. A scalar reference implementation always exists;
// an AVX2 variant is selected at runtime when the CPU supports it.
// The two variants are equivalence-tested against each other.

namespace drayage::kern {

enum class Backend { Scalar, Avx2 };

// Backend actually dispatched to. Honors the DRAYAGE_KERNELS environment
// variable ("scalar", "avx2", "auto"); requests for an unsupported backend
// fall back to scalar.
Backend active_backend();

double dot(const double* a, const double* b, std::size_t n);

// y += alpha * x
void axpy(std::size_t n, double alpha, const double* x, double* y);

double sum(const double* x, std::size_t n);

// Reference implementations, exposed for equivalence tests.
double dot_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(std::size_t n, double alpha, const double* x, double* y);
double sum_scalar(const double* x, std::size_t n);

#if defined(DRAYAGE_HAVE_AVX2)
double dot_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(std::size_t n, double alpha, const double* x, double* y);
double sum_avx2(const double* x, std::size_t n);
#endif

} // namespace drayage::kern
