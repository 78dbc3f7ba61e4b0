#include "drayage/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace drayage::kern {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_scalar(std::size_t n, double alpha, const double* x, double* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sum_scalar(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

namespace {

bool cpu_has_avx2() {
#if defined(DRAYAGE_HAVE_AVX2) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

struct Dispatch {
    Backend backend;
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(std::size_t, double, const double*, double*);
    double (*sum)(const double*, std::size_t);
};

Dispatch make_dispatch() {
    const char* req = std::getenv("DRAYAGE_KERNELS");
    bool want_avx2 = cpu_has_avx2();
    if (req != nullptr) {
        if (std::strcmp(req, "scalar") == 0) want_avx2 = false;
        else if (std::strcmp(req, "avx2") == 0) want_avx2 = cpu_has_avx2();
        // anything else (incl. "auto"): keep the probe result
    }
#if defined(DRAYAGE_HAVE_AVX2)
    if (want_avx2) return {Backend::Avx2, &dot_avx2, &axpy_avx2, &sum_avx2};
#endif
    (void)want_avx2;
    return {Backend::Scalar, &dot_scalar, &axpy_scalar, &sum_scalar};
}

const Dispatch& dispatch() {
    static const Dispatch d = make_dispatch();
    return d;
}

} // namespace

Backend active_backend() { return dispatch().backend; }

double dot(const double* a, const double* b, std::size_t n) { return dispatch().dot(a, b, n); }

void axpy(std::size_t n, double alpha, const double* x, double* y) { dispatch().axpy(n, alpha, x, y); }

double sum(const double* x, std::size_t n) { return dispatch().sum(x, n); }

} // namespace drayage::kern
