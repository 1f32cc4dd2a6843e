// Compiled with -mavx2 -mfma (see CMakeLists); only reached after the runtime
// cpu check in kernels.cpp.

#include "latail/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

namespace latail::kernels {

namespace {

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    double lanes[4];
    _mm256_storeu_pd(lanes, acc);
    double s = ((lanes[0] + lanes[1]) + (lanes[2] + lanes[3]));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void herm_rank1_lower_avx2(double* mre, double* mim, std::size_t ld,
                           const double* zre, const double* zim, double c,
                           std::size_t K) {
    for (std::size_t k = 0; k < K; ++k) {
        const double ar = c * zre[k];
        const double ai = c * zim[k];
        const __m256d var = _mm256_set1_pd(ar);
        const __m256d vai = _mm256_set1_pd(ai);
        double* rre = mre + k * ld;
        double* rim = mim + k * ld;
        const std::size_t m = k + 1;
        std::size_t j = 0;
        for (; j + 4 <= m; j += 4) {
            const __m256d vr = _mm256_loadu_pd(zre + j);
            const __m256d vi = _mm256_loadu_pd(zim + j);
            __m256d re = _mm256_loadu_pd(rre + j);
            __m256d im = _mm256_loadu_pd(rim + j);
            re = _mm256_fmadd_pd(var, vr, re);
            re = _mm256_fmadd_pd(vai, vi, re);
            im = _mm256_fmadd_pd(vai, vr, im);
            im = _mm256_fnmadd_pd(var, vi, im);
            _mm256_storeu_pd(rre + j, re);
            _mm256_storeu_pd(rim + j, im);
        }
        for (; j < m; ++j) {
            rre[j] += ar * zre[j] + ai * zim[j];
            rim[j] += ai * zre[j] - ar * zim[j];
        }
    }
}

} // namespace

const Ops* avx2_ops_impl() {
    static const Ops ops{"avx2", axpy_avx2, dot_avx2, herm_rank1_lower_avx2};
    return &ops;
}

} // namespace latail::kernels

#else

namespace latail::kernels {
const Ops* avx2_ops_impl() { return nullptr; }
} // namespace latail::kernels

#endif
