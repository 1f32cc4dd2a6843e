#include "latail/kernels.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)

#include <arm_neon.h>

namespace latail::kernels {

namespace {

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t vy = vld1q_f64(y + i);
        vy = vfmaq_f64(vy, va, vld1q_f64(x + i));
        vst1q_f64(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
    double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void herm_rank1_lower_neon(double* mre, double* mim, std::size_t ld,
                           const double* zre, const double* zim, double c,
                           std::size_t K) {
    for (std::size_t k = 0; k < K; ++k) {
        const double ar = c * zre[k];
        const double ai = c * zim[k];
        const float64x2_t var = vdupq_n_f64(ar);
        const float64x2_t vai = vdupq_n_f64(ai);
        double* rre = mre + k * ld;
        double* rim = mim + k * ld;
        const std::size_t m = k + 1;
        std::size_t j = 0;
        for (; j + 2 <= m; j += 2) {
            const float64x2_t vr = vld1q_f64(zre + j);
            const float64x2_t vi = vld1q_f64(zim + j);
            float64x2_t re = vld1q_f64(rre + j);
            float64x2_t im = vld1q_f64(rim + j);
            re = vfmaq_f64(re, var, vr);
            re = vfmaq_f64(re, vai, vi);
            im = vfmaq_f64(im, vai, vr);
            im = vfmsq_f64(im, var, vi);
            vst1q_f64(rre + j, re);
            vst1q_f64(rim + j, im);
        }
        for (; j < m; ++j) {
            rre[j] += ar * zre[j] + ai * zim[j];
            rim[j] += ai * zre[j] - ar * zim[j];
        }
    }
}

} // namespace

const Ops* neon_ops_impl() {
    static const Ops ops{"neon", axpy_neon, dot_neon, herm_rank1_lower_neon};
    return &ops;
}

} // namespace latail::kernels

#else

namespace latail::kernels {
const Ops* neon_ops_impl() { return nullptr; }
} // namespace latail::kernels

#endif
