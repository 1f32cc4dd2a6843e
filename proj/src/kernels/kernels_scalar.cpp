#include "latail/kernels.hpp"

namespace latail::kernels {

namespace {

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void herm_rank1_lower_scalar(double* mre, double* mim, std::size_t ld,
                             const double* zre, const double* zim, double c,
                             std::size_t K) {
    for (std::size_t k = 0; k < K; ++k) {
        const double ar = c * zre[k];
        const double ai = c * zim[k];
        double* rre = mre + k * ld;
        double* rim = mim + k * ld;
        for (std::size_t j = 0; j <= k; ++j) {
            rre[j] += ar * zre[j] + ai * zim[j];
            rim[j] += ai * zre[j] - ar * zim[j];
        }
    }
}

} // namespace

const Ops& scalar_ops() {
    static const Ops ops{"scalar", axpy_scalar, dot_scalar,
                         herm_rank1_lower_scalar};
    return ops;
}

} // namespace latail::kernels
