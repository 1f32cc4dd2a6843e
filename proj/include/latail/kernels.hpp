#pragma once

#include <cstddef>

namespace latail::kernels {

// Data-parallel inner loops behind the operator assembly and the
// distribution-convolution paths.  One scalar reference implementation plus
// SIMD variants selected once at runtime; all variants accumulate in the same
// order, so results do not depend on which one runs a given thread count.
struct Ops {
    const char* name;

    // y[i] += a * x[i]
    void (*axpy)(double a, const double* x, double* y, std::size_t n);

    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);

    // M += c * z z^H restricted to the lower triangle (rows k, columns j <= k),
    // split storage: mre/mim are K x ld row-major real arrays, z split re/im,
    // c real.
    void (*herm_rank1_lower)(double* mre, double* mim, std::size_t ld,
                             const double* zre, const double* zim, double c,
                             std::size_t K);
};

/// Scalar reference kernels (always available).
const Ops& scalar_ops();

/// AVX2+FMA kernels, or nullptr when unsupported (compile- or run-time).
const Ops* avx2_ops();

/// NEON kernels, or nullptr when unsupported.
const Ops* neon_ops();

/// The active set: best supported variant, overridable with
/// LATAIL_KERNELS=scalar|avx2|neon (falls back to scalar if the request is
/// unavailable).  Resolved once.
const Ops& active();

} // namespace latail::kernels
