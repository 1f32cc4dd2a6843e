#include "latail/eigensolver.hpp"

#include <stdexcept>
#include <string>

#include <lapacke.h>

namespace latail {

std::vector<double> hermitian_eigenvalues(std::vector<std::complex<double>> a,
                                          int n) {
    if (n < 0 || a.size() != static_cast<size_t>(n) * n)
        throw std::invalid_argument("hermitian_eigenvalues: bad dimensions");
    std::vector<double> w(n);
    if (n == 0) return w;
    const lapack_int info = LAPACKE_zheev(
        LAPACK_ROW_MAJOR, 'N', 'L', n,
        reinterpret_cast<lapack_complex_double*>(a.data()), n, w.data());
    if (info != 0)
        throw std::runtime_error("zheev failed, info=" + std::to_string(info));
    return w;
}

} // namespace latail
