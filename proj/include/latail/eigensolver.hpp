#pragma once

#include <complex>
#include <vector>

namespace latail {

/// Eigenvalues (ascending) of an n x n Hermitian matrix given row-major.
/// The input copy is consumed by the LAPACK driver.
std::vector<double> hermitian_eigenvalues(std::vector<std::complex<double>> a,
                                          int n);

} // namespace latail
