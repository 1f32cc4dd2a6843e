#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace latail {

struct FieldConfig {
    double b; // constant scalar magnetic field, > 0

    explicit FieldConfig(double b_);
    double level_energy(int q) const { return 2.0 * b * q; }
};

struct LandauIndex {
    int q = 0; // band
    int k = 0; // angular index
    LandauIndex(int q_, int k_);
};

struct PlanePoint {
    double x1 = 0.0;
    double x2 = 0.0;
};

/// Landau eigenfunction phi_{q,k}(x):
///   sqrt(q!/(pi k!)) (b/2)^{(k-q+1)/2} (x1+ix2)^{k-q} L_q^{(k-q)}(b|x|^2/2) e^{-b|x|^2/4},
/// prefactor handled in the log domain.  For k < q the factor xi^{q-k} is
/// split off the Laguerre sum analytically, removing the apparent singularity
/// at the origin; what remains is
///   sqrt(q!/(pi k!)) (b/2)^{(q-k+1)/2} (x1-ix2)^{q-k} P_{q,k}(xi) e^{-xi/2}
/// with P_{q,k} the reduced (degree-k) polynomial.
std::complex<double> eval_eigenfunction(const FieldConfig& cfg, LandauIndex idx,
                                        PlanePoint x);

/// Magnetic translation: (U_alpha^b f)(x) = e^{(ib/2)(x1 a2 - x2 a1)} f(x + alpha).
std::complex<double> magnetic_translate(
    const FieldConfig& cfg, PlanePoint alpha,
    const std::function<std::complex<double>(PlanePoint)>& f_at, PlanePoint x);

/// Batched evaluation of phi_{q,k}(x - center) for k = 0..K-1.  The magnetic
/// translation phase attached to re-centering is a single unimodular factor
/// per point; it cancels in every sesquilinear form assembled here and is
/// omitted.
class BasisBatch {
public:
    BasisBatch(const FieldConfig& cfg, int q, int K, PlanePoint center);

    int size() const { return K_; }

    // re/im must hold K doubles
    void eval(PlanePoint x, double* re, double* im) const;

private:
    double b_;
    int q_;
    int K_;
    PlanePoint center_;
    // Laguerre coefficients for k >= q, stored per power l: coeff_[l][k - q]
    std::vector<std::vector<double>> coeff_;
    // reduced polynomial coefficients for k < q, coeff_low_[k][0..k]
    std::vector<std::vector<double>> coeff_low_;
    std::vector<double> step_;     // magnitude recurrence factors sqrt(b/(2(k+1)))
    std::vector<double> low_step_; // downward factors sqrt(k b / 2) for k = q..1
};

} // namespace latail
