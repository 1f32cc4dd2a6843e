#pragma once

#include <vector>

#include "latail/certificate.hpp"
#include "latail/landau_basis.hpp"

namespace latail {

struct EnlargementParams {
    double epsilon; // small disk radius
    double R;       // large radius
    double C;       // > 2b; defines k0
    double delta;   // in (0, 1)
    long k0;        // ceil(C R^2)
    long k_max;     // certification horizon, default 4 k0

    static EnlargementParams make(const FieldConfig& cfg, double epsilon,
                                  double R, double C, double delta,
                                  long k_max = -1);
};

struct C1Result {
    double log_c1;         // ln of the min over k <= k0 of nu(eps)/nu(R)
    long argmin_k;
    double exponent_ratio; // ln C1 / (R^2 ln R), the measured exponent
    double comparator_log; // -2 C R^2 ln R, the nominal comparator exponent
};

struct C2Result {
    double log_c2;
    double envelope_log;   // -R^2 / C0' with the fitted C0'
    double fitted_c0;      // smallest C0' making log C2 <= -R^2/C0'
    bool decays;           // log C2 < 0
};

C1Result compute_C1(const FieldConfig& cfg, int q, const EnlargementParams& p);
C2Result compute_C2(const FieldConfig& cfg, int q, const EnlargementParams& p);

/// Scalar inequality nu_{q,k}(eps) >= C1 (nu_{q,k}(R) - C2 nu_{q,k}(2R)) for
/// every k <= k_max.  For k <= k0 this follows from the definition of C1; for
/// k > k0 the certificate verifies nu(R) - C2 nu(2R) <= 0 in the log domain
/// (the tail mechanism) and records the crossover index.
Certificate certify_le2(const FieldConfig& cfg, int q, const EnlargementParams& p);

struct OperatorBound {
    std::vector<double> lhs_diag; // nu_{q,k}(eps), k < K
    std::vector<double> rhs_diag; // C1 (nu(R) - C2 nu(2R))
    double min_eigenvalue;        // of LHS - RHS
};

/// Both sides of the operator inequality as diagonal matrices in the
/// phi_{q,k} basis truncated at K, with the computed C1, C2; the minimum
/// eigenvalue of LHS - RHS comes from the dense Hermitian solver.
OperatorBound enlargement_operator_bound(const FieldConfig& cfg, int q,
                                         const EnlargementParams& p, int K);

} // namespace latail
