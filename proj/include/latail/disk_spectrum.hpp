#pragma once

#include <functional>
#include <string>
#include <vector>

#include "latail/certificate.hpp"
#include "latail/landau_basis.hpp"

namespace latail {

struct DiskSpec {
    double R;   // disk radius, > 0
    double rho; // b R^2 / 2

    static DiskSpec from_radius(const FieldConfig& cfg, double R);
};

/// Eigenvalue of Pi_q 1_{D(0,R)} Pi_q at angular index k together with its
/// asymptotic form and the main-term/remainder split (q >= 1).
struct DiskEigenvalue {
    double nu_exact = 0.0;   // in [0, 1]
    double nu_asym = 0.0;    // e^{-rho} rho^{k-q+1} (k-rho)^{2q-1} / (q! k!)
    double main_term = 0.0;  // V(k,q)
    double remainder = 0.0;  // nu_exact - V(k,q)
    double i_factor = 0.0;   // I(k,rho)
    double remainder_bound = 0.0; // (C_q/k)(1/(k!q!)) int e^-xi xi^{k-q}(k+xi)^{2q}
    double cq_used = 0.0;
    bool bound_ok = false;   // |remainder| <= remainder_bound
};

struct AsymWindow {
    double beta;                            // in (0, 2)
    std::function<double(double)> f;        // f(k) >= 1
    std::string descriptor;                 // e.g. "k^0.75"
};

/// <V phi_{q,k}, phi_{q,k}> for radially symmetric V, reduced to the 1D
/// integral (q!/k!) int_0^inf V(sqrt(2 xi / b)) xi^{k-q} [L_q^{(k-q)}(xi)]^2 e^{-xi} dxi.
/// Adaptive quadrature at the given relative tolerance; throws
/// numerical_error with the achieved tolerance if it cannot converge.
double mu_radial(const FieldConfig& cfg, LandauIndex idx,
                 const std::function<double(double)>& V_of_r,
                 double rel_tol = 1e-10);

/// nu_{q,k}(R) = mu_{q,k}(1_{D(0,R)}).  q = 0 reduces to the regularized
/// incomplete gamma P(k+1, rho); q >= 1 expands [L]^2 into monomials and sums
/// incomplete-gamma terms in the log domain, falling back to log-domain
/// quadrature when the summation loses more than 18 digits.
double nu_exact(const FieldConfig& cfg, LandauIndex idx, const DiskSpec& disk);

/// ln nu_{q,k}(R); finite far below double range.
double log_nu_exact(const FieldConfig& cfg, LandauIndex idx, const DiskSpec& disk);

/// Asymptotic eigenvalue, requires k > rho.
double nu_asymptotic(const FieldConfig& cfg, LandauIndex idx, const DiskSpec& disk);
double log_nu_asymptotic(const FieldConfig& cfg, LandauIndex idx, const DiskSpec& disk);

/// Main-term/remainder decomposition (q >= 1, k >= q), with the remainder
/// bound evaluated at the empirically fitted C_q.
DiskEigenvalue decompose(const FieldConfig& cfg, LandauIndex idx, const DiskSpec& disk);

struct RhoRule {
    double rho_min = 1.0;
    int points = 16; // geometric grid from rho_min to k - f(k)
};

/// Certificate for the ratio bound: for each k and a rho-grid up to k - f(k),
/// records |nu/nu0 - 1| against C (k^{2q-1} f^{-2q} + k f^{-(beta+1)}) with a
/// single fitted C; passes when one C dominates every row and the per-k worst
/// deviation decreases along k_range.
Certificate verify_f1(const FieldConfig& cfg, int q, const AsymWindow& window,
                      const std::vector<long>& k_range, const RhoRule& rho_rule = {});

} // namespace latail
