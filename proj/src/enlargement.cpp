#include "latail/enlargement.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "latail/disk_spectrum.hpp"
#include "latail/eigensolver.hpp"

namespace latail {

EnlargementParams EnlargementParams::make(const FieldConfig& cfg, double epsilon,
                                          double R, double C, double delta,
                                          long k_max) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("enlargement: epsilon <= 0");
    if (!(epsilon <= R)) throw std::invalid_argument("enlargement: requires epsilon <= R");
    if (!(C > 2.0 * cfg.b)) throw std::invalid_argument("enlargement: requires C > 2b");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("enlargement: delta must lie in (0, 1)");
    EnlargementParams p;
    p.epsilon = epsilon;
    p.R = R;
    p.C = C;
    p.delta = delta;
    p.k0 = static_cast<long>(std::ceil(C * R * R));
    // k0 >= rho(2R) = 2 b R^2 comes with C > 2b
    p.k_max = (k_max > 0) ? k_max : 4 * p.k0;
    return p;
}

C1Result compute_C1(const FieldConfig& cfg, int q, const EnlargementParams& p) {
    const DiskSpec de = DiskSpec::from_radius(cfg, p.epsilon);
    const DiskSpec dR = DiskSpec::from_radius(cfg, p.R);
    C1Result r;
    r.log_c1 = std::numeric_limits<double>::infinity();
    r.argmin_k = -1;
    for (long k = 0; k <= p.k0; ++k) {
        const LandauIndex idx(q, static_cast<int>(k));
        const double lr = log_nu_exact(cfg, idx, de) - log_nu_exact(cfg, idx, dR);
        if (lr < r.log_c1) {
            r.log_c1 = lr;
            r.argmin_k = k;
        }
    }
    const double r2lr = p.R * p.R * std::log(p.R);
    r.exponent_ratio = r.log_c1 / r2lr;
    r.comparator_log = -2.0 * p.C * r2lr;
    return r;
}

C2Result compute_C2(const FieldConfig& cfg, int q, const EnlargementParams& p) {
    C2Result r;
    const double rho_R = 0.5 * cfg.b * p.R * p.R;
    const double rho_2R = 4.0 * rho_R;
    r.log_c2 = std::log((1.0 + p.delta) / (1.0 - p.delta)) +
               (2.0 * q - 1.0) * std::log(p.C / (p.C - 2.0 * cfg.b)) -
               2.0 * (p.k0 - q + 1) * std::log(2.0) - rho_R + rho_2R;
    r.decays = r.log_c2 < 0.0;
    r.fitted_c0 = r.decays ? -(p.R * p.R) / r.log_c2
                           : std::numeric_limits<double>::quiet_NaN();
    r.envelope_log = r.decays ? -(p.R * p.R) / r.fitted_c0
                              : std::numeric_limits<double>::quiet_NaN();
    return r;
}

Certificate certify_le2(const FieldConfig& cfg, int q, const EnlargementParams& p) {
    const C1Result c1 = compute_C1(cfg, q, p);
    const C2Result c2 = compute_C2(cfg, q, p);
    const double C1v = std::exp(c1.log_c1);
    const double C2v = std::exp(c2.log_c2);

    const DiskSpec de = DiskSpec::from_radius(cfg, p.epsilon);
    const DiskSpec dR = DiskSpec::from_radius(cfg, p.R);
    const DiskSpec d2R = DiskSpec::from_radius(cfg, 2.0 * p.R);

    Certificate cert;
    cert.lemma_id = "le2";
    cert.params["b"] = cfg.b;
    cert.params["q"] = q;
    cert.params["epsilon"] = p.epsilon;
    cert.params["R"] = p.R;
    cert.params["C"] = p.C;
    cert.params["delta"] = p.delta;
    cert.params["k0"] = static_cast<double>(p.k0);
    cert.params["k_max"] = static_cast<double>(p.k_max);
    cert.precision_note =
        "margins in linear domain, tolerance 1e-14; for k > k0 the sign of "
        "nu(R) - C2 nu(2R) is additionally verified in the log domain";

    const double tol = 1e-14;
    bool pass = true;
    long crossover = -1;
    bool tail_ok = true;

    for (long k = 0; k <= p.k_max; ++k) {
        const LandauIndex idx(q, static_cast<int>(k));
        const double le = log_nu_exact(cfg, idx, de);
        const double lR = log_nu_exact(cfg, idx, dR);
        const double l2R = log_nu_exact(cfg, idx, d2R);

        const double lhs = std::exp(le);
        const double rhs = C1v * (std::exp(lR) - C2v * std::exp(l2R));
        const double margin = lhs - rhs;
        if (!(margin >= -tol)) pass = false;

        const bool tail_negative = lR <= c2.log_c2 + l2R;
        if (crossover < 0 && tail_negative) crossover = k;
        if (k > p.k0 && !tail_negative) {
            tail_ok = false;
            pass = false;
        }

        cert.rows.push_back({{"k", static_cast<double>(k)},
                             {"lhs", lhs},
                             {"rhs", rhs},
                             {"margin", margin}});
    }

    cert.constants["C1"] = C1v;
    cert.constants["C2"] = C2v;
    cert.constants["log_C1"] = c1.log_c1;
    cert.constants["log_C2"] = c2.log_c2;
    cert.constants["C1_argmin_k"] = static_cast<double>(c1.argmin_k);
    cert.constants["C1_exponent_ratio"] = c1.exponent_ratio;
    cert.constants["C1_comparator_log"] = c1.comparator_log;
    cert.constants["C2_fitted_C0"] = c2.fitted_c0;
    cert.constants["crossover_k"] = static_cast<double>(crossover);
    cert.constants["tail_mechanism_ok"] = tail_ok ? 1.0 : 0.0;
    cert.pass = pass;
    return cert;
}

OperatorBound enlargement_operator_bound(const FieldConfig& cfg, int q,
                                         const EnlargementParams& p, int K) {
    if (K < 0 || K > 4096)
        throw std::invalid_argument("enlargement_operator_bound: K out of range");
    const C1Result c1 = compute_C1(cfg, q, p);
    const C2Result c2 = compute_C2(cfg, q, p);
    const double C1v = std::exp(c1.log_c1);
    const double C2v = std::exp(c2.log_c2);

    const DiskSpec de = DiskSpec::from_radius(cfg, p.epsilon);
    const DiskSpec dR = DiskSpec::from_radius(cfg, p.R);
    const DiskSpec d2R = DiskSpec::from_radius(cfg, 2.0 * p.R);

    OperatorBound out;
    const int n = K + 1;
    out.lhs_diag.resize(n);
    out.rhs_diag.resize(n);
    std::vector<std::complex<double>> diff(static_cast<size_t>(n) * n,
                                           std::complex<double>(0.0, 0.0));
    for (int k = 0; k < n; ++k) {
        const LandauIndex idx(q, k);
        out.lhs_diag[k] = nu_exact(cfg, idx, de);
        out.rhs_diag[k] =
            C1v * (nu_exact(cfg, idx, dR) - C2v * nu_exact(cfg, idx, d2R));
        diff[static_cast<size_t>(k) * n + k] = out.lhs_diag[k] - out.rhs_diag[k];
    }
    const std::vector<double> evs = hermitian_eigenvalues(std::move(diff), n);
    out.min_eigenvalue = evs.front();
    return out;
}

} // namespace latail
