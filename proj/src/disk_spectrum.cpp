#include "latail/disk_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "latail/errors.hpp"
#include "latail/quadrature.hpp"
#include "latail/specfun.hpp"

namespace latail {

DiskSpec DiskSpec::from_radius(const FieldConfig& cfg, double R) {
    if (!(R > 0.0)) throw std::invalid_argument("DiskSpec: R must be > 0");
    return DiskSpec{R, 0.5 * cfg.b * R * R};
}

namespace {

constexpr double kCancellationDigitBudget = 18.0;

double cq_cached(int q) {
    static std::map<int, double> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(q);
    if (it == cache.end())
        it = cache.emplace(q, falling_factorial_constant(q)).first;
    return it->second;
}

// log-domain quadrature of (q!/k!) int_0^rho xi^{k-q} [L_q^{(k-q)}]^2 e^{-xi} dxi,
// valid for k >= q (the only regime where the monomial sum can cancel badly).
double log_nu_quadrature(int q, long k, double rho) {
    auto g = [&](double xi) {
        const double lag = laguerre(q, static_cast<int>(k) - q, xi);
        if (lag == 0.0) return -std::numeric_limits<double>::infinity();
        const double pw = (k == q) ? 0.0 : (k - q) * std::log(xi);
        return pw - xi + 2.0 * std::log(std::fabs(lag));
    };
    auto r = quadrature::log_adaptive(g, 0.0, rho, 1e-11);
    if (!r.converged)
        throw numerical_error("nu_exact: log-domain quadrature did not converge",
                              r.rel_error);
    return log_factorial(q) - log_factorial(k) + r.log_value;
}

// ln nu_{q,k}(rho) via the double monomial sum; cancellation reported.
double log_nu_monomial(int q, long k, double rho, double* digits) {
    const int l0 = std::max(0, q - static_cast<int>(k));
    std::vector<double> la;
    std::vector<int> sg;
    const double base = log_factorial(q) - log_factorial(k);
    // gamma(k - q + l + m + 1, rho) depends on l + m only
    std::vector<double> lg(2 * q + 1, 0.0);
    for (int s = 2 * l0; s <= 2 * q; ++s)
        lg[s > 0 ? s : 0] = log_lower_gamma(k - q + s + 1, rho);
    for (int l = l0; l <= q; ++l)
        for (int m = l0; m <= q; ++m) {
            la.push_back(base + log_binomial(k, q - l) + log_binomial(k, q - m) -
                         log_factorial(l) - log_factorial(m) + lg[l + m]);
            sg.push_back(((l + m) & 1) ? -1 : +1);
        }
    const LogValue v = log_sum_signed(la, sg, digits);
    if (v.sign <= 0) {
        *digits = std::numeric_limits<double>::infinity();
        return -std::numeric_limits<double>::infinity();
    }
    return v.log_abs;
}

double log_nu(int q, long k, double rho) {
    if (q < 0 || k < 0) throw std::domain_error("nu: q, k must be >= 0");
    if (!(rho >= 0.0)) throw std::domain_error("nu: rho must be >= 0");
    if (rho == 0.0) return -std::numeric_limits<double>::infinity();
    if (q == 0) return log_reg_lower_gamma(k + 1.0, rho);

    double digits = 0.0;
    const double v = log_nu_monomial(q, k, rho, &digits);
    if (digits <= kCancellationDigitBudget) return v;
    if (k >= q) return log_nu_quadrature(q, k, rho);
    throw numerical_error("nu_exact: cancellation beyond budget and no "
                          "quadrature fallback for k < q",
                          digits);
}

double log_nu0(int q, long k, double rho) {
    if (!(static_cast<double>(k) > rho))
        throw std::domain_error("nu_asymptotic: requires k > rho");
    if (!(rho > 0.0)) throw std::domain_error("nu_asymptotic: rho must be > 0");
    return -rho + (k - q + 1) * std::log(rho) +
           (2 * q - 1) * std::log(k - rho) - log_factorial(q) - log_factorial(k);
}

} // namespace

double mu_radial(const FieldConfig& cfg, LandauIndex idx,
                 const std::function<double(double)>& V_of_r, double rel_tol) {
    const int q = idx.q;
    const long k = idx.k;
    const double pref = std::exp(log_factorial(q) - log_factorial(k));
    // weight mass beyond xi_cut is below 1e-30 of the total
    const double xi_cut = k + q + 12.0 * std::sqrt(static_cast<double>(k + q + 1)) + 80.0;

    auto f = [&](double xi) {
        const double r = std::sqrt(2.0 * xi / cfg.b);
        double poly2, pw;
        if (k >= q) {
            const double lag = laguerre(q, static_cast<int>(k) - q, xi);
            poly2 = lag * lag;
            pw = (k == q) ? 1.0 : std::pow(xi, static_cast<double>(k - q));
        } else {
            // xi^{k-q} [L]^2 = xi^{q-k} P^2, regular at the origin
            const double p = laguerre_reduced(q, static_cast<int>(k), xi);
            poly2 = p * p;
            pw = std::pow(xi, static_cast<double>(q - k));
        }
        return V_of_r(r) * pw * poly2 * std::exp(-xi);
    };
    // the weight peaks near xi ~ k; split there so the adaptive pass sees it
    const double mid = std::min(static_cast<double>(std::max<long>(k, 1)), xi_cut);
    auto r1 = quadrature::adaptive(f, 0.0, mid, rel_tol * 0.5);
    auto r2 = quadrature::adaptive(f, mid, xi_cut, rel_tol * 0.5);
    if (!r1.converged || !r2.converged) {
        const double tot = std::fabs(r1.value) + std::fabs(r2.value);
        const double achieved =
            tot > 0.0 ? (r1.abs_error + r2.abs_error) / tot : 1.0;
        throw numerical_error("mu_radial: quadrature did not converge", achieved);
    }
    return pref * (r1.value + r2.value);
}

double log_nu_exact(const FieldConfig&, LandauIndex idx, const DiskSpec& disk) {
    return log_nu(idx.q, idx.k, disk.rho);
}

double nu_exact(const FieldConfig& cfg, LandauIndex idx, const DiskSpec& disk) {
    return std::exp(log_nu_exact(cfg, idx, disk));
}

double log_nu_asymptotic(const FieldConfig&, LandauIndex idx, const DiskSpec& disk) {
    return log_nu0(idx.q, idx.k, disk.rho);
}

double nu_asymptotic(const FieldConfig& cfg, LandauIndex idx, const DiskSpec& disk) {
    return std::exp(log_nu_asymptotic(cfg, idx, disk));
}

DiskEigenvalue decompose(const FieldConfig&, LandauIndex idx,
                         const DiskSpec& disk) {
    const int q = idx.q;
    const long k = idx.k;
    if (q < 1)
        throw std::domain_error("decompose: q = 0 is handled by the incomplete "
                                "gamma route, not the V/R split");
    if (k < q) throw std::domain_error("decompose: requires k >= q");
    const double rho = disk.rho;

    DiskEigenvalue out;
    const double lnu = log_nu(q, k, rho);
    out.nu_exact = std::exp(lnu);

    // V(k,q) = (1/(k! q!)) int_0^rho e^-xi xi^{k-q} (k - xi)^{2q} dxi via the
    // binomial expansion of (k - xi)^{2q}
    const double base = -log_factorial(k) - log_factorial(q);
    {
        std::vector<double> la;
        std::vector<int> sg;
        for (int j = 0; j <= 2 * q; ++j) {
            la.push_back(base + log_binomial(2 * q, j) +
                         (2 * q - j) * std::log(static_cast<double>(k)) +
                         log_lower_gamma(k - q + j + 1, rho));
            sg.push_back((j & 1) ? -1 : +1);
        }
        double digits = 0.0;
        LogValue v = log_sum_signed(la, sg, &digits);
        if (digits > kCancellationDigitBudget) {
            auto g = [&](double xi) {
                return (k == q ? 0.0 : (k - q) * std::log(xi)) - xi +
                       2.0 * q * std::log(std::fabs(static_cast<double>(k) - xi));
            };
            auto r = quadrature::log_adaptive(g, 0.0, rho, 1e-11);
            if (!r.converged)
                throw numerical_error("decompose: V quadrature did not converge",
                                      r.rel_error);
            v = LogValue::from_log(base + r.log_value, +1);
        }
        out.main_term = v.value();
        // remainder through expm1 keeps accuracy when V ~ nu
        out.remainder = (v.sign > 0)
                            ? -std::exp(lnu) * std::expm1(v.log_abs - lnu)
                            : std::exp(lnu);
    }

    // I(k, rho) = int_0^1 e^{rho t} (1-t)^{k-q} (1 + rho t/(k-rho))^{2q} dt
    if (static_cast<double>(k) > rho) {
        auto g = [&](double t) {
            return rho * t + (k - q) * std::log1p(-t) +
                   2.0 * q * std::log1p(rho * t / (k - rho));
        };
        auto r = quadrature::log_adaptive(g, 0.0, 1.0, 1e-11);
        if (!r.converged)
            throw numerical_error("decompose: I(k,rho) quadrature did not converge",
                                  r.rel_error);
        out.i_factor = std::exp(r.log_value);
    } else {
        out.i_factor = std::numeric_limits<double>::quiet_NaN();
    }

    // |R| bound with the fitted C_q; all terms positive
    out.cq_used = cq_cached(q);
    {
        std::vector<double> la;
        std::vector<int> sg;
        for (int j = 0; j <= 2 * q; ++j) {
            la.push_back(base + log_binomial(2 * q, j) +
                         (2 * q - j) * std::log(static_cast<double>(k)) +
                         log_lower_gamma(k - q + j + 1, rho));
            sg.push_back(+1);
        }
        const LogValue s = log_sum_signed(la, sg);
        out.remainder_bound =
            out.cq_used / static_cast<double>(k) * std::exp(s.log_abs);
    }
    out.bound_ok = std::fabs(out.remainder) <= out.remainder_bound;

    out.nu_asym = (static_cast<double>(k) > rho && rho > 0.0)
                      ? std::exp(log_nu0(q, k, rho))
                      : std::numeric_limits<double>::quiet_NaN();
    return out;
}

Certificate verify_f1(const FieldConfig& cfg, int q, const AsymWindow& window,
                      const std::vector<long>& k_range, const RhoRule& rho_rule) {
    if (!(window.beta > 0.0 && window.beta < 2.0))
        throw std::invalid_argument("verify_f1: beta must lie in (0, 2)");
    if (k_range.empty()) throw std::invalid_argument("verify_f1: empty k range");

    Certificate cert;
    cert.lemma_id = "f1";
    cert.params["q"] = q;
    cert.params["beta"] = window.beta;
    cert.string_params["f"] = window.descriptor;
    cert.precision_note =
        "ratio deviations via log-domain eigenvalues; pass requires one fitted "
        "C to dominate all rows and the per-k worst deviation to decrease";

    double fitted_c = 0.0;
    std::vector<double> worst_per_k;
    for (long k : k_range) {
        const double fk = window.f(static_cast<double>(k));
        if (!(fk >= 1.0))
            throw std::invalid_argument("verify_f1: f(k) must be >= 1");
        const double rho_max = static_cast<double>(k) - fk;
        if (!(rho_max >= rho_rule.rho_min))
            throw std::invalid_argument("verify_f1: k - f(k) below the rho grid start");
        const double bound =
            std::pow(static_cast<double>(k), 2.0 * q - 1.0) / std::pow(fk, 2.0 * q) +
            static_cast<double>(k) / std::pow(fk, window.beta + 1.0);

        double worst = 0.0;
        const double ratio_step =
            std::pow(rho_max / rho_rule.rho_min, 1.0 / (rho_rule.points - 1));
        double rho = rho_rule.rho_min;
        for (int i = 0; i < rho_rule.points; ++i, rho *= ratio_step) {
            const double r = std::min(rho, rho_max);
            const double lnu = log_nu(q, k, r);
            const double lnu0 = log_nu0(q, k, r);
            const double dev = std::fabs(std::expm1(lnu - lnu0));
            worst = std::max(worst, dev);
            cert.rows.push_back({{"k", static_cast<double>(k)},
                                 {"rho", r},
                                 {"ratio_dev", dev},
                                 {"bound", bound}});
            fitted_c = std::max(fitted_c, dev / bound);
        }
        worst_per_k.push_back(worst);
    }
    cert.constants["fitted_C"] = fitted_c;

    bool decreasing = true;
    for (size_t i = 1; i < worst_per_k.size(); ++i)
        if (!(worst_per_k[i] < worst_per_k[i - 1])) decreasing = false;
    cert.pass = decreasing && std::isfinite(fitted_c);
    (void)cfg;
    return cert;
}

} // namespace latail
