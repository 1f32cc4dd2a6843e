#include "latail/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "latail/errors.hpp"

namespace latail {

double log_factorial(long n) {
    if (n < 0) throw std::domain_error("log_factorial: n < 0");
    if (n < 2) return 0.0;
    return std::lgamma(static_cast<double>(n) + 1.0);
}

double log_binomial(long k, long j) {
    if (k < 0 || j < 0) throw std::domain_error("log_binomial: negative argument");
    if (j > k) return -std::numeric_limits<double>::infinity();
    return log_factorial(k) - log_factorial(j) - log_factorial(k - j);
}

double laguerre(int q, int alpha, double xi) {
    if (q < 0) throw std::domain_error("laguerre: q < 0");
    if (alpha < -q) throw std::domain_error("laguerre: alpha < -q (binomial undefined)");
    if (xi < 0.0) throw std::domain_error("laguerre: xi < 0");

    const long k = static_cast<long>(q) + alpha; // >= 0
    const int l0 = std::max(0, q - static_cast<int>(k));

    // term_l = C(k, q-l) (-xi)^l / l!, advanced by the exact ratio
    // term_{l+1}/term_l = -(q-l)/(k-q+l+1) * xi/(l+1).
    double term;
    if (l0 == 0) {
        term = std::exp(log_binomial(k, q));
    } else {
        // k < q: leading term C(k, k) (-xi)^{q-k} / (q-k)!
        term = std::exp(l0 * std::log(xi) - log_factorial(l0));
        if (xi == 0.0) term = 0.0;
        if (l0 & 1) term = -term;
    }

    neumaier_sum acc;
    acc.add(term);
    for (int l = l0; l < q; ++l) {
        term *= -static_cast<double>(q - l) /
                static_cast<double>(k - q + l + 1) * xi / (l + 1);
        acc.add(term);
    }
    return acc.result();
}

double laguerre_reduced(int q, int k, double xi) {
    if (k < 0 || q <= k) throw std::domain_error("laguerre_reduced: requires 0 <= k < q");
    if (xi < 0.0) throw std::domain_error("laguerre_reduced: xi < 0");
    // P_{q,k}(xi) = sum_{m=0}^{k} (-1)^{q-k+m} C(k, k-m) xi^m / (q-k+m)!
    double term = std::exp(-log_factorial(q - k));
    if ((q - k) & 1) term = -term;
    neumaier_sum acc;
    acc.add(term);
    for (int m = 0; m < k; ++m) {
        term *= -static_cast<double>(k - m) / static_cast<double>(m + 1) * xi /
                (q - k + m + 1);
        acc.add(term);
    }
    return acc.result();
}

namespace {

// ln(x^a e^-x / Gamma(a)) computed in extended precision: for a ~ 1e4 the
// double-rounded exponent alone would cost ~1e-11 of relative accuracy.
long double log_prefactor(double a, double x) {
    const long double al = a;
    const long double xl = x;
    return al * std::log(xl) - xl - std::lgamma(al);
}

// P(a,x) series branch, x < a+1: P = pref * sum_{n>=0} x^n / (a (a+1) ... (a+n)).
// Returns ln P. All series terms positive, no cancellation.
long double log_p_series(double a, double x) {
    long double term = 1.0L / a;
    long double sum = term;
    for (int n = 1; n < 100000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (term < sum * 1e-19L) break;
    }
    return log_prefactor(a, x) + std::log(sum);
}

// Q(a,x) continued fraction (modified Lentz), x >= a+1. Returns ln Q.
long double log_q_cf(double a, double x) {
    const long double tiny = 1e-300L;
    long double b = x + 1.0L - a;
    long double c = 1.0L / tiny;
    long double d = 1.0L / b;
    long double h = d;
    for (int i = 1; i <= 100000; ++i) {
        long double an = -static_cast<long double>(i) * (i - a);
        b += 2.0L;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0L / d;
        long double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0L) < 1e-19L)
            return log_prefactor(a, x) + std::log(h);
    }
    throw numerical_error("incomplete gamma continued fraction did not converge", 0.0);
}

} // namespace

double reg_lower_gamma(double a, double x) {
    if (!(a > 0.0)) throw std::domain_error("reg_lower_gamma: a <= 0");
    if (!(x >= 0.0)) throw std::domain_error("reg_lower_gamma: x < 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) {
        return static_cast<double>(std::exp(log_p_series(a, x)));
    }
    const long double q = std::exp(log_q_cf(a, x));
    return static_cast<double>(1.0L - q);
}

double reg_upper_gamma(double a, double x) {
    if (!(a > 0.0)) throw std::domain_error("reg_upper_gamma: a <= 0");
    if (!(x >= 0.0)) throw std::domain_error("reg_upper_gamma: x < 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) {
        return static_cast<double>(1.0L - std::exp(log_p_series(a, x)));
    }
    return static_cast<double>(std::exp(log_q_cf(a, x)));
}

double log_reg_lower_gamma(double a, double x) {
    if (!(a > 0.0)) throw std::domain_error("log_reg_lower_gamma: a <= 0");
    if (!(x >= 0.0)) throw std::domain_error("log_reg_lower_gamma: x < 0");
    if (x == 0.0) return -std::numeric_limits<double>::infinity();
    if (x < a + 1.0) {
        return static_cast<double>(log_p_series(a, x));
    }
    // In the CF region Q stays away from 1, so 1-Q does not cancel.
    const long double q = std::exp(log_q_cf(a, x));
    return static_cast<double>(std::log1p(-q));
}

double log_lower_gamma(double a, double x) {
    return log_reg_lower_gamma(a, x) +
           static_cast<double>(std::lgamma(static_cast<long double>(a)));
}

LogValue log_sum_signed(std::span<const double> log_abs,
                        std::span<const int> signs,
                        double* cancellation_digits) {
    if (log_abs.size() != signs.size())
        throw std::invalid_argument("log_sum_signed: size mismatch");

    double m = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < log_abs.size(); ++i)
        if (signs[i] != 0 && log_abs[i] > m) m = log_abs[i];

    if (std::isinf(m)) {
        if (cancellation_digits) *cancellation_digits = 0.0;
        return LogValue::zero();
    }

    neumaier_sum acc, abs_acc;
    for (size_t i = 0; i < log_abs.size(); ++i) {
        if (signs[i] == 0) continue;
        const double t = std::exp(log_abs[i] - m);
        acc.add(signs[i] > 0 ? t : -t);
        abs_acc.add(t);
    }
    const double s = acc.result();
    if (cancellation_digits) {
        *cancellation_digits = (s == 0.0)
            ? std::numeric_limits<double>::infinity()
            : std::log10(abs_acc.result() / std::fabs(s));
    }
    if (s == 0.0) return LogValue::zero();
    return LogValue::from_log(m + std::log(std::fabs(s)), s > 0.0 ? +1 : -1);
}

double falling_factorial_constant(int q, long k_lo, long k_hi) {
    if (q < 0) throw std::domain_error("falling_factorial_constant: q < 0");
    if (q == 0) return 0.0;
    double cq = 0.0;
    double k = static_cast<double>(k_lo);
    const double step = std::pow(static_cast<double>(k_hi) / k_lo, 1.0 / 48.0);
    std::vector<long> ks;
    while (k <= static_cast<double>(k_hi) * (1.0 + 1e-12)) {
        ks.push_back(std::lround(k));
        k *= step;
    }
    for (long kk : ks) {
        for (int s = 0; s <= q; ++s) {
            // evaluated through the same log route the constant certifies, so
            // the fit also absorbs that route's rounding floor
            const double r =
                std::exp(log_binomial(kk, q - s) + log_factorial(q - s) +
                         (s - q) * std::log(static_cast<double>(kk)));
            cq = std::max(cq, kk * std::fabs(r - 1.0));
        }
    }
    return cq;
}

} // namespace latail
