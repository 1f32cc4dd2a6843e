#pragma once

#include <cmath>
#include <cstdlib>
#include <limits>
#include <span>

namespace latail {

/// A signed quantity stored as (log of magnitude, sign).  sign == 0 encodes an
/// exact zero, in which case log_abs is ignored.
struct LogValue {
    double log_abs = -std::numeric_limits<double>::infinity();
    int sign = 0;

    static LogValue zero() { return {}; }

    static LogValue from_log(double log_abs, int sign = +1) {
        LogValue v;
        v.log_abs = log_abs;
        v.sign = sign;
        return v;
    }

    static LogValue from_value(double x) {
        LogValue v;
        if (x == 0.0) return v;
        v.sign = x > 0.0 ? +1 : -1;
        v.log_abs = std::log(std::fabs(x));
        return v;
    }

    bool is_zero() const { return sign == 0; }

    // May under/overflow for extreme magnitudes; callers working in the deep
    // tail should stay in log form.
    double value() const {
        if (sign == 0) return 0.0;
        return sign * std::exp(log_abs);
    }

    LogValue& operator*=(const LogValue& o) {
        sign *= o.sign;
        log_abs = (sign == 0) ? -std::numeric_limits<double>::infinity()
                              : log_abs + o.log_abs;
        return *this;
    }
    friend LogValue operator*(LogValue a, const LogValue& b) { return a *= b; }
};

// Neumaier compensated accumulator.
struct neumaier_sum {
    double s = 0.0;
    double c = 0.0;
    void add(double x) {
        double t = s + x;
        if (std::fabs(s) >= std::fabs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    double result() const { return s + c; }
};

/// ln(n!).  Relative error a few ulp; valid for any n >= 0 that fits a long.
double log_factorial(long n);

/// ln C(k, j).  Returns -inf for j > k (empty binomial).
double log_binomial(long k, long j);

/// Generalized Laguerre polynomial L_q^{(alpha)}(xi) with alpha = k - q,
/// k = q + alpha >= 0, evaluated by the explicit binomial sum
///   sum_{l=max(0,q-k)}^{q} C(k, q-l) (-xi)^l / l!
/// with compensated summation.  Rejects alpha < -q.
double laguerre(int q, int alpha, double xi);

/// For k < q the sum above factors as L_q^{(k-q)}(xi) = xi^{q-k} P_{q,k}(xi);
/// returns the reduced polynomial P_{q,k}(xi), finite at xi = 0.
double laguerre_reduced(int q, int k, double xi);

/// Regularized lower incomplete gamma P(a, x) = gamma(a,x)/Gamma(a).
/// Power series for x < a + 1, Lentz continued fraction otherwise.
double reg_lower_gamma(double a, double x);

/// ln P(a, x); finite (not just 0/underflow) even when P is far below the
/// double range, e.g. P(400, 0.1).
double log_reg_lower_gamma(double a, double x);

/// ln of the unnormalized lower incomplete gamma(a, x).
double log_lower_gamma(double a, double x);

/// Regularized upper incomplete Q(a, x) = 1 - P(a, x).
double reg_upper_gamma(double a, double x);

/// Signed log-domain sum of s_i * exp(L_i).  If cancellation_digits is given,
/// receives log10(sum |terms|) - log10(|result|), the digits lost to
/// cancellation (0 when nothing cancels, +inf when the result is zero).
LogValue log_sum_signed(std::span<const double> log_abs,
                        std::span<const int> signs,
                        double* cancellation_digits = nullptr);

/// Empirical constant C_q of the falling-factorial ratio: the max over a
/// geometric k-grid in [k_lo, k_hi] of  k * max_{s<=q} |k^{s-q} C(k,q-s) (q-s)! - 1|.
/// Tends to C(q,2) as k grows.
double falling_factorial_constant(int q, long k_lo = 100, long k_hi = 100000);

} // namespace latail
