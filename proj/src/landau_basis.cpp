#include "latail/landau_basis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "latail/kernels.hpp"
#include "latail/specfun.hpp"

namespace latail {

FieldConfig::FieldConfig(double b_) : b(b_) {
    if (!(b > 0.0)) throw std::invalid_argument("FieldConfig: b must be > 0");
}

LandauIndex::LandauIndex(int q_, int k_) : q(q_), k(k_) {
    if (q < 0 || k < 0) throw std::invalid_argument("LandauIndex: q, k must be >= 0");
}

std::complex<double> eval_eigenfunction(const FieldConfig& cfg, LandauIndex idx,
                                        PlanePoint x) {
    const int q = idx.q, k = idx.k;
    const double r2 = x.x1 * x.x1 + x.x2 * x.x2;
    const double r = std::sqrt(r2);
    const double xi = 0.5 * cfg.b * r2;
    const double theta = (r == 0.0) ? 0.0 : std::atan2(x.x2, x.x1);
    const double log_norm = 0.5 * (log_factorial(q) - log_factorial(k) -
                                   std::log(std::numbers::pi));

    if (k >= q) {
        double log_mag = log_norm + 0.5 * (k - q + 1) * std::log(0.5 * cfg.b) - 0.5 * xi;
        if (k > q) {
            if (r == 0.0) return {0.0, 0.0};
            log_mag += (k - q) * std::log(r);
        }
        const double a = (k - q) * theta;
        const double v = std::exp(log_mag) * laguerre(q, k - q, xi);
        return {v * std::cos(a), v * std::sin(a)};
    }

    if (r == 0.0) return {0.0, 0.0};
    const double log_mag = log_norm + 0.5 * (q - k + 1) * std::log(0.5 * cfg.b) +
                           (q - k) * std::log(r) - 0.5 * xi;
    const double a = -(q - k) * theta;
    const double v = std::exp(log_mag) * laguerre_reduced(q, k, xi);
    return {v * std::cos(a), v * std::sin(a)};
}

std::complex<double> magnetic_translate(
    const FieldConfig& cfg, PlanePoint alpha,
    const std::function<std::complex<double>(PlanePoint)>& f_at, PlanePoint x) {
    const double phase = 0.5 * cfg.b * (x.x1 * alpha.x2 - x.x2 * alpha.x1);
    const std::complex<double> tw(std::cos(phase), std::sin(phase));
    return tw * f_at({x.x1 + alpha.x1, x.x2 + alpha.x2});
}

BasisBatch::BasisBatch(const FieldConfig& cfg, int q, int K, PlanePoint center)
    : b_(cfg.b), q_(q), K_(K), center_(center) {
    if (q < 0 || K < 1) throw std::invalid_argument("BasisBatch: bad q or K");

    const int nk = std::max(0, K_ - q_);
    coeff_.assign(q_ + 1, std::vector<double>(nk, 0.0));
    for (int k = q_; k < K_; ++k) {
        for (int l = 0; l <= q_; ++l) {
            double c = std::exp(log_binomial(k, q_ - l) - log_factorial(l));
            if (l & 1) c = -c;
            coeff_[l][k - q_] = c;
        }
    }

    coeff_low_.resize(std::min(q_, K_));
    for (int k = 0; k < std::min(q_, K_); ++k) {
        coeff_low_[k].resize(k + 1);
        for (int m = 0; m <= k; ++m) {
            const int l = q_ - k + m;
            double c = std::exp(log_binomial(k, k - m) - log_factorial(l));
            if (l & 1) c = -c;
            coeff_low_[k][m] = c;
        }
    }

    step_.resize(nk);
    for (int k = q_; k < K_; ++k)
        step_[k - q_] = std::sqrt(0.5 * b_ / (k + 1));
    low_step_.resize(q_);
    for (int k = 0; k < q_; ++k) low_step_[k] = std::sqrt(0.5 * (k + 1) * b_);
}

void BasisBatch::eval(PlanePoint x, double* re, double* im) const {
    const double dx = x.x1 - center_.x1;
    const double dy = x.x2 - center_.x2;
    const double r2 = dx * dx + dy * dy;
    const double r = std::sqrt(r2);
    const double xi = 0.5 * b_ * r2;
    const double ct = (r == 0.0) ? 1.0 : dx / r;
    const double st = (r == 0.0) ? 0.0 : dy / r;
    const double base_q =
        std::sqrt(b_ / (2.0 * std::numbers::pi)) * std::exp(-0.5 * xi);

    const int nk = std::max(0, K_ - q_);
    if (nk > 0) {
        thread_local std::vector<double> lag;
        lag.assign(nk, 0.0);
        const auto& ops = kernels::active();
        double xp = 1.0;
        for (int l = 0; l <= q_; ++l) {
            ops.axpy(xp, coeff_[l].data(), lag.data(), nk);
            xp *= xi;
        }
        // magnitude and phase recurrences along k
        double mag = base_q;
        double cro = 1.0, sro = 0.0;
        for (int k = q_; k < K_; ++k) {
            const double v = mag * lag[k - q_];
            re[k] = v * cro;
            im[k] = v * sro;
            mag *= r * step_[k - q_];
            const double c2 = cro * ct - sro * st;
            sro = cro * st + sro * ct;
            cro = c2;
        }
    }

    // k < q rows, phase e^{-i(q-k)theta}
    double mag = base_q;
    double cro = 1.0, sro = 0.0;
    for (int k = q_ - 1; k >= 0; --k) {
        mag *= r * low_step_[k];
        const double c2 = cro * ct + sro * st;
        sro = sro * ct - cro * st;
        cro = c2;
        if (k >= K_) continue;
        double p = 0.0;
        for (int m = k; m >= 0; --m) p = p * xi + coeff_low_[k][m];
        const double v = mag * p;
        re[k] = v * cro;
        im[k] = v * sro;
    }
}

} // namespace latail
