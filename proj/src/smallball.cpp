#include "latail/smallball.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "latail/errors.hpp"
#include "latail/kernels.hpp"
#include "latail/specfun.hpp"

namespace latail {

GridDistribution GridDistribution::discretize(const CouplingLaw& law, int bins) {
    if (bins < 2) throw std::invalid_argument("GridDistribution: bins < 2");
    GridDistribution g;
    g.grid_step = law.omega_plus / bins;
    g.masses.resize(bins);
    double prev = 0.0;
    for (int i = 0; i < bins; ++i) {
        const double next =
            (i + 1 == bins) ? 1.0 : law.cdf((i + 1) * g.grid_step);
        g.masses[i] = next - prev;
        prev = next;
    }
    g.total = 1.0;
    return g;
}

namespace {

// law masses on bins [i h, (i+1) h) for i <= cap only; the convolution never
// reads beyond the CDF truncation index
std::vector<double> truncated_masses(const CouplingLaw& law, long bins, long cap) {
    const double h = law.omega_plus / static_cast<double>(bins);
    const long keep = std::min(bins, cap + 1);
    std::vector<double> m(static_cast<size_t>(keep));
    double prev = 0.0;
    for (long i = 0; i < keep; ++i) {
        const double next = (i + 1 == bins) ? 1.0 : law.cdf((i + 1) * h);
        m[i] = next - prev;
        prev = next;
    }
    return m;
}

// CDF at t of the n-fold convolution of atoms placed at the left bin edges,
// truncated above index cap (those masses cannot re-enter the CDF at t).
// Returns partial sums for atom-index thresholds cap and cap - n.
struct ConvCdf {
    double at_cap;
    double at_cap_minus_n;
};

ConvCdf convolve_cdf(const std::vector<double>& masses, int n, long cap) {
    const long gbins = static_cast<long>(masses.size());
    const auto& ops = kernels::active();

    std::vector<double> dist(static_cast<size_t>(cap) + 1, 0.0);
    for (long i = 0; i <= cap && i < gbins; ++i) dist[i] = masses[i];

    std::vector<double> next(dist.size());
    for (int fold = 2; fold <= n; ++fold) {
        std::fill(next.begin(), next.end(), 0.0);
        for (long j = 0; j <= cap && j < gbins; ++j) {
            const double m = masses[j];
            if (m == 0.0) continue;
            ops.axpy(m, dist.data(), next.data() + j,
                     static_cast<size_t>(cap - j + 1));
        }
        dist.swap(next);
    }

    ConvCdf out{0.0, 0.0};
    neumaier_sum acc;
    for (long i = 0; i <= cap; ++i) {
        acc.add(dist[i]);
        if (i == cap - n) out.at_cap_minus_n = acc.result();
    }
    out.at_cap = acc.result();
    if (cap - n < 0) out.at_cap_minus_n = 0.0;
    return out;
}

} // namespace

SmallBallResult small_ball_bracket(const CouplingLaw& law, int n_sites, double t,
                                   double rel_target) {
    if (law.omega_minus != 0.0)
        throw std::invalid_argument("small_ball: omega_minus = 0 form only");
    if (n_sites < 1 || n_sites > 64)
        throw std::invalid_argument("small_ball: n_sites must lie in [1, 64]");
    if (!(t > 0.0)) throw std::invalid_argument("small_ball: t must be > 0");

    SmallBallResult res;
    if (t >= n_sites * law.omega_plus) {
        res.bracket = {1.0, 1.0};
        res.converged = true;
        return res;
    }

    // atoms at left edges overestimate the CDF; shifting every variable one
    // step right (n steps total) underestimates it
    long bins = 512;
    const long max_cap = 1L << 26;
    for (;; bins *= 2) {
        const double h = law.omega_plus / static_cast<double>(bins);
        const long cap = static_cast<long>(std::floor(t / h * (1.0 + 1e-12)));
        if (cap > max_cap) break;
        const std::vector<double> masses = truncated_masses(law, bins, cap);
        const ConvCdf cdf = convolve_cdf(masses, n_sites, cap);
        res.bracket = {cdf.at_cap_minus_n, cdf.at_cap};
        res.bins_used = static_cast<int>(std::min<long>(bins, 1L << 30));
        res.achieved_rel = res.bracket.rel_width();
        if (res.achieved_rel <= rel_target) {
            res.converged = true;
            return res;
        }
        // the next level quadruples the fold cost
        if (static_cast<double>(cap) * cap * (n_sites - 1) > 2e10) break;
    }
    res.converged = false;
    return res;
}

double small_ball_exact(const CouplingLaw& law, int n_sites, double t,
                        double rel_target) {
    const SmallBallResult r = small_ball_bracket(law, n_sites, t, rel_target);
    if (!r.converged)
        throw numerical_error("small_ball_exact: bracket did not close (" +
                                  std::to_string(r.bracket.lower) + ", " +
                                  std::to_string(r.bracket.upper) + ")",
                              r.achieved_rel);
    return r.bracket.mid();
}

double log_small_ball_asymptotic(const CouplingLaw& law, int n_sites, double t) {
    if (law.omega_minus != 0.0)
        throw std::invalid_argument("small_ball: omega_minus = 0 form only");
    if (n_sites < 1 || !(t > 0.0))
        throw std::invalid_argument("small_ball_asymptotic: bad arguments");
    const double k = law.kappa;
    const double log_edge = -k * std::log(law.omega_plus); // ln C_kappa
    double lp = n_sites * (log_edge + std::lgamma(k + 1.0)) +
                n_sites * k * std::log(t) - std::lgamma(n_sites * k + 1.0);
    return std::min(lp, 0.0);
}

double small_ball_asymptotic(const CouplingLaw& law, int n_sites, double t) {
    return std::exp(log_small_ball_asymptotic(law, n_sites, t));
}

long lattice_count(double radius) {
    if (radius < 0.0) return 0;
    const long r = static_cast<long>(std::floor(radius));
    const double r2 = radius * radius * (1.0 + 1e-12);
    long n = 0;
    for (long x = -r; x <= r; ++x)
        for (long y = -r; y <= r; ++y)
            if (x * x + y * y <= r2) ++n;
    return n;
}

std::vector<LdRow> ld_exponent_check(const CouplingLaw& law, double eta,
                                     std::span<const double> E_grid,
                                     double c_eta, int oracle_max_sites) {
    if (!(eta > 0.0 && eta < 1.0))
        throw std::invalid_argument("ld_exponent_check: eta must lie in (0,1)");
    std::vector<LdRow> rows;
    for (double E : E_grid) {
        if (!(E > 0.0) || E >= std::exp(-3.0))
            throw std::invalid_argument(
                "ld_exponent_check: E grid must lie in (0, e^-3)");
        LdRow row;
        row.E = E;
        row.log_E = std::log(E);
        const double alog = -row.log_E;
        row.radius = std::pow(alog, 0.5 * (1.0 - eta));
        row.n_sites = lattice_count(row.radius);
        row.t = 2.0 * std::exp(-std::pow(alog, 1.0 - eta) / c_eta);
        row.log_p_asym =
            log_small_ball_asymptotic(law, static_cast<int>(row.n_sites), row.t);
        row.asymptotic_only = row.n_sites > oracle_max_sites;
        if (!row.asymptotic_only) {
            const SmallBallResult r =
                small_ball_bracket(law, static_cast<int>(row.n_sites), row.t);
            if (r.converged)
                row.p_exact = r.bracket;
            else
                row.asymptotic_only = true;
        }
        row.ratio_loglog =
            (row.log_p_asym < 0.0)
                ? std::log(-row.log_p_asym) / std::log(alog)
                : std::numeric_limits<double>::quiet_NaN();
        rows.push_back(row);
    }
    return rows;
}

std::string format_from_log(double ln_value) {
    if (std::isinf(ln_value) && ln_value < 0.0) return "0";
    const double log10v = ln_value / std::log(10.0);
    double e10 = std::floor(log10v);
    double mant = std::pow(10.0, log10v - e10);
    // keep the mantissa in [1, 10)
    if (mant >= 10.0) {
        mant /= 10.0;
        e10 += 1.0;
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6fe%+05d", mant, static_cast<int>(e10));
    return buf;
}

void write_ld_csv(std::ostream& out, const std::vector<LdRow>& rows) {
    out << "E,log_E,radius,n_sites,t,p_exact,p_asym,ratio_loglog\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        return std::string(buf);
    };
    for (const auto& r : rows) {
        out << num(r.E) << ',' << num(r.log_E) << ',' << num(r.radius) << ','
            << r.n_sites << ',' << num(r.t) << ',';
        if (r.p_exact) out << num(r.p_exact->mid());
        out << ',' << format_from_log(r.log_p_asym) << ',' << num(r.ratio_loglog)
            << '\n';
    }
}

} // namespace latail
