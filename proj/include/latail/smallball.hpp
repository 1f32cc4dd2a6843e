#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "latail/alloy.hpp"

namespace latail {

/// Discretization of a coupling law on a uniform value grid; the two mass
/// placements (left edge / right edge of each bin) give stochastic upper and
/// lower CDF bounds that survive convolution.
struct GridDistribution {
    double grid_step = 0.0;
    std::vector<double> masses; // mass of bin [i h, (i+1) h), indices 0..G-1
    double total = 0.0;

    static GridDistribution discretize(const CouplingLaw& law, int bins);
};

struct Bracket {
    double lower = 0.0;
    double upper = 0.0;
    double mid() const { return 0.5 * (lower + upper); }
    double rel_width() const {
        const double m = mid();
        return m > 0.0 ? (upper - lower) / m : (upper - lower);
    }
};

struct SmallBallResult {
    Bracket bracket;
    bool converged = false;
    double achieved_rel = 0.0;
    int bins_used = 0;
};

/// P(sum_{i<=n} omega_i <= t) by n-fold self-convolution of the discretized
/// law; the grid is refined until the upper/lower bracket closes to the
/// requested relative width.
SmallBallResult small_ball_bracket(const CouplingLaw& law, int n_sites, double t,
                                   double rel_target = 1e-3);

/// Bracket midpoint; throws numerical_error (carrying the achieved width) when
/// the bracket fails to close.
double small_ball_exact(const CouplingLaw& law, int n_sites, double t,
                        double rel_target = 1e-3);

/// Power-law small-deviation form (omega_+^{-kappa} Gamma(kappa+1))^n
/// t^{n kappa} / Gamma(n kappa + 1).
double small_ball_asymptotic(const CouplingLaw& law, int n_sites, double t);
double log_small_ball_asymptotic(const CouplingLaw& law, int n_sites, double t);

/// #{beta in Z^2 : |beta| <= radius}, Euclidean norm.
long lattice_count(double radius);

struct LdRow {
    double E = 0.0;
    double log_E = 0.0;  // ln E
    double radius = 0.0; // |log E|^{(1-eta)/2}
    long n_sites = 0;
    double t = 0.0;
    std::optional<Bracket> p_exact; // only within oracle scale
    double log_p_asym = 0.0;        // ln of the asymptotic probability
    double ratio_loglog = 0.0;      // ln|ln p| / ln|ln E|
    bool asymptotic_only = false;
};

/// Measured-exponent table for the deviation chain: per energy, the lattice
/// count at radius |log E|^{(1-eta)/2}, the threshold t(E), exact and
/// asymptotic probabilities, and the log-log ratio.  Reporting only.
std::vector<LdRow> ld_exponent_check(const CouplingLaw& law, double eta,
                                     std::span<const double> E_grid,
                                     double c_eta = 10.0,
                                     int oracle_max_sites = 64);

/// CSV: E,log_E,radius,n_sites,t,p_exact,p_asym,ratio_loglog (p_exact blank on
/// asymptotic-only rows; p_asym rendered from its log so deep-tail values
/// survive the double range).
void write_ld_csv(std::ostream& out, const std::vector<LdRow>& rows);

/// "m.mmmmmme-XXXX" from a natural log, usable far outside double range;
/// "0" for -inf.
std::string format_from_log(double ln_value);

} // namespace latail
