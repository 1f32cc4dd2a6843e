#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "latail/landau_basis.hpp"

namespace latail {

enum class SiteKind { gaussian, indicator_plus_gaussian_tail, tabulated_radial };

/// Single-site potential profile.  Construction validates the hypothesis
///   (1/C) 1_{D(x0, 1/C)} <= u <= C e^{-|x|^2/C}
/// on a test grid and stores the certified C.
struct SingleSite {
    SiteKind kind = SiteKind::gaussian;
    double amplitude = 1.0; // C_u
    PlanePoint x0{0.0, 0.0};
    double width = 1.0;
    std::vector<std::pair<double, double>> table; // (r, u) knots, tabulated kind
    double h1_constant = 0.0;                     // validated C
    double support_cut = 0.0;                     // contributions ignored beyond this radius

    double radial(double r) const; // profile about x0
    double eval(PlanePoint x) const;

    static SingleSite make_gaussian(double amplitude, double width,
                                    PlanePoint x0 = {0.0, 0.0});
    static SingleSite make_indicator_tail(double amplitude, double width,
                                          PlanePoint x0 = {0.0, 0.0});
    static SingleSite make_tabulated(std::vector<std::pair<double, double>> knots,
                                     PlanePoint x0 = {0.0, 0.0});
};

/// i.i.d. coupling law on [omega_minus, omega_plus] with omega_- omega_+ = 0
/// and P(|omega| <= E) ~ (E/omega_edge)^kappa at the nonzero edge, realized by
/// inverse transform omega = omega_+ U^{1/kappa} (or the mirrored form).
struct CouplingLaw {
    double kappa = 1.0;
    double omega_minus = 0.0;
    double omega_plus = 1.0;
    std::uint64_t sampler_seed = 0;

    static CouplingLaw make(double kappa, double omega_minus, double omega_plus,
                            std::uint64_t seed);
    double sample(std::uint64_t stream, long gx, long gy) const;
    double cdf(double x) const; // P(omega <= x), omega_minus = 0 case
};

struct BoxConfig {
    double a = 0.0; // lattice period with b a^2 / (2 pi) integral
    int n = 0;
    double L = 0.0; // (2n+1) a / 2
    long flux_quanta_per_cell = 0;

    static BoxConfig make(const FieldConfig& cfg, double a, int n);
};

struct SiteCoupling {
    long gx;
    long gy;
    double omega;
};

struct AlloySample {
    BoxConfig box;
    CouplingLaw law;
    std::vector<SiteCoupling> couplings; // all gamma in Lambda_{2L} cap Z^2, row-major order

    static AlloySample draw(const BoxConfig& box, const CouplingLaw& law,
                            std::uint64_t stream);
    static AlloySample constant(const BoxConfig& box, const CouplingLaw& law,
                                double omega);
};

struct BandInterval {
    int q;
    double lo, hi;  // [2bq + M-, 2bq + M+]
    double edge;    // the Landau level 2bq
    bool lower_edge; // true when omega_- = 0 (E_q^- = 2bq)
};

/// Band layout from the essential bounds M+- of V_omega; throws when the
/// separation hypothesis M+ - M- < 2b fails (message carries both numbers).
std::vector<BandInterval> band_layout(const FieldConfig& cfg, const SingleSite& site,
                                      const CouplingLaw& law, int q_max);

/// max_x W(x), W(x) = sum_gamma u(x - gamma) on the unit cell (fine grid).
double periodic_single_site_max(const SingleSite& site);

/// The 2L Z^2-periodic alloy potential at x: fold x into Lambda_{2L}, then sum
/// the in-box site contributions over their 2L Z^2 images within the tail
/// cutoff.
double periodic_potential(const AlloySample& sample, const SingleSite& site,
                          PlanePoint x);

struct Minorant {
    double epsilon; // disk radius about gamma + x0
    double weight;  // certified lower bound of u on that disk
};

/// Largest grid-certified epsilon <= min(1/C, 0.49) with
/// u >= (1/C) 1_{D(x0, epsilon)}; weight is the certified disk minimum.
Minorant minorant_couplings(const AlloySample& sample, const SingleSite& site);

struct Truncation {
    PlanePoint center{0.0, 0.0};
    int K = 0;
};

struct AssembledOperator {
    int K = 0;
    std::vector<std::complex<double>> matrix; // row-major K x K, Hermitian
    double hermiticity_defect = 0.0;
    double quad_panel = 0.5;
    int quad_order = 8;
    double domain_halfwidth = 0.0;
    double box_side = 0.0; // 2L
};

/// M_{kj} = <V_per phi^c_{q,k}, phi^c_{q,j}> over the truncated basis; tensor
/// Gauss-Legendre panels, Hermitian by construction of the rank-1 node
/// updates.
AssembledOperator assemble_projected(const FieldConfig& cfg, int q,
                                     const AlloySample& sample,
                                     const SingleSite& site, Truncation trunc);

/// Same quadrature applied to the minorant sum_gamma omega_gamma w 1_{D(gamma+x0,eps)},
/// each disk integrated on its own polar grid.
AssembledOperator assemble_minorant(const FieldConfig& cfg, int q,
                                    const AlloySample& sample,
                                    const SingleSite& site, Truncation trunc);

/// Default truncation: flux count b (2L)^2 / (2 pi) plus 25% margin.
int default_truncation_K(const FieldConfig& cfg, const BoxConfig& box);

/// Finite-truncation stand-in for the IDS of the projected operator:
/// #(eigenvalues <= E) / (2L)^2.
double counting_proxy(const AssembledOperator& op, double E, const BoxConfig& box);
double counting_proxy(const std::vector<double>& eigenvalues, double E,
                      const BoxConfig& box);

/// Binary matrix dump: 8 x 64-bit header (magic, K, b, q, L, seed, checksum,
/// reserved), then K*K little-endian complex doubles, row-major.
void write_matrix_file(const std::string& path, const AssembledOperator& op,
                       const FieldConfig& cfg, int q, double L,
                       std::uint64_t seed);
AssembledOperator read_matrix_file(const std::string& path);

} // namespace latail
