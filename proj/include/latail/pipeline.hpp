#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "latail/alloy.hpp"
#include "latail/certificate.hpp"
#include "latail/landau_basis.hpp"

namespace latail {

struct ExperimentConfig {
    FieldConfig field{1.0};
    int q = 0;
    SingleSite site;
    CouplingLaw law;
    BoxConfig box;
    double eta = 0.5;
    std::vector<double> E_grid; // strictly decreasing, inside the gap regime
    int n_samples = 8;
    std::uint64_t seed = 0;
    double nu_exponent = 0.3; // L ~ E^{-nu} coupling rule
    double c_eta = 10.0;      // C_eta of the deviation chain
    double bound_constant = 1.0;

    /// Flat key=value text; nested fields use dotted keys (field.b, site.kind,
    /// law.kappa, box.a, ...).  Unknown keys are rejected.
    static ExperimentConfig parse(std::istream& in);
    static ExperimentConfig parse_file(const std::string& path);

    int truncation_K() const; // flux-count based default
    std::string manifest_json() const;
};

struct IdsEstimate {
    double E = 0.0;
    double N_hat = 0.0;
    double stderr_ = 0.0;
    int n_samples = 0;
    double L_used = 0.0;
};

struct IdsRow {
    IdsEstimate at_E;
    double N_half = 0.0, N_twice = 0.0;      // estimates at E/2 and 2E
    double stderr_half = 0.0, stderr_twice = 0.0;
    bool capped = false;                     // L rule hit the box cap
    int n_box_used = 0;
    int dropped = 0;
    bool failed = false;                     // > 25% sample drops
};

struct IdsResult {
    std::vector<IdsRow> rows;
    std::string csv;
    std::string manifest;
};

/// Monte Carlo estimate of E(rho_{q,L,omega}(E)) on the energy grid; samples
/// are independent work units, aggregated in sample-index order, so the output
/// bytes do not depend on the worker count.
IdsResult ids_estimate(const ExperimentConfig& cfg, int workers = 0);

/// Per-sample operator bound certificate at energy E: checks
/// e^{|log E|^{1-eta} log|log E|} lambda_min >= inf_gamma sum_{|beta-gamma|<=R}
/// omega_beta - e^{-|log E|^{1-eta}/C_eta} on the truncated operator.
Certificate certify_thr2(const ExperimentConfig& cfg, const AlloySample& sample,
                         double E, int sample_index = -1);
Certificate certify_thr2(const ExperimentConfig& cfg, int sample_index, double E);

/// Draw the sample the pipeline would use for (E index, sample index).
AlloySample pipeline_sample(const ExperimentConfig& cfg, int e_index,
                            int sample_index);

struct BoundRow {
    double E = 0.0;
    double bound = 0.0;       // C (2L)^2 p + e^{-E^-eta}
    double log_p = 0.0;       // ln p (exact-upper when available, else asymptotic)
    bool p_exact_used = false;
    double log_tail = 0.0;    // -E^-eta, kept in log form
    long n_sites = 0;
    bool vacuous = false;     // bound > 1
    double mc_N = 0.0;
    double mc_stderr = 0.0;
    bool exceeds = false;     // MC above bound + 3 stderr on a nonvacuous row
};

std::vector<BoundRow> upper_bound_chain(const ExperimentConfig& cfg,
                                        const std::vector<IdsRow>& ids_rows);
std::string bound_table_csv(const std::vector<BoundRow>& rows);

struct LifshitzFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
    int points_used = 0;
    std::vector<double> point_ratios; // y_i / x_i per usable row
    std::string to_json() const;
};

/// Least squares of ln|ln N_hat| on ln|ln E| over rows with N_hat in (0, 1);
/// reporting only, no pass/fail.  Requires >= 4 usable points.
LifshitzFit fit_lifshitz_exponent(const std::vector<IdsEstimate>& estimates);

std::vector<IdsEstimate> read_estimates_csv(std::istream& in);

} // namespace latail
