// latail: Landau-level disk spectra, enlargement certificates, and the
// Monte Carlo density-of-states pipeline for the 2D random alloy model.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "latail/disk_spectrum.hpp"
#include "latail/enlargement.hpp"
#include "latail/errors.hpp"
#include "latail/pipeline.hpp"
#include "latail/smallball.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCertificateFailure = 2;
constexpr int kExitInputError = 3;
constexpr int kExitNumericalFailure = 4;

std::string fmt(double v) {
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

std::vector<long> parse_long_list(const std::string& s) {
    std::vector<long> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stol(item));
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open " + path + " for writing");
    f << text;
}

int run_nu(int q, double b, double R, long k_single, const std::string& k_list) {
    const latail::FieldConfig cfg(b);
    const latail::DiskSpec disk = latail::DiskSpec::from_radius(cfg, R);
    std::vector<long> ks;
    if (!k_list.empty())
        ks = parse_long_list(k_list);
    else
        ks.push_back(k_single);
    std::cout << "k,rho,nu_exact,nu_asym,ratio\n";
    for (long k : ks) {
        const latail::LandauIndex idx(q, static_cast<int>(k));
        const double lnu = latail::log_nu_exact(cfg, idx, disk);
        std::cout << k << ',' << fmt(disk.rho) << ',' << fmt(std::exp(lnu));
        if (static_cast<double>(k) > disk.rho) {
            const double lnu0 = latail::log_nu_asymptotic(cfg, idx, disk);
            std::cout << ',' << fmt(std::exp(lnu0)) << ','
                      << fmt(std::exp(lnu - lnu0));
        } else {
            std::cout << ",,";
        }
        std::cout << '\n';
    }
    return kExitOk;
}

int run_verify_f1(int q, double beta, double f_power, const std::string& k_list,
                  int rho_points, const std::string& out) {
    const latail::FieldConfig cfg(1.0);
    latail::AsymWindow window;
    window.beta = beta;
    window.f = [f_power](double k) { return std::pow(k, f_power); };
    window.descriptor = "k^" + fmt(f_power);
    latail::RhoRule rule;
    rule.points = rho_points;
    const latail::Certificate cert =
        latail::verify_f1(cfg, q, window, parse_long_list(k_list), rule);
    if (out.empty())
        std::cout << cert.dump();
    else
        cert.write(out);
    return cert.pass ? kExitOk : kExitCertificateFailure;
}

int run_certify_le2(int q, double b, double eps, double R, double bigC,
                    double delta, long kmax, const std::string& out) {
    const latail::FieldConfig cfg(b);
    const auto params = latail::EnlargementParams::make(cfg, eps, R, bigC, delta, kmax);
    const latail::Certificate cert = latail::certify_le2(cfg, q, params);
    if (out.empty())
        std::cout << cert.dump();
    else
        cert.write(out);
    return cert.pass ? kExitOk : kExitCertificateFailure;
}

int run_ids(const std::string& config, int workers, const std::string& out_csv,
            const std::string& out_manifest, const std::string& bound_csv) {
    const auto cfg = latail::ExperimentConfig::parse_file(config);
    const latail::IdsResult res = latail::ids_estimate(cfg, workers);
    if (out_csv.empty())
        std::cout << res.csv;
    else
        write_text(out_csv, res.csv);
    if (!out_manifest.empty()) write_text(out_manifest, res.manifest);
    if (!bound_csv.empty())
        write_text(bound_csv,
                   latail::bound_table_csv(latail::upper_bound_chain(cfg, res.rows)));
    for (const auto& row : res.rows)
        if (row.failed)
            throw latail::numerical_error("ids: a row lost more than 25% of its "
                                          "samples", 0.0);
    return kExitOk;
}

int run_thr2(const std::string& config, double E, const std::string& out_dir,
             const std::string& dump_dir) {
    const auto cfg = latail::ExperimentConfig::parse_file(config);
    if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
    if (!dump_dir.empty()) std::filesystem::create_directories(dump_dir);
    bool all_pass = true;
    for (int s = 0; s < cfg.n_samples; ++s) {
        const int e_idx = static_cast<int>(cfg.E_grid.size()) - 1;
        const latail::AlloySample sample = latail::pipeline_sample(cfg, e_idx, s);
        const latail::Certificate cert = latail::certify_thr2(cfg, sample, E, s);
        all_pass = all_pass && cert.pass;
        const std::string name = "thr2_sample" + std::to_string(s) + ".json";
        if (out_dir.empty())
            std::cout << cert.dump();
        else
            cert.write(out_dir + "/" + name);
        if (!dump_dir.empty()) {
            const auto op = latail::assemble_projected(
                cfg.field, cfg.q, sample, cfg.site, {{0.0, 0.0}, cfg.truncation_K()});
            latail::write_matrix_file(
                dump_dir + "/matrix_sample" + std::to_string(s) + ".bin", op,
                cfg.field, cfg.q, sample.box.L, cfg.seed);
        }
        std::cerr << "sample " << s << ": " << (cert.pass ? "pass" : "FAIL")
                  << " margin=" << cert.constants.at("margin") << "\n";
    }
    return all_pass ? kExitOk : kExitCertificateFailure;
}

int run_smallball(double kappa, double omega_plus, int n, double t) {
    const auto law = latail::CouplingLaw::make(kappa, 0.0, omega_plus, 0);
    const auto res = latail::small_ball_bracket(law, n, t);
    const double asym = latail::small_ball_asymptotic(law, n, t);
    std::cout << "exact_lower,exact_upper,exact_mid,asymptotic\n";
    std::cout << fmt(res.bracket.lower) << ',' << fmt(res.bracket.upper) << ','
              << fmt(res.bracket.mid()) << ',' << fmt(asym) << '\n';
    if (!res.converged)
        throw latail::numerical_error("smallball: bracket did not close",
                                      res.achieved_rel);
    return kExitOk;
}

int run_lifshitz_fit(const std::string& input, const std::string& out) {
    std::ifstream in(input);
    if (!in) throw std::invalid_argument("cannot open " + input);
    const auto estimates = latail::read_estimates_csv(in);
    const latail::LifshitzFit fit = latail::fit_lifshitz_exponent(estimates);
    if (out.empty())
        std::cout << fit.to_json();
    else
        write_text(out, fit.to_json());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Landau-level alloy model: disk spectra, enlargement "
                 "certificates, small-ball probabilities, and the Monte Carlo "
                 "density-of-states pipeline"};
    app.require_subcommand(1);

    // nu
    auto* nu = app.add_subcommand("nu", "exact and asymptotic disk eigenvalues");
    int nu_q = 0;
    double nu_b = 1.0, nu_R = 1.0;
    long nu_k = 0;
    std::string nu_k_range;
    bool nu_schema = false;
    nu->add_option("--q", nu_q, "Landau band");
    nu->add_option("--b", nu_b, "field strength")->required();
    nu->add_option("--R", nu_R, "disk radius")->required();
    nu->add_option("--k", nu_k, "single angular index");
    nu->add_option("--k-range", nu_k_range, "comma list of angular indices");
    nu->add_flag("--schema", nu_schema, "print output columns and exit");

    // verify-f1
    auto* vf1 = app.add_subcommand("verify-f1", "ratio-asymptotics certificate");
    int f1_q = 0;
    double f1_beta = 1.0, f1_fpower = 0.75;
    std::string f1_krange = "100,1000,10000", f1_out;
    int f1_rho_points = 16;
    bool f1_schema = false;
    vf1->add_option("--q", f1_q, "Landau band");
    vf1->add_option("--beta", f1_beta, "window exponent in (0,2)");
    vf1->add_option("--f-power", f1_fpower, "f(k) = k^p");
    vf1->add_option("--k-range", f1_krange, "comma list of k values");
    vf1->add_option("--rho-points", f1_rho_points, "rho grid size per k");
    vf1->add_option("--out", f1_out, "certificate JSON path (stdout if empty)");
    vf1->add_flag("--schema", f1_schema, "describe certificate JSON and exit");

    // certify-le2
    auto* le2 = app.add_subcommand("certify-le2", "enlargement certificate");
    int le2_q = 0;
    double le2_b = 1.0, le2_eps = 0.4, le2_R = 8.0, le2_C = 3.0, le2_delta = 0.5;
    long le2_kmax = -1;
    std::string le2_out;
    bool le2_schema = false;
    le2->add_option("--q", le2_q, "Landau band");
    le2->add_option("--b", le2_b, "field strength");
    le2->add_option("--eps", le2_eps, "small disk radius");
    le2->add_option("--R", le2_R, "large radius");
    le2->add_option("--bigC", le2_C, "constant defining k0 = ceil(C R^2), > 2b");
    le2->add_option("--delta", le2_delta, "delta in (0,1)");
    le2->add_option("--kmax", le2_kmax, "certification horizon (default 4 k0)");
    le2->add_option("--out", le2_out, "certificate JSON path (stdout if empty)");
    le2->add_flag("--schema", le2_schema, "describe certificate JSON and exit");

    // ids
    auto* ids = app.add_subcommand("ids", "Monte Carlo IDS estimates");
    std::string ids_config, ids_csv, ids_manifest, ids_bound;
    int ids_workers = 0;
    bool ids_schema = false;
    ids->add_option("--config", ids_config, "experiment config file");
    ids->add_option("--workers", ids_workers, "worker threads (0 = hardware)");
    ids->add_option("--out-csv", ids_csv, "estimates CSV path (stdout if empty)");
    ids->add_option("--out-manifest", ids_manifest, "manifest JSON path");
    ids->add_option("--bound-csv", ids_bound, "upper-bound chain table path");
    ids->add_flag("--schema", ids_schema, "print output columns and exit");

    // thr2
    auto* thr2 = app.add_subcommand("thr2", "per-sample operator bound certificates");
    std::string thr2_config, thr2_out, thr2_dump;
    double thr2_E = 0.0;
    bool thr2_schema = false;
    thr2->add_option("--config", thr2_config, "experiment config file");
    thr2->add_option("--E", thr2_E, "energy");
    thr2->add_option("--out-dir", thr2_out, "certificate directory (stdout if empty)");
    thr2->add_option("--dump-matrices", thr2_dump, "binary matrix dump directory");
    thr2->add_flag("--schema", thr2_schema, "describe certificate JSON and exit");

    // smallball
    auto* sb = app.add_subcommand("smallball", "small-ball probability");
    double sb_kappa = 1.0, sb_omega = 1.0, sb_t = 0.1;
    int sb_n = 2;
    bool sb_schema = false;
    sb->add_option("--kappa", sb_kappa, "edge exponent")->required();
    sb->add_option("--omega-plus", sb_omega, "support right edge")->required();
    sb->add_option("--n", sb_n, "number of i.i.d. couplings")->required();
    sb->add_option("--t", sb_t, "threshold")->required();
    sb->add_flag("--schema", sb_schema, "print output columns and exit");

    // lifshitz-fit
    auto* fit = app.add_subcommand("lifshitz-fit", "log-log slope of the IDS tail");
    std::string fit_in, fit_out;
    bool fit_schema = false;
    fit->add_option("--input", fit_in, "estimates CSV");
    fit->add_option("--out", fit_out, "fit record JSON path (stdout if empty)");
    fit->add_flag("--schema", fit_schema, "describe fit JSON and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (nu->parsed()) {
            if (nu_schema) {
                std::cout << "columns: k, rho, nu_exact, nu_asym (blank when k <= "
                             "rho), ratio = nu_exact/nu_asym\n";
                return kExitOk;
            }
            return run_nu(nu_q, nu_b, nu_R, nu_k, nu_k_range);
        }
        if (vf1->parsed()) {
            if (f1_schema) {
                std::cout << "JSON: {lemma:\"f1\", q, beta, f, rows:[{k, rho, "
                             "ratio_dev, bound}], fitted_C, pass, precision_note}\n";
                return kExitOk;
            }
            return run_verify_f1(f1_q, f1_beta, f1_fpower, f1_krange,
                                 f1_rho_points, f1_out);
        }
        if (le2->parsed()) {
            if (le2_schema) {
                std::cout << "JSON: {lemma:\"le2\", b, q, epsilon, R, C, delta, k0, "
                             "k_max, C1, C2, log_C1, log_C2, C1_argmin_k, "
                             "C1_exponent_ratio, crossover_k, rows:[{k, lhs, rhs, "
                             "margin}], pass, precision_note}\n";
                return kExitOk;
            }
            return run_certify_le2(le2_q, le2_b, le2_eps, le2_R, le2_C, le2_delta,
                                   le2_kmax, le2_out);
        }
        if (ids->parsed()) {
            if (ids_schema) {
                std::cout << "columns: E, L_used, capped, n_samples, dropped, "
                             "N_half, N_hat, N_twice, stderr_half, stderr, "
                             "stderr_twice\n"
                          << "bound table: E, bound, p, p_exact_used, log_tail, "
                             "n_sites, vacuous, mc_N, mc_stderr, exceeds\n";
                return kExitOk;
            }
            if (ids_config.empty())
                throw std::invalid_argument("ids: --config is required");
            return run_ids(ids_config, ids_workers, ids_csv, ids_manifest, ids_bound);
        }
        if (thr2->parsed()) {
            if (thr2_schema) {
                std::cout << "JSON per sample: {lemma:\"thr2\", E, eta, c_eta, R, K, "
                             "L, b, q, sample_index, lambda_min, inf_window_sum, "
                             "correction, log_scale, lhs, rhs, margin, tolerance, "
                             "rows:[{gx, gy, window_sum}], pass, precision_note}\n";
                return kExitOk;
            }
            if (thr2_config.empty())
                throw std::invalid_argument("thr2: --config is required");
            if (!(thr2_E > 0.0))
                throw std::invalid_argument("thr2: --E must be > 0");
            return run_thr2(thr2_config, thr2_E, thr2_out, thr2_dump);
        }
        if (sb->parsed()) {
            if (sb_schema) {
                std::cout << "columns: exact_lower, exact_upper, exact_mid, "
                             "asymptotic\n";
                return kExitOk;
            }
            return run_smallball(sb_kappa, sb_omega, sb_n, sb_t);
        }
        if (fit->parsed()) {
            if (fit_schema) {
                std::cout << "JSON: {slope, intercept, rms_residual, points_used, "
                             "point_ratios}\n";
                return kExitOk;
            }
            if (fit_in.empty())
                throw std::invalid_argument("lifshitz-fit: --input is required");
            return run_lifshitz_fit(fit_in, fit_out);
        }
    } catch (const latail::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what()
                  << " (achieved tolerance " << e.achieved_tolerance() << ")\n";
        return kExitNumericalFailure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::domain_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return kExitNumericalFailure;
    }
    return kExitOk;
}
