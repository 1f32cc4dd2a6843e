#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <sstream>

#include "latail/pipeline.hpp"

using namespace latail;

TEST_SUITE_BEGIN("pipeline");

namespace {

std::string micro_config(const std::string& e_grid = "0.45, 0.3",
                         int n_samples = 2, const std::string& extra = "") {
    std::ostringstream cfg;
    cfg << "field.b = 1\n"
           "q = 0\n"
           "site.kind = gaussian\n"
           "site.amplitude = 1\n"
           "site.width = 1\n"
           "law.kappa = 1\n"
           "law.omega_plus = 0.3\n"
           "box.a = 2.5066282746310002\n"
           "box.n = 1\n"
           "eta = 0.5\n"
           "c_eta = 1\n"
           "nu_exponent = 0.3\n"
           "seed = 4242\n";
    cfg << "n_samples = " << n_samples << "\n";
    cfg << "E_grid = " << e_grid << "\n";
    cfg << extra;
    return cfg.str();
}

ExperimentConfig parse_str(const std::string& text) {
    std::istringstream in(text);
    return ExperimentConfig::parse(in);
}

} // namespace

TEST_CASE("config parsing accepts the documented keys only") {
    const ExperimentConfig cfg = parse_str(micro_config());
    CHECK(cfg.field.b == 1.0);
    CHECK(cfg.q == 0);
    CHECK(cfg.law.omega_plus == 0.3);
    CHECK(cfg.box.n == 1);
    CHECK(cfg.E_grid.size() == 2);
    CHECK(cfg.seed == 4242);
    CHECK(cfg.c_eta == 1.0);

    CHECK_THROWS_WITH_AS(parse_str(micro_config("0.45, 0.3", 2, "typo_key = 1\n")),
                         doctest::Contains("unknown key"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_str(micro_config("0.45, 0.3", 2, "q = 1\n")),
                         doctest::Contains("duplicate"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_str(micro_config("0.3, 0.45")),
                         doctest::Contains("decreasing"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_str(micro_config("1.9, 0.3")),
                         doctest::Contains("E_grid values"), std::invalid_argument);
    // missing required key
    std::string broken = micro_config();
    broken.erase(broken.find("eta = 0.5\n"), 10);
    CHECK_THROWS_WITH_AS(parse_str(broken), doctest::Contains("missing"),
                         std::invalid_argument);
}

TEST_CASE("manifest carries the reproduction keys") {
    const ExperimentConfig cfg = parse_str(micro_config());
    const std::string m = cfg.manifest_json();
    for (const char* key :
         {"\"seed\"", "\"kappa\"", "\"omega_plus\"", "\"a\"", "\"n\"", "\"b\"",
          "\"q\"", "\"K\""})
        CHECK(m.find(key) != std::string::npos);
    CHECK(cfg.truncation_K() >= 9); // flux count of the n=1 box
}

TEST_CASE("synthetic exponent fits") {
    // N(E) = exp(-ln^2 E) has slope exactly 2
    std::vector<IdsEstimate> log2_family;
    for (int i = 4; i <= 12; ++i) {
        IdsEstimate e;
        e.E = std::exp(-static_cast<double>(i));
        e.N_hat = std::exp(-std::pow(std::log(e.E), 2.0));
        e.n_samples = 8;
        log2_family.push_back(e);
    }
    const LifshitzFit f2 = fit_lifshitz_exponent(log2_family);
    CHECK(f2.slope == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(f2.rms_residual < 1e-10);

    // N(E) = E^3 has slope exactly 1
    std::vector<IdsEstimate> cubic;
    for (int i = 2; i <= 9; ++i) {
        IdsEstimate e;
        e.E = std::exp(-static_cast<double>(i));
        e.N_hat = std::pow(e.E, 3.0);
        cubic.push_back(e);
    }
    const LifshitzFit f1 = fit_lifshitz_exponent(cubic);
    CHECK(f1.slope == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(f1.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-10));

    // too few usable points
    std::vector<IdsEstimate> few(log2_family.begin(), log2_family.begin() + 3);
    CHECK_THROWS_AS(fit_lifshitz_exponent(few), std::invalid_argument);
    // N_hat outside (0,1) rows are discarded
    std::vector<IdsEstimate> zeros = log2_family;
    for (auto& e : zeros) e.N_hat = 0.0;
    CHECK_THROWS_AS(fit_lifshitz_exponent(zeros), std::invalid_argument);
}

TEST_CASE("ids estimates on a micro experiment") {
    const ExperimentConfig cfg = parse_str(micro_config("0.45, 0.3, 0.2", 3));
    const IdsResult res = ids_estimate(cfg, 2);
    REQUIRE(res.rows.size() == 3);
    for (const auto& row : res.rows) {
        CHECK(!row.failed);
        CHECK(row.dropped == 0);
        CHECK(row.at_E.n_samples == 3);
        CHECK(row.at_E.N_hat >= 0.0);
        // sandwich ordering within the row
        CHECK(row.N_half <= row.at_E.N_hat + 1e-15);
        CHECK(row.at_E.N_hat <= row.N_twice + 1e-15);
    }
    // monotone in E within twice the combined standard errors
    for (size_t i = 1; i < res.rows.size(); ++i) {
        const auto& hi = res.rows[i - 1];
        const auto& lo = res.rows[i];
        CHECK(lo.at_E.N_hat <=
              hi.at_E.N_hat + 2.0 * (lo.at_E.stderr_ + hi.at_E.stderr_) + 1e-12);
    }
    // the top-of-band row actually sees spectrum
    CHECK(res.rows.front().N_twice > 0.0);

    // csv round trip preserves the estimates
    std::istringstream csv_in(res.csv);
    const auto back = read_estimates_csv(csv_in);
    REQUIRE(back.size() == 3);
    for (size_t i = 0; i < 3; ++i) {
        CHECK(back[i].E == res.rows[i].at_E.E);
        CHECK(back[i].N_hat == res.rows[i].at_E.N_hat);
        CHECK(back[i].L_used == res.rows[i].at_E.L_used);
    }
}

TEST_CASE("ids output is byte-identical across worker counts") {
    const ExperimentConfig cfg = parse_str(micro_config("0.45, 0.3", 3));
    const IdsResult serial = ids_estimate(cfg, 1);
    const IdsResult threaded = ids_estimate(cfg, 3);
    CHECK(serial.csv == threaded.csv);
    CHECK(serial.manifest == threaded.manifest);
}

TEST_CASE("certify_thr2 constant and degenerate couplings") {
    const ExperimentConfig cfg = parse_str(micro_config("0.01", 1));
    const double E = 0.01;

    // omega identically zero: the certificate reduces to 0 >= -correction
    {
        AlloySample zero = AlloySample::constant(cfg.box, cfg.law, 0.0);
        const Certificate cert = certify_thr2(cfg, zero, E, 0);
        CHECK(cert.pass);
        CHECK(cert.constants.at("inf_window_sum") == 0.0);
        CHECK(cert.constants.at("rhs") < 0.0);
        CHECK(std::fabs(cert.constants.at("lambda_min")) < 1e-8);
    }

    // omega constant: the window infimum is c times the lattice ball count
    {
        const double c = 0.2;
        AlloySample flat = AlloySample::constant(cfg.box, cfg.law, c);
        const Certificate cert = certify_thr2(cfg, flat, E, 0);
        CHECK(cert.pass);
        const double R = cert.params.at("R");
        long count = 0;
        for (long dx = -4; dx <= 4; ++dx)
            for (long dy = -4; dy <= 4; ++dy)
                if (dx * dx + dy * dy <= R * R) ++count;
        CHECK(cert.constants.at("inf_window_sum") ==
              doctest::Approx(c * count).epsilon(1e-12));
        CHECK(cert.constants.at("lambda_min") > 0.0);
    }

    // void cell: zero couplings within 2R of the origin
    {
        AlloySample voided = AlloySample::constant(cfg.box, cfg.law, 0.3);
        const double R = std::lround(std::pow(-std::log(E), 0.25));
        for (auto& site : voided.couplings)
            if (site.gx * site.gx + site.gy * site.gy <= 4.0 * R * R)
                site.omega = 0.0;
        const Certificate cert = certify_thr2(cfg, voided, E, 0);
        CHECK(cert.pass);
        CHECK(cert.constants.at("inf_window_sum") == 0.0);
        CHECK(cert.constants.at("lambda_min") >=
              -cert.constants.at("tolerance"));
    }
}

TEST_CASE("upper bound chain flags and ordering") {
    const ExperimentConfig cfg =
        parse_str(micro_config("0.45, 0.12, 0.018315638888734179", 2));
    const IdsResult ids = ids_estimate(cfg, 2);
    const auto rows = upper_bound_chain(cfg, ids.rows);
    REQUIRE(rows.size() == 3);
    // large E: probability near 1 makes the bound vacuous
    CHECK(rows[0].vacuous);
    // e^-4: nonvacuous bound, MC must respect it
    CHECK(!rows[2].vacuous);
    CHECK(rows[2].bound > 0.0);
    for (const auto& r : rows) CHECK(!r.exceeds);
    // log-domain tail term is carried symbolically
    CHECK(rows[2].log_tail ==
          doctest::Approx(-std::pow(rows[2].E, -0.5)).epsilon(1e-12));

    const std::string csv = bound_table_csv(rows);
    CHECK(csv.find("E,bound,p,") == 0);
}

TEST_SUITE_END();
