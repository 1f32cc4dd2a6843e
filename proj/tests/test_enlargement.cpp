#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "latail/disk_spectrum.hpp"
#include "latail/enlargement.hpp"

using namespace latail;

TEST_SUITE_BEGIN("enlargement");

namespace {
const FieldConfig b1(1.0);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(EnlargementParams::make(b1, 0.4, 8.0, 1.5, 0.5),
                    std::invalid_argument); // C <= 2b
    CHECK_THROWS_AS(EnlargementParams::make(b1, 9.0, 8.0, 3.0, 0.5),
                    std::invalid_argument); // eps > R
    CHECK_THROWS_AS(EnlargementParams::make(b1, 0.4, 8.0, 3.0, 1.5),
                    std::invalid_argument); // delta outside (0,1)
    const auto p = EnlargementParams::make(b1, 0.4, 8.0, 3.0, 0.5);
    CHECK(p.k0 == 192);
    CHECK(p.k_max == 768);
    CHECK(p.k0 >= 2.0 * b1.b * p.R * p.R); // k0 >= rho(2R)
}

TEST_CASE("compute_C1 frozen values and argmin location") {
    const auto p = EnlargementParams::make(b1, 0.4, 8.0, 3.0, 0.5);
    const C1Result r = compute_C1(b1, 0, p);
    CHECK(r.log_c1 == doctest::Approx(-1124.6123077649795).epsilon(1e-10));
    CHECK(r.argmin_k == p.k0);
    CHECK(r.exponent_ratio == doctest::Approx(-8.4504).epsilon(1e-4));
    CHECK(r.comparator_log == doctest::Approx(-2.0 * 3.0 * 64.0 * std::log(8.0)));

    const C1Result r1 = compute_C1(b1, 1, p);
    CHECK(r1.log_c1 == doctest::Approx(-1118.2611).epsilon(1e-6));
    CHECK(r1.argmin_k == p.k0);
}

TEST_CASE("compute_C1 at eps = R is exactly one") {
    const auto p = EnlargementParams::make(b1, 8.0, 8.0, 3.0, 0.5, 10);
    const C1Result r = compute_C1(b1, 0, p);
    CHECK(r.log_c1 == 0.0);
}

TEST_CASE("compute_C2 against the hand-computed formula") {
    const auto p = EnlargementParams::make(b1, 0.4, 8.0, 3.0, 0.5);
    const C2Result r = compute_C2(b1, 0, p);
    // q=0, delta=1/2, C=3, b=1, R=8: ln 3 - ln 3 - 2*193*ln 2 + 96
    const double by_hand = -2.0 * 193.0 * std::log(2.0) + 96.0;
    CHECK(r.log_c2 == doctest::Approx(by_hand).epsilon(1e-13));
    CHECK(r.log_c2 == doctest::Approx(-171.55481169613887).epsilon(1e-12));
    CHECK(r.decays);

    // decay mechanism: -2 k0 ln 2 + (3/2) b R^2 < 0 for these parameters
    CHECK(-2.0 * p.k0 * std::log(2.0) + 1.5 * b1.b * p.R * p.R < 0.0);

    const auto p12 = EnlargementParams::make(b1, 0.4, 12.0, 3.0, 0.5);
    const C2Result r12 = compute_C2(b1, 1, p12);
    const double by_hand12 = std::log(3.0) + std::log(3.0) -
                             2.0 * (432.0 - 1.0 + 1.0) * std::log(2.0) - 72.0 +
                             288.0;
    CHECK(r12.log_c2 == doctest::Approx(by_hand12).epsilon(1e-13));
    CHECK(r12.log_c2 == doctest::Approx(-380.68193942649652).epsilon(1e-12));
}

TEST_CASE("certify_le2 smoke family passes with nonnegative margins") {
    const auto p = EnlargementParams::make(b1, 0.4, 8.0, 3.0, 0.5);
    const Certificate cert = certify_le2(b1, 0, p);
    CHECK(cert.pass);
    CHECK(cert.lemma_id == "le2");
    CHECK(cert.rows.size() == static_cast<size_t>(p.k_max + 1));
    for (const auto& row : cert.rows)
        CHECK(row.at("margin") >= -1e-14);
    CHECK(cert.constants.at("tail_mechanism_ok") == 1.0);
    CHECK(cert.constants.at("crossover_k") <= static_cast<double>(p.k0) + 1.0);
}

TEST_CASE("certify_le2 with eps = R has margin C2 nu(2R)") {
    const auto p = EnlargementParams::make(b1, 8.0, 8.0, 3.0, 0.5, 24);
    const Certificate cert = certify_le2(b1, 0, p);
    CHECK(cert.pass);
    const double c2 = cert.constants.at("C2");
    for (const auto& row : cert.rows) {
        const int k = static_cast<int>(row.at("k"));
        const double nu2R =
            nu_exact(b1, {0, k}, DiskSpec::from_radius(b1, 16.0));
        CHECK(row.at("margin") == doctest::Approx(c2 * nu2R).epsilon(1e-9));
    }
}

TEST_CASE("tail sign flips by 2 k0") {
    const auto p = EnlargementParams::make(b1, 0.4, 8.0, 3.0, 0.5);
    const C2Result c2 = compute_C2(b1, 0, p);
    const long k = 2 * p.k0;
    const double lR = log_nu_exact(b1, {0, static_cast<int>(k)},
                                   DiskSpec::from_radius(b1, 8.0));
    const double l2R = log_nu_exact(b1, {0, static_cast<int>(k)},
                                    DiskSpec::from_radius(b1, 16.0));
    CHECK(lR < c2.log_c2 + l2R); // nu(R) - C2 nu(2R) < 0
}

TEST_CASE("monotone degradation in eps") {
    // increasing eps toward R raises every margin
    const auto p1 = EnlargementParams::make(b1, 0.30, 6.0, 3.0, 0.5, 60);
    const auto p2 = EnlargementParams::make(b1, 0.35, 6.0, 3.0, 0.5, 60);
    const auto p3 = EnlargementParams::make(b1, 0.40, 6.0, 3.0, 0.5, 60);
    const Certificate c1 = certify_le2(b1, 0, p1);
    const Certificate c2 = certify_le2(b1, 0, p2);
    const Certificate c3 = certify_le2(b1, 0, p3);
    for (size_t i = 0; i < c1.rows.size(); ++i) {
        CHECK(c1.rows[i].at("margin") <= c2.rows[i].at("margin") + 1e-18);
        CHECK(c2.rows[i].at("margin") <= c3.rows[i].at("margin") + 1e-18);
    }
}

TEST_CASE("scale covariance: only rho enters") {
    // (b=1, R=8, C=3) and (b=4, R=4, C=12) share rho and k0
    const FieldConfig b4(4.0);
    const auto pa = EnlargementParams::make(b1, 0.4, 8.0, 3.0, 0.5, 80);
    const auto pb = EnlargementParams::make(b4, 0.2, 4.0, 12.0, 0.5, 80);
    REQUIRE(pa.k0 == pb.k0);
    const Certificate ca = certify_le2(b1, 0, pa);
    const Certificate cb = certify_le2(b4, 0, pb);
    REQUIRE(ca.rows.size() == cb.rows.size());
    for (size_t i = 0; i < ca.rows.size(); ++i) {
        const double ma = ca.rows[i].at("margin");
        const double mb = cb.rows[i].at("margin");
        CHECK(ma == doctest::Approx(mb).epsilon(1e-12));
    }
}

TEST_CASE("certificate determinism") {
    const auto p = EnlargementParams::make(b1, 0.4, 8.0, 3.0, 0.5, 100);
    const std::string once = certify_le2(b1, 0, p).dump();
    const std::string twice = certify_le2(b1, 0, p).dump();
    CHECK(once == twice);
}

TEST_CASE("operator bound") {
    const auto p = EnlargementParams::make(b1, 0.4, 8.0, 3.0, 0.5);
    // K = 0: single scalar, ties to the k = 0 certificate row
    const OperatorBound ob0 = enlargement_operator_bound(b1, 0, p, 0);
    const Certificate cert = certify_le2(b1, 0, p);
    CHECK(ob0.min_eigenvalue ==
          doctest::Approx(cert.rows[0].at("margin")).epsilon(1e-12));

    // 3 k0 horizon: the operator inequality holds in the truncated basis
    const OperatorBound ob = enlargement_operator_bound(b1, 0, p, 3 * 192);
    CHECK(ob.min_eigenvalue >= -1e-14);
    CHECK(ob.lhs_diag.size() == static_cast<size_t>(3 * 192 + 1));
}

TEST_SUITE_END();
