#include <doctest.h>

#include <cmath>
#include <numbers>

#include "latail/quadrature.hpp"
#include "latail/specfun.hpp"

using namespace latail;
namespace quad = latail::quadrature;

TEST_SUITE_BEGIN("quadrature");

TEST_CASE("gauss_legendre rules") {
    for (int n : {4, 8, 15, 31, 64}) {
        const auto& gl = quad::gauss_legendre(n);
        double wsum = 0.0;
        for (double w : gl.w) wsum += w;
        CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
        // exact for polynomials up to degree 2n-1
        double ix2 = 0.0;
        for (size_t i = 0; i < gl.x.size(); ++i) ix2 += gl.w[i] * gl.x[i] * gl.x[i];
        CHECK(ix2 == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    }
    const auto& g8 = quad::gauss_legendre(8);
    double i14 = 0.0;
    for (size_t i = 0; i < g8.x.size(); ++i)
        i14 += g8.w[i] * std::pow(g8.x[i], 14);
    CHECK(i14 == doctest::Approx(2.0 / 15.0).epsilon(1e-13));
}

TEST_CASE("adaptive integrates smooth and peaked integrands") {
    CHECK(quad::integrate([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-12) ==
          doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
    // narrow gaussian inside a wide interval
    const double v = quad::integrate(
        [](double x) { return std::exp(-500.0 * (x - 0.3) * (x - 0.3)); }, -4.0, 9.0,
        1e-11);
    CHECK(v == doctest::Approx(std::sqrt(std::numbers::pi / 500.0)).epsilon(1e-10));
}

TEST_CASE("adaptive reports non-convergence honestly") {
    auto nasty = [](double x) { return std::sin(1.0 / (x + 1e-14)); };
    const auto r = quad::adaptive(nasty, 0.0, 1.0, 1e-14, 0.0, 8);
    CHECK(!r.converged);
    CHECK(r.abs_error > 0.0);
}

TEST_CASE("log_adaptive agrees with the incomplete gamma route") {
    // int_0^rho xi^k e^-xi dxi in log form vs series/continued-fraction
    for (long k : {5L, 60L, 200L})
        for (double rho : {2.5, 40.0, 150.0}) {
            auto g = [k](double xi) {
                return xi == 0.0 ? -std::numeric_limits<double>::infinity()
                                 : k * std::log(xi) - xi;
            };
            const auto r = quad::log_adaptive(g, 0.0, rho, 1e-11);
            REQUIRE(r.converged);
            CHECK(r.log_value ==
                  doctest::Approx(log_lower_gamma(k + 1.0, rho)).epsilon(1e-9));
        }
}

TEST_CASE("log_adaptive handles integrals far below double range") {
    // int_0^0.01 xi^400 e^-xi ~ 0.01^401 / 401, way under DBL_MIN
    auto g = [](double xi) {
        return xi == 0.0 ? -std::numeric_limits<double>::infinity()
                         : 400.0 * std::log(xi) - xi;
    };
    const auto r = quad::log_adaptive(g, 0.0, 0.01, 1e-11);
    REQUIRE(r.converged);
    CHECK(r.log_value == doctest::Approx(log_lower_gamma(401.0, 0.01)).epsilon(1e-9));
    CHECK(r.log_value < -1800.0);
}

TEST_CASE("polar grid integrates radial monomials") {
    const auto grid = quad::polar_grid(2.0, 48, 64);
    double area = 0.0, m2 = 0.0;
    for (size_t i = 0; i < grid.size(); ++i) {
        area += grid.w[i];
        m2 += grid.w[i] * (grid.x[i] * grid.x[i] + grid.y[i] * grid.y[i]);
    }
    CHECK(area == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-12));
    CHECK(m2 == doctest::Approx(8.0 * std::numbers::pi).epsilon(1e-12)); // 2pi R^4/4
}

TEST_CASE("tensor panels integrate a gaussian over a box") {
    const auto grid = quad::tensor_panels(-6.0, 6.0, -6.0, 6.0, 0.5, 8);
    double v = 0.0;
    for (size_t i = 0; i < grid.size(); ++i)
        v += grid.w[i] *
             std::exp(-grid.x[i] * grid.x[i] - grid.y[i] * grid.y[i]);
    const double erf6 = std::erf(6.0);
    CHECK(v == doctest::Approx(std::numbers::pi * erf6 * erf6).epsilon(1e-12));
}

TEST_SUITE_END();
