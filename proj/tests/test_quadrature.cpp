#include <catch2/catch_amalgamated.hpp>

#include <qrcsl/numerics/quadrature.hpp>

#include <cmath>
#include <limits>

using qrcsl::quad_adaptive;

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
}

TEST_CASE("finite intervals")
{
    auto r = quad_adaptive([](double x) { return x * x; }, 0.0, 1.0);
    CHECK(r.value == Catch::Approx(1.0 / 3.0).epsilon(1e-14));

    // integrable endpoint singularity
    r = quad_adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
    CHECK(r.value == Catch::Approx(2.0).epsilon(1e-12));

    r = quad_adaptive([](double x) { return std::sin(50.0 * x); }, 0.0, 1.0);
    CHECK(r.value == Catch::Approx((1.0 - std::cos(50.0)) / 50.0).epsilon(1e-12));
}

TEST_CASE("half-infinite intervals")
{
    auto r = quad_adaptive([](double x) { return std::exp(-x); }, 0.0, inf);
    CHECK(r.value == Catch::Approx(1.0).epsilon(1e-12));

    // Written in log form: at the extreme abscissae the rule probes, the
    // naive product x^3 * exp(-x) evaluates as inf * 0.
    r = quad_adaptive([](double x) { return std::exp(3.0 * std::log(x) - x); }, 0.0, inf);
    CHECK(r.value == Catch::Approx(6.0).epsilon(1e-12));

    r = quad_adaptive([](double x) { return std::exp(x); }, -inf, 0.0);
    CHECK(r.value == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("doubly infinite interval")
{
    auto r = quad_adaptive([](double x) { return std::exp(-x * x); }, -inf, inf);
    CHECK(r.value == Catch::Approx(std::sqrt(M_PI)).epsilon(1e-12));
}

TEST_CASE("error estimate honors the requested tolerance")
{
    const double tol = 1e-8;
    auto r = quad_adaptive([](double x) { return std::cos(x) * std::exp(-x); }, 0.0, inf, tol);
    CHECK(r.value == Catch::Approx(0.5).epsilon(1e-9));
    CHECK(r.error <= tol * std::max(std::abs(r.value), 1.0));
}

TEST_CASE("invalid requests are config errors")
{
    auto f = [](double x) { return x; };
    CHECK_THROWS_AS(quad_adaptive(f, 1.0, 0.0), qrcsl::config_error);
    CHECK_THROWS_AS(quad_adaptive(f, 0.0, 1.0, 0.0), qrcsl::config_error);
    CHECK_THROWS_AS(quad_adaptive(f, 0.0, 1.0, -1e-3), qrcsl::config_error);
}

TEST_CASE("non-convergent integral raises accuracy_error with diagnostics")
{
    try {
        quad_adaptive([](double x) { return std::sin(x); }, 0.0, inf);
        FAIL("expected accuracy_error");
    } catch (const qrcsl::accuracy_error& e) {
        CHECK(e.error_estimate > 0.0);
        CHECK(std::string(e.what()).find("tolerance") != std::string::npos);
    }
}
