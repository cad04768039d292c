#include <catch2/catch_amalgamated.hpp>

#include <qrcsl/numerics/monte_carlo.hpp>
#include <qrcsl/numerics/rng.hpp>

#include <cmath>
#include <cstdlib>
#include <set>

using qrcsl::mc_integrate_gaussian;
using qrcsl::SampleStream;

TEST_CASE("sample streams are deterministic and decorrelated")
{
    SampleStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t va = a.next_u64();
        CHECK(va == b.next_u64());
        CHECK(va != c.next_u64());
        CHECK(va != d.next_u64());
    }

    // no collisions across the first few thousand stream heads
    std::set<std::uint64_t> heads;
    for (std::uint64_t i = 0; i < 4096; ++i) heads.insert(SampleStream(1, i).next_u64());
    CHECK(heads.size() == 4096);
}

TEST_CASE("uniform variates stay inside the open unit interval")
{
    SampleStream s(3, 0);
    double mn = 1.0, mx = 0.0, sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform();
        mn = std::min(mn, u);
        mx = std::max(mx, u);
        sum += u;
    }
    CHECK(mn > 0.0);
    CHECK(mx < 1.0);
    CHECK(sum / n == Catch::Approx(0.5).margin(0.005));
}

TEST_CASE("normal variates have the right first moments")
{
    SampleStream s(5, 0);
    const int n = 200000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = s.normal();
        sum += x;
        sum_sq += x * x;
    }
    CHECK(sum / n == Catch::Approx(0.0).margin(0.01));
    CHECK(sum_sq / n == Catch::Approx(1.0).margin(0.02));
}

TEST_CASE("gaussian expectation of known integrands")
{
    // E[x^2] = 1 in one dimension
    auto r = mc_integrate_gaussian(
        1, [](std::span<const double> x) { return x[0] * x[0]; }, 100000, 11);
    CHECK(r.mean == Catch::Approx(1.0).margin(5.0 * r.std_error));
    CHECK(r.std_error < 0.02);

    // E[|x|^2] = 3 in three dimensions
    r = mc_integrate_gaussian(
        3,
        [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2]; },
        100000, 12);
    CHECK(r.mean == Catch::Approx(3.0).margin(5.0 * r.std_error));

    // constant integrand: zero variance
    r = mc_integrate_gaussian(2, [](std::span<const double>) { return 2.5; }, 1000, 13);
    CHECK(r.mean == 2.5);
    CHECK(r.std_error == 0.0);
}

TEST_CASE("standard error shrinks like the square root of the sample count")
{
    auto f = [](std::span<const double> x) { return std::exp(0.3 * x[0]); };
    const auto small = mc_integrate_gaussian(1, f, 4000, 21);
    const auto large = mc_integrate_gaussian(1, f, 256000, 21);
    const double ratio = small.std_error / large.std_error;
    CHECK(ratio == Catch::Approx(8.0).margin(1.5));
}

TEST_CASE("result is bit-identical for any worker count")
{
    auto f = [](std::span<const double> x) { return std::cos(x[0]) * x[1]; };

    setenv("QRCSL_WORKERS", "1", 1);
    const auto serial = mc_integrate_gaussian(2, f, 50000, 99);
    setenv("QRCSL_WORKERS", "4", 1);
    const auto parallel = mc_integrate_gaussian(2, f, 50000, 99);
    unsetenv("QRCSL_WORKERS");

    CHECK(serial.mean == parallel.mean);          // exact, not approximate
    CHECK(serial.std_error == parallel.std_error);
}

TEST_CASE("bad arguments are config errors")
{
    auto f = [](std::span<const double>) { return 0.0; };
    CHECK_THROWS_AS(mc_integrate_gaussian(0, f, 100, 1), qrcsl::config_error);
    CHECK_THROWS_AS(mc_integrate_gaussian(1, f, 1, 1), qrcsl::config_error);
}
