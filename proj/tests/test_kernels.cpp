#include <catch2/catch_amalgamated.hpp>

#include <qrcsl/kernels/kernels.hpp>
#include <qrcsl/kernels/model_params.hpp>
#include <qrcsl/numerics/rng.hpp>

#include "support/bessel_reference.hpp"

#include <cmath>

using namespace qrcsl;

TEST_CASE("model parameter defaults and validation")
{
    ModelParams p;
    CHECK(p.lambda == 1e-16);
    CHECK(p.a == 1e-5);
    CHECK(p.mu() == Catch::Approx(4.7553e8));  // of order 1e9
    CHECK_NOTHROW(p.validate());

    p.a = -1.0;
    p.lambda = 0.0;
    const auto errs = p.validation_errors();
    REQUIRE(errs.size() == 2);  // all problems reported, not just the first
    CHECK_THROWS_AS(p.validate(), config_error);
}

TEST_CASE("commutator amplitude closed form")
{
    // value = mass^2 K1(mass s) / (2 pi^2 s)
    const double k1_at_1 = std::exp(-1.0) * bessel_reference::k1e(1.0);
    CHECK(k1_at_1 == Catch::Approx(0.601907230197235).epsilon(1e-12));

    auto v = commutator_kernel(1.0, 1.0);
    CHECK(v.units == KernelUnits::per_volume);
    CHECK(v.value == Catch::Approx(k1_at_1 / (2.0 * M_PI * M_PI)).epsilon(1e-13));
    CHECK(v.value == Catch::Approx(0.030494).epsilon(2e-4));

    // scaling out the mass: value(s, m) = m^3 f(m s)
    const double m = 2.5;
    auto w = commutator_kernel(1.0 / m, m);
    CHECK(w.value == Catch::Approx(m * m * m * v.value).epsilon(1e-12));

    SECTION("short-distance divergence mass/(2 pi^2 s^2)")
    {
        const double s = 1e-3;
        const double lead = 1.0 / (2.0 * M_PI * M_PI * s * s);
        CHECK(commutator_kernel(s, 1.0).value == Catch::Approx(lead).epsilon(1e-2));
    }

    SECTION("large-argument exponential falloff")
    {
        const double s = 20.0;
        const double asym = 1.0 / (2.0 * M_PI * M_PI * s) * std::sqrt(M_PI / (2.0 * s)) *
                            std::exp(-s);
        CHECK(commutator_kernel(s, 1.0).value == Catch::Approx(asym).epsilon(5e-2));
    }

    CHECK_THROWS_AS(commutator_kernel(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(commutator_kernel(-1.0, 1.0), std::domain_error);
}

TEST_CASE("on-shell Gaussian integral: closed form vs quadrature")
{
    // mu = 1 anchor: 2 pi e^2 K1(2)
    const double anchor = 2.0 * M_PI * 1.03347684706868857318;
    CHECK(gaussian_onshell_integral(0.0, 1.0).value == Catch::Approx(anchor).epsilon(1e-14));

    for (double mu : {0.5, 1.0, 10.0, 100.0}) {
        CAPTURE(mu);
        const double closed = gaussian_onshell_integral(0.0, mu).value;
        const double quad = gaussian_onshell_integral(0.0, mu, KernelMethod::quadrature).value;
        CHECK(quad == Catch::Approx(closed).epsilon(1e-6));
    }
}

TEST_CASE("on-shell Gaussian integral is frame independent")
{
    SampleStream rng(2024, 0);
    for (double mu : {1.0, 10.0}) {
        const double closed = gaussian_onshell_integral(0.0, mu).value;
        for (int i = 0; i < 10; ++i) {
            const double p1 = 5.0 * mu * rng.uniform();
            CAPTURE(mu, p1);
            const double quad =
                gaussian_onshell_integral(p1, mu, KernelMethod::quadrature).value;
            CHECK(quad == Catch::Approx(closed).epsilon(1e-6));
        }
    }
}

TEST_CASE("on-shell Gaussian integral, narrow-kernel asymptotics")
{
    // e^{2 mu^2} K1(2 mu^2) -> sqrt(pi)/(2 mu) for large mu
    const double mu = 1e3;
    const double closed = gaussian_onshell_integral(0.0, mu).value;
    CHECK(closed == Catch::Approx(2.0 * M_PI * std::sqrt(M_PI) / (2.0 * mu)).epsilon(1e-4));
}

TEST_CASE("no-measure Gaussian integral: closed form, quadrature, E1 proportionality")
{
    // mu = 1, E1 = M anchor: 2 pi e^2 [K0(2) + K1(2)]
    const double anchor = 2.0 * M_PI * (0.841568215070771417919 + 1.03347684706868857318);
    CHECK(gaussian_nomeasure_integral(1.0, 1.0).value == Catch::Approx(anchor).epsilon(1e-14));

    for (double mu : {0.5, 1.0, 10.0, 100.0}) {
        CAPTURE(mu);
        const double closed = gaussian_nomeasure_integral(1.0, mu).value;
        const double quad =
            gaussian_nomeasure_integral(1.0, mu, KernelMethod::quadrature).value;
        CHECK(quad == Catch::Approx(closed).epsilon(1e-6));
    }

    SECTION("proportional to E1 (two quadrature evaluations)")
    {
        const double r3 = gaussian_nomeasure_integral(3.0, 1.0, KernelMethod::quadrature).value /
                          gaussian_nomeasure_integral(1.0, 1.0, KernelMethod::quadrature).value;
        CHECK(r3 == Catch::Approx(3.0).epsilon(1e-6));
    }

    SECTION("large-mu bracket approaches sqrt(pi/(4 mu^2))")
    {
        const double mu = 1e3;
        const double bracket = gaussian_nomeasure_integral(1.0, mu).value / (2.0 * M_PI * mu);
        CHECK(bracket == Catch::Approx(std::sqrt(M_PI / (4.0 * mu * mu))).epsilon(1e-4));
    }
}

TEST_CASE("Fourier on-shell kernel: closed form vs oscillatory quadrature")
{
    // Mr = 1 anchor: 4 pi M^2 K1(1)
    const double k1_at_1 = std::exp(-1.0) * bessel_reference::k1e(1.0);
    CHECK(fourier_onshell_kernel(1.0, 1.0).value ==
          Catch::Approx(4.0 * M_PI * k1_at_1).epsilon(1e-12));

    for (double mu : {0.5, 1.0, 10.0, 100.0}) {
        CAPTURE(mu);
        const double r = 3.0 / mu;  // Mr = 3
        const double closed = fourier_onshell_kernel(r, mu).value;
        const double quad = fourier_onshell_kernel(r, mu, KernelMethod::quadrature).value;
        CHECK(quad == Catch::Approx(closed).epsilon(1e-6));
    }

    CHECK_THROWS_AS(fourier_onshell_kernel(0.0, 1.0), std::domain_error);
}

TEST_CASE("volume normalization of the Fourier kernel")
{
    for (double mass : {0.5, 1.0, 10.0}) {
        CAPTURE(mass);
        const double v = fourier_kernel_volume_integral(mass).value;
        CHECK(v == Catch::Approx(2.0 * M_PI * M_PI / (mass * mass)).epsilon(1e-6));
    }
}

TEST_CASE("u K1(u) normalization integral")
{
    // the radial core of the volume normalization above
    auto f = [](double u) { return u * qrcsl::bessel_k1(u); };
    CHECK(quad_adaptive(f, 0.0, 760.0).value == Catch::Approx(M_PI / 2.0).epsilon(1e-9));
}

TEST_CASE("on-shell invariant is spacelike, vanishing only at equal momenta")
{
    SampleStream rng(7, 0);
    const double mu = 1.3;
    for (int i = 0; i < 200; ++i) {
        double p1[3], p2[3];
        for (auto& c : p1) c = 6.0 * (rng.uniform() - 0.5);
        for (auto& c : p2) c = 6.0 * (rng.uniform() - 0.5);
        const double q2 = onshell_invariant(p1, p2, mu);
        CHECK(q2 > 0.0);

        const double self = onshell_invariant(p1, p1, mu);
        CHECK(std::abs(self) < 1e-12 * (1.0 + std::abs(q2)));
    }
}
