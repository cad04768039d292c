#include <catch2/catch_amalgamated.hpp>

#include <qrcsl/excitation/oscillator.hpp>
#include <qrcsl/excitation/quadrupole.hpp>
#include <qrcsl/excitation/rates.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

using namespace qrcsl;

// Pinned references are 25-digit mpmath evaluations: the double radial
// quadrature for the oscillator rate, the l=2 projected quadrature for the
// tachyonic variant, and exact rational/Bessel arithmetic for the germanium
// numbers.

namespace {

struct ExactRef {
    double b;
    double rate;  // lambda = 1, a = 1
};

constexpr ExactRef exact_refs[] = {
    {0.01, 1.562431642547563363e-10}, {0.03, 1.2651267862725108608e-8},
    {0.1, 1.5556832446037941971e-6},  {0.3, 1.217026889231018681e-4},
    {0.5, 8.7685175976595652336e-4},  {2.0, 6.0481228216868595017e-2},
};

double series_rate(double b, double lambda, double a)
{
    OscillatorOracleConfig cfg;
    cfg.b = b;
    return excitation_rate_series(oscillator_second_moments(cfg), lambda, a);
}

}  // namespace

TEST_CASE("oscillator second moments have the advertised structure")
{
    for (int m = -2; m <= 2; ++m) {
        OscillatorOracleConfig cfg;
        cfg.b = 0.4;
        cfg.m_final = m;
        const SecondMomentData d = oscillator_second_moments(cfg);

        // different l: both the overlap and the scalar moment vanish
        CHECK(std::abs(d.overlap) == 0.0);
        CHECK(std::abs(d.sum_x2) == 0.0);

        // symmetric in the cartesian indices, like the operator itself
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(std::abs(d.xixj(i, j) - d.xixj(j, i)) < 1e-18);

        // traceless (the l=2 projection removes the scalar part)
        const std::complex<double> tr = d.xixj(0, 0) + d.xixj(1, 1) + d.xixj(2, 2);
        CHECK(std::abs(tr) < 1e-18);

        // every m value carries the same total strength: b^4 / 4
        double cross = 0.0;
        for (const auto& v : d.sum_xixj) cross += std::norm(v);
        const double bracket = std::norm(d.sum_x2) + 2.0 * cross;
        CHECK(bracket == Catch::Approx(std::pow(0.4, 4) / 4.0).epsilon(1e-14));
    }

    SECTION("moments scale as b^2")
    {
        OscillatorOracleConfig small, big;
        small.b = 0.2;
        big.b = 0.6;
        const auto ds = oscillator_second_moments(small);
        const auto db = oscillator_second_moments(big);
        for (int i = 0; i < 9; ++i)
            CHECK(std::abs(db.sum_xixj[static_cast<std::size_t>(i)] -
                           9.0 * ds.sum_xixj[static_cast<std::size_t>(i)]) < 1e-15);
    }

    SECTION("configuration validation")
    {
        OscillatorOracleConfig cfg;
        cfg.b = 0.0;
        CHECK_THROWS_AS(cfg.validate(), config_error);
        cfg.b = -1.0;
        CHECK_THROWS_AS(cfg.validate(), config_error);

        cfg = OscillatorOracleConfig{};
        cfg.l_final = 0;  // same as the initial state
        CHECK_THROWS_AS(cfg.validate(), std::domain_error);

        cfg = OscillatorOracleConfig{};
        cfg.l_final = 1;
        CHECK_THROWS_AS(cfg.validate(), config_error);

        cfg = OscillatorOracleConfig{};
        cfg.m_final = 3;
        CHECK_THROWS_AS(cfg.validate(), config_error);
    }
}

TEST_CASE("second order rate formula reduces to the closed form")
{
    // lambda (b/a)^4 / 64 for the oscillator transition
    CHECK(series_rate(0.07, 2.5, 0.9) ==
          Catch::Approx(2.5 * std::pow(0.07 / 0.9, 4) / 64.0).epsilon(1e-14));
    CHECK(series_rate(1.0, 1.0, 1.0) == Catch::Approx(1.0 / 64.0).epsilon(1e-14));

    SECTION("linear in lambda, fourth power of the length ratio")
    {
        const double base = series_rate(0.3, 1.0, 1.0);
        CHECK(series_rate(0.3, 2.0, 1.0) == Catch::Approx(2.0 * base).epsilon(1e-14));
        CHECK(series_rate(0.3, 1.0, 2.0) == Catch::Approx(base / 16.0).epsilon(1e-14));
        CHECK(series_rate(0.3, 0.0, 1.0) == 0.0);
    }

    SECTION("empty moment data gives a vanishing rate")
    {
        CHECK(excitation_rate_series(SecondMomentData{}, 1.0, 1.0) == 0.0);
    }

    SECTION("argument validation")
    {
        SecondMomentData d;
        d.overlap = {0.5, 0.0};  // not orthogonal
        CHECK_THROWS_AS(excitation_rate_series(d, 1.0, 1.0), std::domain_error);
        CHECK_THROWS_AS(excitation_rate_series(SecondMomentData{}, -1.0, 1.0),
                        std::domain_error);
        CHECK_THROWS_AS(excitation_rate_series(SecondMomentData{}, 1.0, 0.0),
                        std::domain_error);
    }
}

TEST_CASE("exact oscillator rate matches the pinned references")
{
    for (const auto& r : exact_refs) {
        OscillatorOracleConfig cfg;
        cfg.b = r.b;
        CHECK(excitation_rate_exact(cfg, 1.0, 1.0) ==
              Catch::Approx(r.rate).epsilon(1e-12));
    }

    SECTION("linear in lambda, function of b/a only")
    {
        OscillatorOracleConfig cfg;
        cfg.b = 0.3;
        CHECK(excitation_rate_exact(cfg, 3.7, 1.0) ==
              Catch::Approx(3.7 * exact_refs[3].rate).epsilon(1e-12));

        // same ratio b/a, different absolute scale
        OscillatorOracleConfig scaled;
        scaled.b = 0.6;
        CHECK(excitation_rate_exact(scaled, 1.0, 2.0) ==
              Catch::Approx(exact_refs[3].rate).epsilon(1e-10));
    }

    SECTION("argument validation")
    {
        OscillatorOracleConfig cfg;
        CHECK_THROWS_AS(excitation_rate_exact(cfg, -1.0, 1.0), std::domain_error);
        CHECK_THROWS_AS(excitation_rate_exact(cfg, 1.0, 0.0), std::domain_error);
        cfg.b = -0.1;
        CHECK_THROWS_AS(excitation_rate_exact(cfg, 1.0, 1.0), config_error);
    }
}

TEST_CASE("series accuracy degrades quadratically in the size ratio")
{
    // relative deviation of the closed form from the full quadrature
    auto dev = [](double b) {
        OscillatorOracleConfig cfg;
        cfg.b = b;
        return excitation_rate_exact(cfg, 1.0, 1.0) / series_rate(b, 1.0, 1.0) - 1.0;
    };

    const double d001 = dev(0.01);
    const double d003 = dev(0.03);
    const double d010 = dev(0.1);

    // small systems: the formula is good to a part in 1e4
    CHECK(std::abs(d001) < 1e-4);
    CHECK(d001 == Catch::Approx(-4.3748769559448e-5).epsilon(1e-6));
    CHECK(d003 == Catch::Approx(-3.9365035258401e-4).epsilon(1e-6));
    CHECK(d010 == Catch::Approx(-4.3627234535717e-3).epsilon(1e-6));

    // leading deviation is -(7/16) (b/a)^2
    CHECK(d001 / (0.01 * 0.01) == Catch::Approx(-7.0 / 16.0).epsilon(1e-4));

    // order of convergence measured over a decade and over a finer step
    const double slope_decade = std::log(std::abs(d010) / std::abs(d001)) / std::log(10.0);
    const double slope_fine = std::log(std::abs(d003) / std::abs(d001)) / std::log(3.0);
    CHECK(slope_decade > 1.8);
    CHECK(slope_decade < 2.2);
    CHECK(slope_fine == Catch::Approx(2.0).margin(0.01));
}

TEST_CASE("excitation rates do not depend on the magnetic quantum number")
{
    OscillatorOracleConfig base;
    base.b = 0.3;
    const double series0 = excitation_rate_series(oscillator_second_moments(base), 1.0, 1.0);
    const double exact0 = excitation_rate_exact(base, 1.0, 1.0);
    for (int m = -2; m <= 2; ++m) {
        OscillatorOracleConfig cfg = base;
        cfg.m_final = m;
        CHECK(excitation_rate_series(oscillator_second_moments(cfg), 1.0, 1.0) ==
              Catch::Approx(series0).epsilon(1e-14));
        CHECK(excitation_rate_exact(cfg, 1.0, 1.0) == Catch::Approx(exact0).epsilon(1e-12));
    }
}

TEST_CASE("tachyonic rate routes agree with each other and the references")
{
    struct Row {
        double b, k, a;
        double general;  // position/momentum routes, pinned quadrature
        double series;   // small-k closed form
    };
    const Row rows[] = {
        {1.0, 0.3, 100.0, 1.0172079570150988e-4, 1.028729017823553327e-4},
        {1.0, 0.01, 1000.0, 4.32799713280538823e-11, 4.3280517741141124342e-11},
        {1.0, 2.0, 50.0, 0.40977797132807366, 0.6756434389203480777},
        {0.5, 0.6, 200.0, 4.0583034882421169e-4, 4.1042203891925200326e-4},
    };

    for (const auto& r : rows) {
        OscillatorOracleConfig cfg;
        cfg.b = r.b;
        const double sp = rcsl_rate_general(cfg, r.k, 1.0, r.a, RcslRoute::sinc_position);
        const double mo = rcsl_rate_general(cfg, r.k, 1.0, r.a, RcslRoute::momentum_shell);
        const double se = rcsl_rate_general(cfg, r.k, 1.0, r.a, RcslRoute::small_k_series);

        CHECK(sp == Catch::Approx(r.general).epsilon(1e-10));
        CHECK(mo == Catch::Approx(r.general).epsilon(1e-8));
        CHECK(mo == Catch::Approx(sp).epsilon(1e-6));  // fully independent reductions
        CHECK(se == Catch::Approx(r.series).epsilon(1e-12));
    }

    SECTION("series error is small when k_eff b is small and quadratic in it")
    {
        // k_eff b = 1e-2 up to the 1/a floor: closed form good to 1e-4
        OscillatorOracleConfig cfg;
        cfg.b = 1.0;
        const double gen = rcsl_rate_general(cfg, 0.01, 1.0, 1000.0, RcslRoute::momentum_shell);
        const double ser = rcsl_rate_general(cfg, 0.01, 1.0, 1000.0, RcslRoute::small_k_series);
        CHECK(std::abs(gen / ser - 1.0) < 1e-4);

        // deviation tracks -(k_eff b)^2 / 8
        const double keff = std::hypot(0.3, 1.0 / 100.0);
        const double gen2 = rcsl_rate_general(cfg, 0.3, 1.0, 100.0, RcslRoute::sinc_position);
        const double ser2 = rcsl_rate_general(cfg, 0.3, 1.0, 100.0, RcslRoute::small_k_series);
        CHECK(gen2 / ser2 - 1.0 ==
              Catch::Approx(-keff * keff * cfg.b * cfg.b / 8.0).epsilon(0.1));
    }

    SECTION("route label round trip")
    {
        CHECK(std::string(to_string(RcslRoute::sinc_position)) == "sinc_position");
        CHECK(std::string(to_string(RcslRoute::momentum_shell)) == "momentum_shell");
        CHECK(std::string(to_string(RcslRoute::small_k_series)) == "small_k_series");
    }
}

TEST_CASE("tachyonic excitation persists as the transition energy vanishes")
{
    OscillatorOracleConfig cfg;
    cfg.b = 1.0;  // bracket = b^4 / 4 = 1/4

    // k << 1/a: the rate floors at the k_eff = 1/a value instead of dying
    const double floored = rcsl_rate_general(cfg, 1e-9, 1.0, 100.0, RcslRoute::small_k_series);
    const double expected = 1.0 * 100.0 * std::pow(1.0 / 100.0, 5) * (1.0 / 4.0) /
                            (60.0 * M_PI * M_PI);
    CHECK(floored == Catch::Approx(expected).epsilon(1e-10));

    // monotone in the true transition wavenumber
    const double r1 = rcsl_rate_general(cfg, 0.3, 1.0, 100.0, RcslRoute::small_k_series);
    const double r2 = rcsl_rate_general(cfg, 0.5, 1.0, 100.0, RcslRoute::small_k_series);
    CHECK(floored < r1);
    CHECK(r1 < r2);

    SECTION("ratio to the gaussian-noise rate is (4/15)(a k_eff)^5 / pi^2")
    {
        const double keff = std::hypot(0.3, 1.0 / 100.0);
        const double tachyonic = rcsl_rate_general(cfg, 0.3, 1.0, 100.0, RcslRoute::small_k_series);
        const double gaussian = excitation_rate_series(oscillator_second_moments(cfg), 1.0, 100.0);
        const double predicted = (4.0 / 15.0) * std::pow(100.0 * keff, 5) / (M_PI * M_PI);
        CHECK(tachyonic / gaussian == Catch::Approx(predicted).epsilon(1e-12));
    }

    SECTION("argument validation")
    {
        CHECK_THROWS_AS(rcsl_rate_general(cfg, 0.0, 1.0, 1.0), std::domain_error);
        CHECK_THROWS_AS(rcsl_rate_general(cfg, -1.0, 1.0, 1.0), std::domain_error);
        CHECK_THROWS_AS(rcsl_rate_general(cfg, 1.0, -1.0, 1.0), std::domain_error);
        CHECK_THROWS_AS(rcsl_rate_general(cfg, 1.0, 1.0, 0.0), std::domain_error);
        OscillatorOracleConfig bad;
        bad.b = -1.0;
        CHECK_THROWS_AS(rcsl_rate_general(bad, 1.0, 1.0, 1.0), config_error);
    }
}

TEST_CASE("hypothetical strength and implied lifetime give identical rates")
{
    const NucleusSpec nucleus;
    const ModelParams params;

    // the strength cancels exactly between the rate and the lifetime routes
    std::mt19937 gen(20260823u);
    std::uniform_real_distribution<double> log_s(-60.0, -40.0);
    for (int i = 0; i < 100; ++i) {
        const QuadrupoleStrength s{std::pow(10.0, log_s(gen))};
        const auto qc = quadrupole_consistency(s, nucleus, params);
        CHECK(qc.rate_from_lifetime ==
              Catch::Approx(qc.rate_from_strength).epsilon(1e-12));
        CHECK(qc.implied_lifetime > 0.0);
        CHECK(std::isfinite(qc.implied_lifetime));
    }

    SECTION("rate is linear in the strength, lifetime inverse in it")
    {
        const auto one = quadrupole_consistency({4.2e-52}, nucleus, params);
        const auto ten = quadrupole_consistency({4.2e-51}, nucleus, params);
        CHECK(ten.rate_from_strength ==
              Catch::Approx(10.0 * one.rate_from_strength).epsilon(1e-14));
        CHECK(ten.implied_lifetime ==
              Catch::Approx(one.implied_lifetime / 10.0).epsilon(1e-14));
    }

    SECTION("vanishing strength")
    {
        const auto off = quadrupole_consistency({0.0}, nucleus, params);
        CHECK(off.rate_from_strength == 0.0);
        CHECK(off.rate_from_lifetime == 0.0);
        CHECK(std::isinf(off.implied_lifetime));
        CHECK_THROWS_AS(quadrupole_consistency({-1.0}, nucleus, params), config_error);
    }
}

TEST_CASE("germanium predictions match the pinned references and the measured bound")
{
    const NucleusSpec ge;
    const ModelParams grw;  // lambda 1e-16, a 1e-5

    CHECK(quadrupole_rate_qrcsl_per_nucleus(ge, grw) ==
          Catch::Approx(4.7565390350238784e-46).epsilon(1e-12));
    CHECK(quadrupole_rate_rcsl_per_nucleus(ge, grw) ==
          Catch::Approx(4.3123097034754004e-20).epsilon(1e-12));

    const double qr = quadrupole_rate_qrcsl(ge, grw);
    const double rc = quadrupole_rate_rcsl(ge, grw);
    CHECK(qr == Catch::Approx(1.2328949178781893e-16).epsilon(1e-12));
    CHECK(rc == Catch::Approx(1.1177506751408238e10).epsilon(1e-12));

    // order of magnitude of the published estimates
    CHECK(qr > 5e-16 / 5.0);
    CHECK(qr < 5e-16 * 5.0);
    CHECK(rc > 5e10 / 5.0);
    CHECK(rc < 5e10 * 5.0);

    // gaussian noise: far below the counting bound; tachyonic: far above
    CHECK(qr < excitation_counts_bound * 1e-10);
    CHECK(rc > excitation_counts_bound * 1e10);

    SECTION("alternative isotope abundance")
    {
        NucleusSpec rich = ge;
        rich.nuclei_per_kg = 8.3e24;
        CHECK(quadrupole_rate_qrcsl(rich, grw) ==
              Catch::Approx(3.4110092727963236e-16).epsilon(1e-12));
        CHECK(quadrupole_rate_rcsl(rich, grw) ==
              Catch::Approx(3.0924435345562791e10).epsilon(1e-12));
    }

    SECTION("variant ratio is (4/15)(a k)^5 / pi^2")
    {
        const double ratio = rc / qr;
        const double predicted =
            (4.0 / 15.0) * std::pow(grw.a * ge.k, 5) / (M_PI * M_PI);
        CHECK(ratio == Catch::Approx(predicted).epsilon(1e-12));
        CHECK(ratio == Catch::Approx(9.0660660444968935e25).epsilon(1e-12));
    }
}

TEST_CASE("exclusion scan flags the tachyonic variant only")
{
    const NucleusSpec ge;

    SECTION("reference parameter point")
    {
        const auto rows = exclusion_scan({1e-16}, {1e-5}, ge);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].lambda == 1e-16);
        CHECK(rows[0].a == 1e-5);
        CHECK(rows[0].qrcsl_counts == Catch::Approx(1.2328949178781893e-16).epsilon(1e-12));
        CHECK(rows[0].rcsl_counts == Catch::Approx(1.1177506751408238e10).epsilon(1e-12));
        CHECK_FALSE(rows[0].qrcsl_excluded);
        CHECK(rows[0].rcsl_excluded);
    }

    SECTION("a much weaker coupling escapes the bound for both variants")
    {
        const auto rows = exclusion_scan({1e-29}, {1e-5}, ge);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].rcsl_counts == Catch::Approx(1.1177506751408238e-3).epsilon(1e-10));
        CHECK_FALSE(rows[0].rcsl_excluded);
        CHECK_FALSE(rows[0].qrcsl_excluded);
    }

    SECTION("grid order is lambda-major with a cycling fastest")
    {
        const auto rows = exclusion_scan({1e-17, 1e-16}, {1e-5, 2e-5, 4e-5}, ge);
        REQUIRE(rows.size() == 6);
        CHECK(rows[0].lambda == 1e-17);
        CHECK(rows[2].lambda == 1e-17);
        CHECK(rows[3].lambda == 1e-16);
        CHECK(rows[0].a == 1e-5);
        CHECK(rows[1].a == 2e-5);
        CHECK(rows[2].a == 4e-5);
        CHECK(rows[3].a == 1e-5);
    }

    SECTION("degenerate and invalid inputs")
    {
        CHECK(exclusion_scan({}, {1e-5}, ge).empty());
        CHECK(exclusion_scan({1e-16}, {}, ge).empty());
        CHECK_THROWS_AS(exclusion_scan({-1e-16}, {1e-5}, ge), config_error);
        CHECK_THROWS_AS(exclusion_scan({1e-16}, {0.0}, ge), config_error);
    }
}

TEST_CASE("nucleus data validation lists every problem")
{
    CHECK(NucleusSpec{}.validation_errors().empty());
    CHECK_NOTHROW(NucleusSpec{}.validate());

    NucleusSpec bad;
    bad.k = 0.0;
    bad.tau = -1.0;
    bad.nuclei_per_kg = 0.0;
    const auto errs = bad.validation_errors();
    CHECK(errs.size() == 3);
    CHECK_THROWS_AS(bad.validate(), config_error);
    try {
        bad.validate();
    } catch (const config_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("wavenumber") != std::string::npos);
        CHECK(msg.find("lifetime") != std::string::npos);
        CHECK(msg.find("nuclei_per_kg") != std::string::npos);
    }
}
