#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "qrcsl/errors.hpp"
#include "qrcsl/excitation/oscillator.hpp"
#include "qrcsl/numerics/bessel.hpp"
#include "qrcsl/numerics/quadrature.hpp"

// Bound-state excitation rates driven by the collapse noise.
//
// The second-order formula needs only the states' second position moments:
//   Gamma = lambda (2a)^-4 [ |<f|sum X^2|i>|^2 + 2 sum_ij |<f|sum X^i X^j|i>|^2 ]
// Its parent expression keeps the full Gaussian coupling of width a between
// the two copies of the system; for the oscillator stand-in that reduces,
// after the angular integrals are done analytically, to a double radial
// quadrature with a modified spherical Bessel kernel:
//   Gamma = lambda (256/15pi) II x^4 y^4 e^{-x^2-y^2-beta^2(x-y)^2/16}
//                               e^{-z} i2(z) dx dy,  z = beta^2 x y / 8
// with x = r/b and beta = b/a.  Splitting off e^{-z} i2(z) as one factor
// keeps every exponent nonpositive, so the integrand never overflows at any
// b/a.
//
// The tachyonic-noise variant replaces the Gaussian of width a by an
// oscillatory kernel of width 1/k, with k_eff = sqrt(k^2 + 1/a^2) (the noise
// spectrum keeps exciting even as the transition energy k goes to zero).
// Three routes are provided: the position-space kernel with a numerically
// projected angular integral, the momentum-shell form with its own angular
// projection, and the small-k series; agreement between them is the check
// that the angular reduction is right.

namespace qrcsl {

inline double excitation_rate_series(const SecondMomentData& data, double lambda, double a)
{
    if (!(lambda >= 0.0)) throw std::domain_error("excitation rate: lambda must be nonnegative");
    if (!(a > 0.0)) throw std::domain_error("excitation rate: collapse length must be positive");
    if (std::abs(data.overlap) > 1e-12)
        throw std::domain_error("excitation rate: initial and final states must be orthogonal");

    double cross = 0.0;
    for (const std::complex<double>& m : data.sum_xixj) cross += std::norm(m);
    const double bracket = std::norm(data.sum_x2) + 2.0 * cross;
    const double w = 2.0 * a;
    return lambda / (w * w * w * w) * bracket;
}

inline double excitation_rate_exact(const OscillatorOracleConfig& cfg, double lambda, double a)
{
    cfg.validate();
    if (!(lambda >= 0.0)) throw std::domain_error("excitation rate: lambda must be nonnegative");
    if (!(a > 0.0)) throw std::domain_error("excitation rate: collapse length must be positive");

    // radial variables in units of b decay at least as fast as e^{-x^2}
    // whatever b/a is, so [0, 28] is the whole support at double precision
    const double beta = cfg.b / a;
    const double c16 = beta * beta / 16.0;
    const double z8 = beta * beta / 8.0;
    auto inner = [&](double x) {
        // rows this far out are below 1e-170 of the peak; integrating them
        // anyway would ask for relative accuracy of a denormal-sized value
        if (x * x > 400.0) return 0.0;
        return quad_adaptive(
                   [&](double y) {
                       // e^{-alpha(x^2+y^2)} e^{z} collapses to this exponent,
                       // nonpositive for every x, y, beta
                       const double d = x - y;
                       const double z = z8 * x * y;
                       const double ex = -x * x - y * y - c16 * d * d;
                       if (ex < -700.0) return 0.0;  // underflow before x^4 can overflow
                       const double x2 = x * x, y2 = y * y;
                       return x2 * x2 * y2 * y2 * std::exp(ex) * modified_spherical_i2_scaled(z);
                   },
                   0.0, 28.0, 1e-11)
            .value;
    };
    const double dbl =
        quad_adaptive(inner, 0.0, 28.0, 1e-9).value;
    return lambda * 256.0 / (15.0 * M_PI) * dbl;
}

enum class RcslRoute { sinc_position, momentum_shell, small_k_series };

inline const char* to_string(RcslRoute r)
{
    switch (r) {
    case RcslRoute::sinc_position: return "sinc_position";
    case RcslRoute::momentum_shell: return "momentum_shell";
    case RcslRoute::small_k_series: return "small_k_series";
    }
    return "?";
}

namespace detail {

// l=2 Legendre projection of f(cos): (integrates f * (3c^2-1)/2 over [-1,1])
template <class F>
double legendre2_project(F&& f)
{
    using gauss = boost::math::quadrature::gauss<double, 48>;
    return gauss::integrate([&](double c) { return f(c) * 0.5 * (3.0 * c * c - 1.0); }, -1.0,
                            1.0);
}

} // namespace detail

inline double rcsl_rate_general(const OscillatorOracleConfig& cfg, double k, double lambda,
                                double a, RcslRoute route = RcslRoute::sinc_position)
{
    cfg.validate();
    if (!(k > 0.0)) throw std::domain_error("excitation rate: transition wavenumber must be positive");
    if (!(lambda >= 0.0)) throw std::domain_error("excitation rate: lambda must be nonnegative");
    if (!(a > 0.0)) throw std::domain_error("excitation rate: collapse length must be positive");

    const double keff = std::hypot(k, 1.0 / a);
    const double b = cfg.b;

    if (route == RcslRoute::small_k_series) {
        const SecondMomentData d = oscillator_second_moments(cfg);
        double cross = 0.0;
        for (const std::complex<double>& m : d.sum_xixj) cross += std::norm(m);
        const double bracket = std::norm(d.sum_x2) + 2.0 * cross;
        const double k5 = keff * keff * keff * keff * keff;
        return lambda * a * k5 * bracket / (60.0 * M_PI * M_PI);
    }

    if (route == RcslRoute::momentum_shell) {
        // shell average of the squared transition form factor; the angular
        // plane-wave projection is done by quadrature, not in closed form
        const double j = quad_adaptive(
                             [&](double x) {
                                 const double x2 = x * x;
                                 if (x2 > 700.0) return 0.0;
                                 const double z = keff * b * x;
                                 const double q = detail::legendre2_project(
                                     [&](double c) { return 2.0 * std::cos(0.5 * z * c); });
                                 return x2 * x2 * std::exp(-x2) * q;
                             },
                             0.0, 28.0, 1e-11)
                             .value;
        const double jj = 4.0 / (std::sqrt(15.0) * M_PI) * j;
        return lambda * a * keff * jj * jj / M_PI;
    }

    // position route: oscillatory pair kernel, angular integral projected
    // numerically at each radial pair.  The projection annihilates the first
    // two Taylor terms of the kernel (constant and linear in c, integrated
    // exactly by the Gauss rule), so they are dropped before projecting;
    // keeping them buries the small-k signal under rounding noise.
    auto pair_kernel = [&](double x, double y) {
        return detail::legendre2_project([&](double c) {
            const double s2 = b * b * (x * x + y * y - 2.0 * x * y * c);
            const double t = 0.25 * keff * keff * std::max(s2, 0.0);
            if (t < 1.0) {
                double term = t * t / 120.0, sum = term;
                for (int n = 2; std::abs(term) > 1e-18 * std::abs(sum); ++n) {
                    term *= -t / ((2.0 * n + 2.0) * (2.0 * n + 3.0));
                    sum += term;
                }
                return keff * sum;
            }
            const double u = std::sqrt(t);
            return keff * (std::sin(u) / u - 1.0 + t / 6.0);
        });
    };
    // fixed composite grids at two resolutions instead of adaptive
    // refinement: the near-axis rows carry benign rounding noise that defeats
    // pointwise certification but is measure-weighted out of the total
    auto grid_value = [&](int panels) {
        using panel = boost::math::quadrature::gauss<double, 20>;
        const double h = 8.0 / panels;
        double total = 0.0;
        for (int i = 0; i < panels; ++i)
            total += panel::integrate(
                [&](double x) {
                    double row = 0.0;
                    for (int j = 0; j < panels; ++j)
                        row += panel::integrate(
                            [&](double y) {
                                const double x2 = x * x, y2 = y * y;
                                return x2 * x2 * y2 * y2 *
                                       std::exp(-x2 - y2) * pair_kernel(x, y);
                            },
                            j * h, (j + 1) * h);
                    return row;
                },
                i * h, (i + 1) * h);
        return total;
    };
    const double coarse = grid_value(5);
    const double fine = grid_value(10);
    if (std::abs(fine - coarse) > 1e-9 * std::max(std::abs(fine), 1e-300))
        throw accuracy_error(
            "rcsl_rate_general[sinc_position]: grid refinement did not converge",
            fine, std::abs(fine - coarse));
    return 128.0 * lambda * a / (15.0 * M_PI * M_PI * M_PI) * fine;
}

} // namespace qrcsl
