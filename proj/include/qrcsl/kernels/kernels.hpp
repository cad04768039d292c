#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

#include "qrcsl/numerics/bessel.hpp"
#include "qrcsl/numerics/quadrature.hpp"

// Momentum-space and position-space kernels in collapse units (lengths in a,
// momenta in 1/a, hbar = c = 1, E = sqrt(p^2 + mu^2)).
//
// Radial reductions used by the quadrature paths (azimuthal symmetry, c =
// cos of the angle between p1 and p2):
//
//   relative-momentum invariant:   q2(p1, p2) = 2 (E1 E2 - p1.p2 - mu^2)
//
//   Int d3p2 / E2 exp(-q2)
//     = 2 pi Int_0^inf dp2 (p2^2/E2) e^{-2(E1 E2 - mu^2)} Int_-1^1 dc e^{2 p1 p2 c}
//     = 2 pi Int_0^inf dp2 (p2^2/E2) e^{-2(E1 E2 - mu^2 - p1 p2)}
//                                     (1 - e^{-4 p1 p2}) / (2 p1 p2)
//   and the same without the 1/E2 measure factor.  Both inner exponents are
//   <= 0 for on-shell momenta (E1 E2 - p1 p2 >= mu^2), so nothing overflows;
//   the (1 - e^{-x})/x factor is evaluated with expm1.
//
//   Int d3p / E e^{i p.r} = (4 pi / r) Int_0^inf dp (p/E) sin(p r)
//   with the Abel-regularized identity Int_0^inf sin(p r) dp = 1/r splitting
//   off the non-decaying part; the remainder (p/E - 1) falls like 1/p^2 and
//   is handled by Ooura's Fourier-sin rule.

namespace qrcsl {

enum class KernelUnits { dimensionless, per_area, per_volume };
enum class KernelMethod { closed_form, quadrature, monte_carlo };

struct KernelValue {
    double value;
    KernelUnits units;
    KernelMethod method;
};

/// Equal-time commutator amplitude at spacelike invariant separation s:
/// mass^2 K1(mass*s) / (2 pi^2 s).  Diverges as mass/(2 pi^2 s^2) at s -> 0.
inline KernelValue commutator_kernel(double s, double mass)
{
    if (!(s > 0.0))
        throw std::domain_error("commutator_kernel: separation must be spacelike (s > 0)");
    if (!(mass > 0.0)) throw std::domain_error("commutator_kernel: mass must be positive");
    const double z = mass * s;
    const double v = mass * mass / (2.0 * M_PI * M_PI * s) * std::exp(-z) * bessel_k1_scaled(z);
    return {v, KernelUnits::per_volume, KernelMethod::closed_form};
}

namespace detail {

/// Int_-1^1 dc e^{2 p1 p2 c} folded with e^{-2(E1 E2 - mu^2)}; stable for
/// all on-shell arguments including p1 p2 -> 0.
inline double angular_factor(double e1e2_minus_mu2, double p1p2)
{
    const double x = -2.0 * (e1e2_minus_mu2 - p1p2);
    if (x < -740.0) return 0.0;
    if (p1p2 < 1e-12) return 2.0 * std::exp(x - 2.0 * p1p2);  // limit of the ratio below
    return std::exp(x) * (-std::expm1(-4.0 * p1p2)) / (2.0 * p1p2);
}

template <bool WithEnergyMeasure>
double onshell_gaussian_quadrature(double p1, double mu, double rel_tol)
{
    const double e1 = std::hypot(p1, mu);
    const double upper = p1 + 40.0 * std::max({e1 / mu, 1.0, 19.0 / mu});
    auto f = [=](double p2) {
        const double e2 = std::hypot(p2, mu);
        const double af = angular_factor(e1 * e2 - mu * mu, p1 * p2);
        if (af == 0.0) return 0.0;
        const double meas = WithEnergyMeasure ? p2 * p2 / e2 : p2 * p2;
        return 2.0 * M_PI * meas * af;
    };
    return quad_adaptive(f, 0.0, upper, rel_tol).value;
}

} // namespace detail

/// Gaussian of the on-shell relative-momentum invariant integrated over
/// d3p2/E2.  Closed form 2 pi e^{2 mu^2} K1(2 mu^2); a Lorentz scalar, so
/// the quadrature value is independent of p1.
inline KernelValue gaussian_onshell_integral(double p1, double mu,
                                             KernelMethod method = KernelMethod::closed_form,
                                             double rel_tol = 1e-9)
{
    if (!(mu > 0.0)) throw std::domain_error("gaussian_onshell_integral: mu must be positive");
    if (!(p1 >= 0.0)) throw std::domain_error("gaussian_onshell_integral: p1 must be >= 0");
    if (method == KernelMethod::closed_form)
        return {2.0 * M_PI * bessel_k1_scaled(2.0 * mu * mu), KernelUnits::per_area, method};
    return {detail::onshell_gaussian_quadrature<true>(p1, mu, rel_tol),
            KernelUnits::per_area, KernelMethod::quadrature};
}

/// Same Gaussian without the 1/E2 measure factor.  Closed form
/// 2 pi E1 [K0(2 mu^2) + K1(2 mu^2)/mu^2] e^{2 mu^2}, proportional to E1.
/// p1_energy is E1 in units of the particle mass (>= 1 on shell).
inline KernelValue gaussian_nomeasure_integral(double p1_energy, double mu,
                                               KernelMethod method = KernelMethod::closed_form,
                                               double rel_tol = 1e-9)
{
    if (!(mu > 0.0)) throw std::domain_error("gaussian_nomeasure_integral: mu must be positive");
    if (!(p1_energy >= 1.0))
        throw std::domain_error("gaussian_nomeasure_integral: E1 must be >= M (on shell)");
    const double e1 = p1_energy * mu;                    // in units of 1/a
    if (method == KernelMethod::closed_form) {
        const double z = 2.0 * mu * mu;
        const double bracket = bessel_k0_scaled(z) + bessel_k1_scaled(z) / (mu * mu);
        return {2.0 * M_PI * e1 * bracket, KernelUnits::per_volume, method};
    }
    const double p1 = mu * std::sqrt(std::max(0.0, p1_energy * p1_energy - 1.0));
    return {detail::onshell_gaussian_quadrature<false>(p1, mu, rel_tol),
            KernelUnits::per_volume, KernelMethod::quadrature};
}

/// Fourier transform of the on-shell measure at separation r:
/// 4 pi mass K1(mass*r) / r.  The quadrature path is reliable for
/// mass*r up to ~10; beyond that the Abel-split terms cancel.
inline KernelValue fourier_onshell_kernel(double r, double mass,
                                          KernelMethod method = KernelMethod::closed_form)
{
    if (!(r > 0.0)) throw std::domain_error("fourier_onshell_kernel: r must be positive");
    if (!(mass > 0.0)) throw std::domain_error("fourier_onshell_kernel: mass must be positive");
    if (method == KernelMethod::closed_form) {
        const double z = mass * r;
        return {4.0 * M_PI * mass / r * std::exp(-z) * bessel_k1_scaled(z),
                KernelUnits::per_area, method};
    }
    boost::math::quadrature::ooura_fourier_sin<double> rule(1e-10, 12);
    auto decaying = [=](double p) { return p / std::hypot(p, mass) - 1.0; };
    const auto [osc, rel_err] = rule.integrate(decaying, r);
    (void)rel_err;
    return {4.0 * M_PI / r * (1.0 / r + osc), KernelUnits::per_area, KernelMethod::quadrature};
}

/// Volume integral Int d3z K1(mass |z|)/|z| = 2 pi^2 / mass^2, evaluated by
/// quadrature (the closed value is what delta-normalization requires).
inline KernelValue fourier_kernel_volume_integral(double mass, double rel_tol = 1e-9)
{
    if (!(mass > 0.0))
        throw std::domain_error("fourier_kernel_volume_integral: mass must be positive");
    auto f = [=](double s) {
        const double z = mass * s;
        if (z > 740.0) return 0.0;
        return 4.0 * M_PI * s * std::exp(-z) * bessel_k1_scaled(z);
    };
    const double upper = 760.0 / mass;
    return {quad_adaptive(f, 0.0, upper, rel_tol).value, KernelUnits::per_area,
            KernelMethod::quadrature};
}

/// On-shell relative-momentum invariant q2 = 2(E1 E2 - p1.p2 - mu^2) for
/// three-vectors p1, p2.  Spacelike (>= 0), zero only at p1 = p2.
inline double onshell_invariant(const double p1[3], const double p2[3], double mu)
{
    const double n1 = std::sqrt(p1[0] * p1[0] + p1[1] * p1[1] + p1[2] * p1[2]);
    const double n2 = std::sqrt(p2[0] * p2[0] + p2[1] * p2[1] + p2[2] * p2[2]);
    const double e1 = std::hypot(n1, mu), e2 = std::hypot(n2, mu);
    const double dot = p1[0] * p2[0] + p1[1] * p2[1] + p1[2] * p2[2];
    return 2.0 * (e1 * e2 - dot - mu * mu);
}

} // namespace qrcsl
