#pragma once

#include <cmath>
#include <stdexcept>

// Slow, independent reference for the scaled modified Bessel functions
// e^z K0(z) and e^z K1(z).  Deliberately shares no code or method with the
// production Chebyshev-table implementation:
//   z < 2      ascending series around z = 0 (with log and digamma terms)
//   2..50      composite Simpson on e^z K_nu(z) = Int_0^inf e^{-z(cosh t - 1)} cosh(nu t) dt
//   z > 50     large-argument asymptotic series, summed to convergence
// Accuracy is a few 1e-14 relative, which is enough to certify the fast path.

namespace bessel_reference {

inline constexpr double euler_gamma = 0.57721566490153286061;

namespace detail {

inline double series_k0e(double z)
{
    // K0 = -(log(z/2)+gamma) I0 + sum_{k>=1} (z^2/4)^k H_k / (k!)^2
    const double q = 0.25 * z * z;
    double i0 = 1.0, term = 1.0;
    double corr = 0.0, hk = 0.0;
    for (int k = 1; k <= 40; ++k) {
        term *= q / (static_cast<double>(k) * k);
        i0 += term;
        hk += 1.0 / k;
        corr += term * hk;
        if (term < 1e-20) break;
    }
    return std::exp(z) * (-(std::log(0.5 * z) + euler_gamma) * i0 + corr);
}

inline double series_k1e(double z)
{
    // K1 = 1/z + log(z/2) I1 - (z/4) sum_{k>=0} [psi(k+1)+psi(k+2)] (z^2/4)^k / (k! (k+1)!)
    const double q = 0.25 * z * z;
    double i1 = 1.0, term = 1.0;     // I1 = (z/2) * sum term_k, term_0 = 1
    double psum = -2.0 * euler_gamma + 1.0;  // psi(1)+psi(2), digamma via harmonic numbers
    double corr = psum;
    for (int k = 1; k <= 40; ++k) {
        term *= q / (static_cast<double>(k) * (k + 1));
        i1 += term;
        psum += 1.0 / k + 1.0 / (k + 1);
        corr += term * psum;
        if (term < 1e-20) break;
    }
    i1 *= 0.5 * z;
    return std::exp(z) * (1.0 / z + std::log(0.5 * z) * i1 - 0.25 * z * corr);
}

inline double quad_ke(int nu, double z)
{
    // Simpson on t in [0, T], T chosen so the tail is below 1e-300 relative.
    const double target = 750.0 / z + 1.0;
    const double tmax = std::acosh(target < 1.0 + 1e-12 ? 1.0 + 1e-12 : target);
    const int n = 20000;  // even
    const double h = tmax / n;
    // cosh(t)-1 loses digits near 0; use 2 sinh^2(t/2) instead.
    auto g = [&](double t) {
        const double sh = std::sinh(0.5 * t);
        return std::exp(-z * 2.0 * sh * sh) * std::cosh(nu * t);
    };
    double s = g(0.0) + g(tmax);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * g(i * h);
    return s * h / 3.0;
}

inline double asym_ke(int nu, double z)
{
    // e^z K_nu(z) ~ sqrt(pi/2z) [1 + sum_k a_k / z^k],
    // a_k = prod_{j=1..k} (4 nu^2 - (2j-1)^2) / (k! 8^k)
    const double mu4 = 4.0 * nu * nu;
    double sum = 1.0, term = 1.0;
    for (int k = 1; k <= 30; ++k) {
        term *= (mu4 - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * z);
        const double prev = sum;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum) || sum == prev) break;
    }
    return std::sqrt(M_PI / (2.0 * z)) * sum;
}

} // namespace detail

inline double k0e(double z)
{
    if (!(z > 0.0)) throw std::domain_error("bessel_reference: z must be positive");
    if (z < 2.0) return detail::series_k0e(z);
    if (z <= 50.0) return detail::quad_ke(0, z);
    return detail::asym_ke(0, z);
}

inline double k1e(double z)
{
    if (!(z > 0.0)) throw std::domain_error("bessel_reference: z must be positive");
    if (z < 2.0) return detail::series_k1e(z);
    if (z <= 50.0) return detail::quad_ke(1, z);
    return detail::asym_ke(1, z);
}

} // namespace bessel_reference
