#pragma once

#include <cmath>
#include <vector>

#include "qrcsl/errors.hpp"
#include "qrcsl/free_rates/rate_result.hpp"
#include "qrcsl/kernels/kernels.hpp"
#include "qrcsl/kernels/model_params.hpp"
#include "qrcsl/numerics/bessel.hpp"

// Ensemble energy creation rate for n free particles:
//   dE/dt = lambda n M g(mu),
//   g(mu) = (2 mu / sqrt(pi)) e^{2mu^2} [K0(2mu^2) - K1(2mu^2)(1 - 1/mu^2)]
// The bracket cancels to O(1/mu^2) of either term, so for z = 2 mu^2 above
// 1e4 the evaluation switches to the expanded form
//   g = (3/2)/z + (15/16)/z^2 - (105/256)/z^3 + (945/2048)/z^4 + ...
// whose truncation error there is below 1e-12 relative, while the direct
// difference would have burned ~4 of its 16 digits and keeps losing one per
// decade.  Both branches give g * 4mu^2/3 -> 1 from above.

namespace qrcsl {

inline double energy_rate_g(double mu)
{
    if (!(mu > 0.0)) throw std::domain_error("energy rate: mu must be positive");
    const double z = 2.0 * mu * mu;
    if (z > 1e4) {
        const double zi = 1.0 / z;
        return zi * (1.5 + zi * (15.0 / 16.0 + zi * (-105.0 / 256.0 + zi * 945.0 / 2048.0)));
    }
    const double bracket =
        bessel_k0_scaled(z) - bessel_k1_scaled(z) * (1.0 - 1.0 / (mu * mu));
    return 2.0 * mu / std::sqrt(M_PI) * bracket;
}

/// Occupancy over a grid of momentum magnitudes; weights sum to the
/// particle count.
struct MomentumDistribution {
    std::vector<double> p;  // momentum magnitudes, units 1/a
    std::vector<double> w;  // nonnegative occupancies

    double total() const
    {
        double n = 0.0;
        for (double x : w) n += x;
        return n;
    }

    void validate() const
    {
        if (p.size() != w.size() || p.empty())
            throw config_error("momentum distribution: need matching, nonempty p and w");
        for (double x : w)
            if (!(x >= 0.0)) throw config_error("momentum distribution: weights must be >= 0");
        for (double x : p)
            if (!(x >= 0.0)) throw config_error("momentum distribution: momenta must be >= 0");
        if (!(total() > 0.0)) throw config_error("momentum distribution: total occupancy is zero");
    }
};

inline RateResult energy_rate_exact(double mu, double n, const ModelParams& params)
{
    if (!(n >= 1.0)) throw std::domain_error("energy rate: particle count must be >= 1");
    const double g = energy_rate_g(mu);
    // physical units erg/s: M (1/cm) -> energy via hbar c
    const double phys = params.lambda * n * params.M * params.hbar * params.c * g;
    return {ModelVariant::QRCSL, g, phys, mu, {}};
}

/// The same rate assembled from the occupancy sum: per-particle gain term
/// (the no-measure Gaussian integral, divided by E1) minus the loss term
/// (the on-shell Gaussian integral), both from their closed forms.  The gain
/// term's proportionality to E1 makes the result independent of the
/// distribution, which this routine exhibits rather than assumes.
inline RateResult energy_rate_direct(const MomentumDistribution& dist, double mu,
                                     const ModelParams& params)
{
    dist.validate();
    const double n = dist.total();
    const double loss = gaussian_onshell_integral(0.0, mu).value;  // 2 pi e^{2mu^2} K1
    double gain = 0.0;
    for (std::size_t i = 0; i < dist.p.size(); ++i) {
        const double e1 = std::hypot(dist.p[i], mu);                   // units 1/a
        const double j = gaussian_nomeasure_integral(e1 / mu, mu).value;
        gain += dist.w[i] * j / e1;
    }
    // dE/dt = (lambda mu^2 / pi^{3/2}) [gain - n loss] in units of 1/a;
    // divide by n mu for the g(mu) normalization (units lambda n M)
    const double g = mu * mu / std::pow(M_PI, 1.5) * (gain - n * loss) / (n * mu);
    const double phys = params.lambda * n * params.M * params.hbar * params.c * g;
    return {ModelVariant::QRCSL, g, phys, mu, {}};
}

} // namespace qrcsl
