#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "qrcsl/errors.hpp"

// Desk-scale stand-in for a bound many-body system: two particles in a 3-d
// isotropic oscillator, center of mass pinned at the origin so the particle
// positions are +-r/2 in the relative coordinate.  The transition studied is
// (n=0, l=0) -> (n=0, l=2, m); it has a vanishing monopole element and a
// closed-form quadrupole element, which is exactly what the excitation-rate
// formulas need exercised.

namespace qrcsl {

struct OscillatorOracleConfig {
    double b = 0.01;   // oscillator length scale, same units as the collapse length
    int m_final = 0;   // magnetic quantum number of the l=2 final state
    int l_initial = 0;
    int l_final = 2;

    void validate() const
    {
        if (!(b > 0.0)) throw config_error("oscillator: length scale b must be positive");
        if (l_initial == l_final)
            throw std::domain_error("oscillator: initial and final states are identical; "
                                    "the transition requires orthogonal states");
        if (l_initial != 0 || l_final != 2)
            throw config_error("oscillator: only the (0,0) -> (0,2,m) transition is provided");
        if (m_final < -2 || m_final > 2)
            throw config_error("oscillator: m_final must lie in [-2, 2]");
    }
};

// Matrix elements of sum_n X_n^2 and sum_n X_n^i X_n^j between the initial
// and final states, plus their overlap.  This is all the data the
// second-order rate formula consumes; callers with their own states can fill
// it directly.
struct SecondMomentData {
    std::complex<double> overlap{0.0, 0.0};
    std::complex<double> sum_x2{0.0, 0.0};
    std::array<std::complex<double>, 9> sum_xixj{};  // row-major 3x3

    std::complex<double>& xixj(int i, int j) { return sum_xixj[static_cast<std::size_t>(3 * i + j)]; }
    const std::complex<double>& xixj(int i, int j) const
    {
        return sum_xixj[static_cast<std::size_t>(3 * i + j)];
    }
};

// Closed-form second moments for the oscillator transition.  The radial
// factor is <0,2| r^2 |0,0> = b^2 sqrt(15/16pi); the angular factors are the
// l=2 projections of n^i n^j, which depend on m but always satisfy
// sum_ij |M_ij|^2 = (radial/2)^2 * 8pi/15, so every rate built from them is
// m-independent.
inline SecondMomentData oscillator_second_moments(const OscillatorOracleConfig& cfg)
{
    cfg.validate();
    const double radial = 0.25 * cfg.b * cfg.b * std::sqrt(15.0 / M_PI);
    const double kap = 0.5 * radial * std::sqrt(2.0 * M_PI / 15.0);
    const double pent = 0.5 * radial * (2.0 / 15.0) * std::sqrt(5.0 * M_PI);
    const std::complex<double> i_kap(0.0, kap);

    SecondMomentData d;
    switch (cfg.m_final) {
    case 0:
        d.xixj(0, 0) = -pent;
        d.xixj(1, 1) = -pent;
        d.xixj(2, 2) = 2.0 * pent;
        break;
    case 1:
        d.xixj(0, 2) = d.xixj(2, 0) = -kap;
        d.xixj(1, 2) = d.xixj(2, 1) = i_kap;
        break;
    case -1:
        d.xixj(0, 2) = d.xixj(2, 0) = kap;
        d.xixj(1, 2) = d.xixj(2, 1) = i_kap;
        break;
    case 2:
        d.xixj(0, 0) = kap;
        d.xixj(1, 1) = -kap;
        d.xixj(0, 1) = d.xixj(1, 0) = -i_kap;
        break;
    case -2:
        d.xixj(0, 0) = kap;
        d.xixj(1, 1) = -kap;
        d.xixj(0, 1) = d.xixj(1, 0) = i_kap;
        break;
    }
    return d;
}

} // namespace qrcsl
