#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "qrcsl/errors.hpp"
#include "qrcsl/free_rates/rate_result.hpp"
#include "qrcsl/trajectories/grid.hpp"

// Site collapse operators on the periodic lattice.
//
// CSL: A_i is diagonal in position with the smearing profile
//   [A_i]_{jj} = pi^{-1/4} e^{-d(x_i, x_j)^2 / 2}            (min-image d)
// normalized so that B = sum_i dx A_i^2 has unit diagonal (the Riemann sum
// of the squared profile is 1 up to O(e^{-pi^2/dx^2}) lattice terms).
//
// QRCSL: the same operator picks up the relativistic on-shell factors in
// momentum space,
//   [A_i]_{k'k} = base(p' - p) (mu / sqrt(E' E)) e^{(E'-E)^2/2}
//                 e^{-i (p'-p) x_i},   E = sqrt(p^2 + mu^2),
// where base is the periodized transform of the CSL profile,
//   base(q) = (sqrt(2 pi) pi^{-1/4} / L) sum_m e^{-(q + 2 pi m/dx)^2 / 2}.
// The growing energy factor is always dominated: |E'-E| <= |q_m| for every
// reciprocal image q_m (the invariant momentum transfer is spacelike even
// after wrapping), so each combined exponent is <= 0 and the two factors
// are merged before exponentiating.  As mu -> infinity the energy factors
// tend to 1 and the set converges entrywise to the CSL set.
//
// Momentum modes with |p| > p_max are excluded from the QRCSL coupling
// (rows and columns zeroed, preserving Hermiticity); the default p_max is
// the Nyquist momentum, which leaves every lattice mode active.
//
// B = sum_i dx A_i^2 is diagonal in the momentum basis (the site sum
// enforces momentum conservation), which makes the stability bound
// 2 ||B|| exact and cheap in both variants.

namespace qrcsl {

struct CollapseOperatorSet {
    Grid1D grid;
    ModelVariant variant = ModelVariant::CSL;
    double mu = 0.0;     // QRCSL only
    double p_max = 0.0;  // QRCSL only

    // CSL data: symmetric profile matrix [i*n + j] and B's position diagonal
    std::vector<double> profiles;
    std::vector<double> b_position;

    // QRCSL data: real symmetric momentum kernel M [k'*n + k] (site phases
    // are applied separately) and B's momentum diagonal
    std::vector<double> kernel;
    std::vector<double> b_momentum;

    double generator_norm = 0.0;  // 2 ||B||, the stability scale

    int n() const { return grid.n_points; }
    bool quasirelativistic() const { return variant == ModelVariant::QRCSL; }

    double profile(int i, int j) const
    {
        return profiles[static_cast<std::size_t>(i) * n() + j];
    }
    double kernel_at(int kp, int k) const
    {
        return kernel[static_cast<std::size_t>(kp) * n() + k];
    }
};

inline CollapseOperatorSet build_collapse_operators(const Grid1D& grid, ModelVariant variant,
                                                    double mu = 0.0, double p_max = 0.0)
{
    grid.validate();
    if (variant == ModelVariant::RCSL)
        throw config_error("collapse operators: lattice sets exist for CSL and QRCSL only");

    CollapseOperatorSet ops;
    ops.grid = grid;
    ops.variant = variant;
    const int n = grid.n_points;
    const double dx = grid.dx;
    const double L = grid.length();

    ops.profiles.resize(static_cast<std::size_t>(n) * n);
    ops.b_position.assign(static_cast<std::size_t>(n), 0.0);
    const double c_prof = std::pow(M_PI, -0.25);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double d = grid.min_image(grid.site(i) - grid.site(j));
            const double v = c_prof * std::exp(-0.5 * d * d);
            ops.profiles[static_cast<std::size_t>(i) * n + j] = v;
            ops.b_position[static_cast<std::size_t>(j)] += dx * v * v;
        }

    if (variant == ModelVariant::CSL) {
        ops.generator_norm =
            2.0 * *std::max_element(ops.b_position.begin(), ops.b_position.end());
    } else {
        if (!(mu > 0.0)) throw config_error("collapse operators: QRCSL needs mu > 0");
        ops.mu = mu;
        if (p_max == 0.0) p_max = grid.nyquist_momentum();
        const double spacing = grid.mode_spacing();
        const double steps = p_max / spacing;
        if (!(p_max > 0.0) || std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
            throw config_error(
                "collapse operators: p_max must sit on the momentum lattice (a multiple of 2 pi / L)");
        if (p_max > grid.nyquist_momentum() * (1.0 + 1e-12))
            throw config_error("collapse operators: p_max exceeds the Nyquist momentum");
        ops.p_max = p_max;

        std::vector<double> p(static_cast<std::size_t>(n)), e(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) {
            p[static_cast<std::size_t>(k)] = grid.momentum(k);
            e[static_cast<std::size_t>(k)] = std::hypot(p[static_cast<std::size_t>(k)], mu);
        }
        const double c_base = std::sqrt(2.0 * M_PI) * std::pow(M_PI, -0.25) / L;
        const double recip = 2.0 * M_PI / dx;

        ops.kernel.assign(static_cast<std::size_t>(n) * n, 0.0);
        ops.b_momentum.assign(static_cast<std::size_t>(n), 0.0);
        for (int kp = 0; kp < n; ++kp)
            for (int k = 0; k < n; ++k) {
                const bool cut = std::abs(p[static_cast<std::size_t>(kp)]) > p_max * (1.0 + 1e-12) ||
                                 std::abs(p[static_cast<std::size_t>(k)]) > p_max * (1.0 + 1e-12);
                if (cut) continue;
                const double de = e[static_cast<std::size_t>(kp)] - e[static_cast<std::size_t>(k)];
                const double dp0 = p[static_cast<std::size_t>(kp)] - p[static_cast<std::size_t>(k)];
                double images = 0.0;
                for (int m = -2; m <= 2; ++m) {
                    const double dpm = dp0 + m * recip;
                    // spacelike after wrapping: exponent <= 0 up to rounding
                    const double expo = std::min(0.0, -0.5 * (dpm * dpm - de * de));
                    if (expo > -745.0) images += std::exp(expo);
                }
                const double v = c_base * mu /
                                 std::sqrt(e[static_cast<std::size_t>(kp)] *
                                           e[static_cast<std::size_t>(k)]) *
                                 images;
                ops.kernel[static_cast<std::size_t>(kp) * n + k] = v;
            }
        for (int k = 0; k < n; ++k) {
            double s = 0.0;
            for (int kq = 0; kq < n; ++kq) {
                const double v = ops.kernel_at(k, kq);
                s += v * v;
            }
            ops.b_momentum[static_cast<std::size_t>(k)] = L * s;
        }
        ops.generator_norm =
            2.0 * *std::max_element(ops.b_momentum.begin(), ops.b_momentum.end());
    }

    if (!(grid.dt * ops.generator_norm < 0.1))
        throw config_error("collapse operators: stability bound violated, need dt * 2||B|| < 0.1 "
                           "(reduce the time step)");
    return ops;
}

/// Dense position-basis matrix of the site operator A_i (test and
/// diagnostic path; the evolution code works from the structured data).
inline CMatrix site_operator(const CollapseOperatorSet& ops, int i)
{
    const int n = ops.n();
    if (i < 0 || i >= n) throw config_error("site_operator: site index out of range");
    CMatrix a(n);
    if (!ops.quasirelativistic()) {
        for (int j = 0; j < n; ++j) a(j, j) = ops.profile(i, j);
        return a;
    }
    const DftPlan plan(n);
    CMatrix am(n);
    for (int kp = 0; kp < n; ++kp)
        for (int k = 0; k < n; ++k)
            am(kp, k) = ops.kernel_at(kp, k) *
                        plan.twiddle(static_cast<long long>(kp - k) * i);
    const CMatrix f = plan.matrix();
    return matmul(adjoint(f), matmul(am, f));
}

/// Exact CSL off-diagonal decay rate between position indices j and k:
/// Gamma_{jk} = (1/2) sum_i dx ([A_i]_{jj} - [A_i]_{kk})^2.
inline double csl_pair_decay_rate(const CollapseOperatorSet& ops, int j, int k)
{
    if (ops.quasirelativistic())
        throw config_error("csl_pair_decay_rate: closed form holds for the diagonal CSL set");
    const int n = ops.n();
    if (j < 0 || j >= n || k < 0 || k >= n)
        throw config_error("csl_pair_decay_rate: site index out of range");
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = ops.profile(i, j) - ops.profile(i, k);
        s += d * d;
    }
    return 0.5 * ops.grid.dx * s;
}

} // namespace qrcsl
