#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "qrcsl/errors.hpp"
#include "qrcsl/free_rates/two_packet.hpp"
#include "qrcsl/numerics/linalg.hpp"

// Periodic 1-d simulation lattice.  Lengths are in units of the smearing
// scale, time in units of the inverse simulation collapse rate (lambda_sim
// = 1); the physical lambda enters only through output unit conversion.
// Momentum lives on the discrete Fourier lattice p_k = 2 pi k~ / L with
// signed index k~ in [-n/2, n/2).

namespace qrcsl {

struct Grid1D {
    int n_points = 64;
    double dx = M_PI / 10.0;  // Nyquist momentum 10
    double dt = 0.02;
    // boundary is always periodic

    double length() const { return n_points * dx; }
    double site(int j) const { return j * dx; }

    int signed_index(int k) const { return k < n_points / 2 ? k : k - n_points; }
    double momentum(int k) const { return 2.0 * M_PI * signed_index(k) / length(); }
    double nyquist_momentum() const { return M_PI / dx; }
    double mode_spacing() const { return 2.0 * M_PI / length(); }

    /// wrap a displacement to the principal interval [-L/2, L/2)
    double min_image(double y) const
    {
        const double L = length();
        y = std::fmod(y + 0.5 * L, L);
        if (y < 0.0) y += L;
        return y - 0.5 * L;
    }

    void validate() const
    {
        std::vector<std::string> bad;
        if (n_points < 8) bad.push_back("n_points: need at least 8 sites");
        if (!(dx > 0.0)) bad.push_back("dx: spacing must be positive");
        if (!(dt > 0.0)) bad.push_back("dt: time step must be positive");
        if (!bad.empty()) {
            std::string msg = "grid:";
            for (const auto& b : bad) msg += " " + b + ";";
            throw config_error(msg);
        }
        // the dt * generator-norm stability bound needs the collapse
        // operators and is enforced when they are built on this grid
    }
};

/// Unnormalized state on the lattice; the norm carries probability, so it
/// is only required to be positive and finite.  A trajectory whose norm
/// underflows is marked dead (a probability-zero noise branch).
struct StateVector {
    std::vector<cplx> amp;
    bool dead = false;

    double norm_squared() const
    {
        double s = 0.0;
        for (const cplx& a : amp) s += std::norm(a);
        return s;
    }
    double norm() const { return std::sqrt(norm_squared()); }

    void validate() const
    {
        if (amp.empty()) throw config_error("state vector: empty amplitude array");
        for (const cplx& a : amp)
            if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
                throw config_error("state vector: non-finite amplitude");
        if (!dead && !(norm_squared() > 0.0))
            throw config_error("state vector: norm must be positive");
    }
};

/// Two Gaussian packets of common width centered at L/2 -+ separation/2,
/// with |amplitude|^2 weights weight_left and 1 - weight_left.  Packet
/// profiles are periodized; for any sane geometry the wrap terms are
/// below rounding.
inline StateVector two_packet_state_vector(const Grid1D& grid, const TwoPacketState& packets)
{
    grid.validate();
    packets.validate();
    const double L = grid.length();
    const double c_left = 0.5 * L - 0.5 * packets.separation;
    const double c_right = 0.5 * L + 0.5 * packets.separation;
    const double s2 = packets.width * packets.width;

    auto profile = [&](double c, int j) {
        const double d = grid.min_image(grid.site(j) - c);
        double v = std::exp(-d * d / (4.0 * s2));
        const double dl = std::abs(d) - L;  // nearest wrap image
        v += std::exp(-dl * dl / (4.0 * s2));
        return v;
    };

    StateVector psi;
    psi.amp.resize(static_cast<std::size_t>(grid.n_points));
    double nl = 0.0, nr = 0.0;
    for (int j = 0; j < grid.n_points; ++j) {
        nl += profile(c_left, j) * profile(c_left, j);
        nr += profile(c_right, j) * profile(c_right, j);
    }
    const double al = std::sqrt(packets.weight_left / nl);
    const double ar = std::sqrt((1.0 - packets.weight_left) / nr);
    for (int j = 0; j < grid.n_points; ++j)
        psi.amp[static_cast<std::size_t>(j)] = al * profile(c_left, j) + ar * profile(c_right, j);
    const double n = psi.norm();
    for (cplx& a : psi.amp) a /= n;
    return psi;
}

/// Position-basis density matrix on the lattice.
struct DensityMatrixGrid {
    CMatrix rho;

    double trace() const
    {
        double t = 0.0;
        for (int j = 0; j < rho.n(); ++j) t += rho(j, j).real();
        return t;
    }

    void validate() const
    {
        if (rho.n() < 1) throw config_error("density matrix: empty");
        const double scale = max_abs_entry(rho);
        if (!std::isfinite(scale)) throw config_error("density matrix: non-finite entry");
        if (herm_defect(rho) > 1e-10 * std::max(scale, 1e-300))
            throw config_error("density matrix: not Hermitian");
    }
};

inline DensityMatrixGrid pure_density_matrix(const StateVector& psi)
{
    psi.validate();
    const int n = static_cast<int>(psi.amp.size());
    DensityMatrixGrid d{CMatrix(n)};
    const double n2 = psi.norm_squared();
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            d.rho(j, k) = psi.amp[static_cast<std::size_t>(j)] *
                          std::conj(psi.amp[static_cast<std::size_t>(k)]) / n2;
    return d;
}

/// Precomputed unitary DFT tables for the grid (naive n^2 transforms; the
/// lattice is small and the transforms are off the hot path or O(n^2)
/// alongside O(n^2) work anyway).
struct DftPlan {
    int n = 0;
    std::vector<cplx> w;  // w[r] = exp(-2 pi i r / n), r in [0, n)

    explicit DftPlan(int n_points = 0) : n(n_points), w(static_cast<std::size_t>(n_points))
    {
        for (int r = 0; r < n; ++r)
            w[static_cast<std::size_t>(r)] =
                std::polar(1.0, -2.0 * M_PI * static_cast<double>(r) / n);
    }

    cplx twiddle(long long r) const
    {
        long long m = r % n;
        if (m < 0) m += n;
        return w[static_cast<std::size_t>(m)];
    }

    /// out_k = (1/sqrt n) sum_j in_j e^{-2 pi i k j / n}
    void forward(const std::vector<cplx>& in, std::vector<cplx>& out) const
    {
        out.assign(static_cast<std::size_t>(n), cplx(0.0, 0.0));
        const double c = 1.0 / std::sqrt(static_cast<double>(n));
        for (int k = 0; k < n; ++k) {
            cplx s(0.0, 0.0);
            for (int j = 0; j < n; ++j)
                s += in[static_cast<std::size_t>(j)] *
                     twiddle(static_cast<long long>(k) * j);
            out[static_cast<std::size_t>(k)] = c * s;
        }
    }

    /// out_j = (1/sqrt n) sum_k in_k e^{+2 pi i k j / n}
    void inverse(const std::vector<cplx>& in, std::vector<cplx>& out) const
    {
        out.assign(static_cast<std::size_t>(n), cplx(0.0, 0.0));
        const double c = 1.0 / std::sqrt(static_cast<double>(n));
        for (int j = 0; j < n; ++j) {
            cplx s(0.0, 0.0);
            for (int k = 0; k < n; ++k)
                s += in[static_cast<std::size_t>(k)] *
                     std::conj(twiddle(static_cast<long long>(k) * j));
            out[static_cast<std::size_t>(j)] = c * s;
        }
    }

    /// unitary matrix F with F_{kj} = e^{-2 pi i k j / n} / sqrt n
    CMatrix matrix() const
    {
        CMatrix f(n);
        const double c = 1.0 / std::sqrt(static_cast<double>(n));
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j)
                f(k, j) = c * twiddle(static_cast<long long>(k) * j);
        return f;
    }
};

} // namespace qrcsl
