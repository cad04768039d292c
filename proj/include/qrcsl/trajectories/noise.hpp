#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "qrcsl/errors.hpp"
#include "qrcsl/numerics/rng.hpp"
#include "qrcsl/trajectories/grid.hpp"

// Noise-field bookkeeping for the stochastic evolution.
//
// Each (site, step) cell carries a Brownian increment dW ~ N(0, dt).  The
// classical field entering the propagator is
//   w_i = 2 lambda m_i + sqrt(lambda / dx) dW_i / dt,
// where the drift center m_i depends on the sampling scheme:
//   cooked: m_i = <A_i> on the current normalized state (the physical
//           measure for eigenstates, importance-corrected otherwise);
//   raw:    m_i = 0 (the zero-collapse Gaussian reference measure).
// Under either scheme the per-step likelihood weight is the squared norm
// of the propagated normalized state, and the running product of those
// weights has ensemble mean one.  The drift is state-dependent, so only
// the increments are stored here; w is assembled during stepping.

namespace qrcsl {

enum class NoiseScheme { cooked, raw };

inline const char* to_string(NoiseScheme s)
{
    return s == NoiseScheme::cooked ? "cooked" : "raw";
}

/// One step's increments, viewed into a NoiseRealization.
struct NoiseSlice {
    NoiseScheme scheme = NoiseScheme::cooked;
    const double* dw = nullptr;
    int n_sites = 0;
    double dt = 0.0;  // the dt the increments were drawn with
};

struct NoiseRealization {
    NoiseScheme scheme = NoiseScheme::cooked;
    std::uint64_t seed = 0;
    int n_steps = 0;
    int n_sites = 0;
    double dt = 0.0;
    std::vector<double> dw;  // row-major [step * n_sites + site]

    NoiseSlice step(int s) const
    {
        if (s < 0 || s >= n_steps) throw config_error("noise: step index out of range");
        return {scheme, dw.data() + static_cast<std::size_t>(s) * n_sites, n_sites, dt};
    }

    void validate() const
    {
        if (n_steps < 1 || n_sites < 1) throw config_error("noise: empty realization");
        if (!(dt > 0.0)) throw config_error("noise: dt must be positive");
        if (dw.size() != static_cast<std::size_t>(n_steps) * n_sites)
            throw config_error("noise: increment array size mismatch");
        for (double v : dw)
            if (!std::isfinite(v)) throw config_error("noise: non-finite increment");
    }
};

/// Draw a full realization from the deterministic stream (seed, stream):
/// step-major order, one N(0, dt) increment per cell.
inline NoiseRealization sample_noise(const Grid1D& grid, int n_steps, NoiseScheme scheme,
                                     std::uint64_t seed, std::uint64_t stream = 0)
{
    grid.validate();
    if (n_steps < 1) throw config_error("noise: need at least one step");
    NoiseRealization nr;
    nr.scheme = scheme;
    nr.seed = seed;
    nr.n_steps = n_steps;
    nr.n_sites = grid.n_points;
    nr.dt = grid.dt;
    nr.dw.resize(static_cast<std::size_t>(n_steps) * grid.n_points);
    SampleStream rng(seed, stream);
    const double root_dt = std::sqrt(grid.dt);
    for (double& v : nr.dw) v = root_dt * rng.normal();
    return nr;
}

} // namespace qrcsl
