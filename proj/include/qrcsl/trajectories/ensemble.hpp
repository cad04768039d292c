#pragma once

#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <vector>

#include "qrcsl/errors.hpp"
#include "qrcsl/numerics/monte_carlo.hpp"
#include "qrcsl/trajectories/grid.hpp"
#include "qrcsl/trajectories/stepper.hpp"

// Trajectory ensembles.  Simulation units fix lambda_sim = 1 (time in
// collapse times); the physical coupling only rescales reported rates.
//
// Each trajectory tr derives its noise from the deterministic stream
// (seed, tr), so any trajectory can be recomputed in isolation.  Work is
// split into fixed 32-trajectory chunks whose partial sums are stored per
// chunk and reduced serially in chunk order, making the statistics
// bit-identical for any worker count (QRCSL_WORKERS honored as in the
// Monte Carlo driver).
//
// Per-trajectory bookkeeping: the state is kept normalized and the
// running log weight l accumulates the per-step likelihood factors, so
// e^l is the squared norm the unnormalized evolution would have produced
// (with the Gaussian reference factors absorbed into the change of
// measure).  Ensemble means of e^l are the probability-rule martingale;
// e^l-weighted outcome indicators estimate Born frequencies; the
// e^l-weighted mean projector estimates the ensemble density matrix.

namespace qrcsl {

struct EnsembleConfig {
    int n_traj = 1000;
    double t_final = 8.0;
    NoiseScheme scheme = NoiseScheme::cooked;
    std::uint64_t seed = 20250823;  // fixed default so runs reproduce by default
    int checkpoints = 4;
    // optional kinetic term p^2/(2 sim_mass) by spectral splitting;
    // infinity freezes the free motion (collapse-interaction picture)
    double sim_mass = std::numeric_limits<double>::infinity();
};

struct EnsembleStats {
    int n_traj = 0;
    int n_steps = 0;
    double dt = 0.0;
    double left_fraction = 0.0;   // weighted Born-outcome estimates
    double right_fraction = 0.0;
    double martingale_mean = 0.0;  // weighted norm mean at t_final, expect 1
    double martingale_std_error = 0.0;
    std::vector<double> checkpoint_times;
    std::vector<double> martingale_at;
    std::vector<double> martingale_se_at;
    DensityMatrixGrid mean_rho;  // position basis, trace ~ martingale_mean
    double dead_fraction = 0.0;
    bool low_confidence = false;  // dead fraction above 1%
};

namespace detail {

struct EnsemblePartial {
    double sum_w = 0.0, sum_w2 = 0.0;
    double sum_left = 0.0, sum_right = 0.0;
    std::vector<double> cp_sum, cp_sum2;
    CMatrix rho_sum;
    int dead = 0;
};

inline EnsembleStats run_ensemble_impl(const StateVector& psi0, const CollapseOperatorSet& ops,
                                       const EnsembleConfig& cfg, double c_left, double c_right)
{
    if (cfg.n_traj < 100)
        throw config_error("ensemble: need at least 100 trajectories for meaningful statistics");
    if (!(cfg.t_final > 0.0)) throw config_error("ensemble: t_final must be positive");
    if (cfg.checkpoints < 1) throw config_error("ensemble: need at least one checkpoint");

    const Grid1D& grid = ops.grid;
    const int n = ops.n();
    const int n_steps = static_cast<int>(std::ceil(cfg.t_final / grid.dt - 1e-9));
    if (n_steps < cfg.checkpoints)
        throw config_error("ensemble: more checkpoints than time steps");
    std::vector<int> cp_step(static_cast<std::size_t>(cfg.checkpoints));
    for (int c = 0; c < cfg.checkpoints; ++c)
        cp_step[static_cast<std::size_t>(c)] = static_cast<int>(
            std::lround(static_cast<double>(c + 1) * n_steps / cfg.checkpoints));

    // left/right site masks from the reference points
    std::vector<char> is_left(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double dl = std::abs(grid.min_image(grid.site(j) - c_left));
        const double dr = std::abs(grid.min_image(grid.site(j) - c_right));
        is_left[static_cast<std::size_t>(j)] = dl < dr ? 1 : 0;
    }

    const TrajectoryEngine probe(ops, cfg.scheme, cfg.sim_mass);  // validates config
    const std::vector<cplx> psi_init = probe.prepare(psi0);

    constexpr int kChunk = 32;
    const int n_chunks = (cfg.n_traj + kChunk - 1) / kChunk;
    std::vector<EnsemblePartial> partials(static_cast<std::size_t>(n_chunks));

    auto run_chunks = [&](int chunk_begin, int chunk_end) {
        TrajectoryEngine engine(ops, cfg.scheme, cfg.sim_mass);
        std::vector<cplx> psi;
        std::vector<double> q;
        for (int ci = chunk_begin; ci < chunk_end; ++ci) {
            EnsemblePartial& part = partials[static_cast<std::size_t>(ci)];
            part.cp_sum.assign(static_cast<std::size_t>(cfg.checkpoints), 0.0);
            part.cp_sum2.assign(static_cast<std::size_t>(cfg.checkpoints), 0.0);
            part.rho_sum = CMatrix(n);
            const int tr_begin = ci * kChunk;
            const int tr_end = std::min(cfg.n_traj, tr_begin + kChunk);
            for (int tr = tr_begin; tr < tr_end; ++tr) {
                SampleStream rng(cfg.seed, static_cast<std::uint64_t>(tr));
                psi = psi_init;
                double l = 0.0;
                bool dead = false;
                int cp = 0;
                for (int st = 0; st < n_steps; ++st) {
                    if (!dead) {
                        l += engine.advance(psi, rng);
                        if (l < -690.0) dead = true;  // weight underflow: null branch
                    }
                    if (cp < cfg.checkpoints && st + 1 == cp_step[static_cast<std::size_t>(cp)]) {
                        const double w = dead ? 0.0 : std::exp(l);
                        part.cp_sum[static_cast<std::size_t>(cp)] += w;
                        part.cp_sum2[static_cast<std::size_t>(cp)] += w * w;
                        ++cp;
                    }
                }
                const double w = dead ? 0.0 : std::exp(l);
                part.sum_w += w;
                part.sum_w2 += w * w;
                if (dead) {
                    ++part.dead;
                    continue;
                }
                engine.position_mass(psi, q);
                double mass_left = 0.0;
                for (int j = 0; j < n; ++j)
                    if (is_left[static_cast<std::size_t>(j)]) mass_left += q[static_cast<std::size_t>(j)];
                if (mass_left > 0.5) part.sum_left += w;
                else part.sum_right += w;
                for (int j = 0; j < n; ++j) {
                    const cplx wa = w * psi[static_cast<std::size_t>(j)];
                    for (int k = 0; k < n; ++k)
                        part.rho_sum(j, k) += wa * std::conj(psi[static_cast<std::size_t>(k)]);
                }
            }
        }
    };

    const int workers = std::min(worker_count(), n_chunks);
    if (workers <= 1) {
        run_chunks(0, n_chunks);
    } else {
        std::vector<std::future<void>> futures;
        futures.reserve(static_cast<std::size_t>(workers));
        int begin = 0;
        for (int wi = 0; wi < workers; ++wi) {
            const int end = begin + (n_chunks - begin) / (workers - wi);
            futures.push_back(std::async(std::launch::async, run_chunks, begin, end));
            begin = end;
        }
        for (auto& f : futures) f.get();
    }

    EnsembleStats stats;
    stats.n_traj = cfg.n_traj;
    stats.n_steps = n_steps;
    stats.dt = grid.dt;
    stats.checkpoint_times.resize(static_cast<std::size_t>(cfg.checkpoints));
    for (int c = 0; c < cfg.checkpoints; ++c)
        stats.checkpoint_times[static_cast<std::size_t>(c)] =
            cp_step[static_cast<std::size_t>(c)] * grid.dt;
    stats.martingale_at.assign(static_cast<std::size_t>(cfg.checkpoints), 0.0);
    stats.martingale_se_at.assign(static_cast<std::size_t>(cfg.checkpoints), 0.0);

    double sum_w = 0.0, sum_w2 = 0.0, sum_left = 0.0, sum_right = 0.0;
    std::vector<double> cp_sum(static_cast<std::size_t>(cfg.checkpoints), 0.0);
    std::vector<double> cp_sum2(static_cast<std::size_t>(cfg.checkpoints), 0.0);
    CMatrix rho_sum(n);
    int dead = 0;
    for (const EnsemblePartial& part : partials) {
        sum_w += part.sum_w;
        sum_w2 += part.sum_w2;
        sum_left += part.sum_left;
        sum_right += part.sum_right;
        for (int c = 0; c < cfg.checkpoints; ++c) {
            cp_sum[static_cast<std::size_t>(c)] += part.cp_sum[static_cast<std::size_t>(c)];
            cp_sum2[static_cast<std::size_t>(c)] += part.cp_sum2[static_cast<std::size_t>(c)];
        }
        rho_sum += part.rho_sum;
        dead += part.dead;
    }

    const double nn = static_cast<double>(cfg.n_traj);
    auto mean_se = [&](double s1, double s2, double& mean, double& se) {
        mean = s1 / nn;
        const double var = std::max(0.0, (s2 - nn * mean * mean) / (nn - 1.0));
        se = std::sqrt(var / nn);
    };
    mean_se(sum_w, sum_w2, stats.martingale_mean, stats.martingale_std_error);
    for (int c = 0; c < cfg.checkpoints; ++c)
        mean_se(cp_sum[static_cast<std::size_t>(c)], cp_sum2[static_cast<std::size_t>(c)],
                stats.martingale_at[static_cast<std::size_t>(c)],
                stats.martingale_se_at[static_cast<std::size_t>(c)]);
    stats.left_fraction = sum_left / nn;
    stats.right_fraction = sum_right / nn;

    rho_sum *= cplx(1.0 / nn, 0.0);
    if (ops.quasirelativistic()) {
        const CMatrix f = probe.plan.matrix();
        stats.mean_rho.rho = matmul(adjoint(f), matmul(rho_sum, f));
    } else {
        stats.mean_rho.rho = rho_sum;
    }
    stats.dead_fraction = dead / nn;
    stats.low_confidence = stats.dead_fraction > 0.01;
    return stats;
}

} // namespace detail

/// Ensemble from an explicit initial state; outcomes are classified by
/// which half of the ring (split at L/2) holds the majority of the mass.
inline EnsembleStats run_ensemble(const StateVector& psi0, const CollapseOperatorSet& ops,
                                  const EnsembleConfig& cfg)
{
    const double L = ops.grid.length();
    return detail::run_ensemble_impl(psi0, ops, cfg, 0.25 * L, 0.75 * L);
}

/// Ensemble from a two-packet superposition; outcomes are classified by
/// majority mass near the respective packet centers.
inline EnsembleStats run_ensemble(const TwoPacketState& packets, const CollapseOperatorSet& ops,
                                  const EnsembleConfig& cfg)
{
    const StateVector psi0 = two_packet_state_vector(ops.grid, packets);
    const double L = ops.grid.length();
    return detail::run_ensemble_impl(psi0, ops, cfg, 0.5 * L - 0.5 * packets.separation,
                                     0.5 * L + 0.5 * packets.separation);
}

} // namespace qrcsl
