#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "qrcsl/errors.hpp"
#include "qrcsl/numerics/rng.hpp"
#include "qrcsl/trajectories/grid.hpp"
#include "qrcsl/trajectories/noise.hpp"
#include "qrcsl/trajectories/operators.hpp"

// One-step unnormalized propagator
//   K(w) = exp{ -(4 lambda)^{-1} sum_i dx dt (w_i - 2 lambda A_i)^2 },
// applied exactly as a single Hermitian exponential (no per-site Lie
// splitting: the exponent is one Hermitian operator, so only the
// cross-step ordering carries the O(dt^2) ambiguity).
//
// Writing w_i = 2 lambda m_i + sigma xi_i with sigma^2 = lambda/(dx dt)
// factors the propagator as
//   K = e^{-sum_i xi_i^2 / 4} e^{-X},
//   X = s sum_i xi_i (m_i - A_i) + s^2 sum_i (m_i - A_i)^2,  s = sqrt(lambda dx dt).
// step_trajectory applies the literal K (norm decays like e^{-n/4} per
// step, fine for short diagnostics).  The ensemble engine keeps the state
// normalized, applies e^{-X} only, and accumulates log r with
// r = |e^{-X} psi_hat|^2; the change of measure from dropping the xi^2
// factor makes E[prod r] = 1 the martingale form of the probability rule
// for either sampling scheme.  For commuting (CSL) operator sets the
// per-step Gaussian integrals are exact, so the martingale and the
// ensemble-mean damping e^{-Gamma_jk dt} hold exactly at finite dt.

namespace qrcsl {

namespace detail {

/// y <- e^H y for Hermitian H given by its matvec, by scaled Taylor
/// summation: split into 2^k chunks until the exponent norm bound is <= 1,
/// then sum until terms fall below 1e-14 of the accumulated result.
template <class MatVec>
inline void expm_apply(MatVec&& h, std::vector<cplx>& y, double norm_bound,
                       std::vector<cplx>& term, std::vector<cplx>& tmp)
{
    if (!(norm_bound >= 0.0) || norm_bound > 1e6)
        throw accuracy_error("expm_apply: exponent norm bound invalid or too large", norm_bound,
                             norm_bound);
    int chunks = 1;
    while (norm_bound / chunks > 1.0) chunks <<= 1;

    const std::size_t n = y.size();
    term.resize(n);
    tmp.resize(n);
    for (int c = 0; c < chunks; ++c) {
        term = y;
        bool converged = false;
        for (int k = 1; k <= 64 && !converged; ++k) {
            h(term, tmp);
            const double f = 1.0 / (static_cast<double>(chunks) * k);
            double t2 = 0.0, y2 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                term[j] = f * tmp[j];
                y[j] += term[j];
                t2 += std::norm(term[j]);
                y2 += std::norm(y[j]);
            }
            converged = t2 <= 1e-28 * y2;
        }
        if (!converged)
            throw accuracy_error("expm_apply: Taylor sum did not converge", 0.0, norm_bound);
    }
}

} // namespace detail

/// Apply one step of the literal propagator K(w) with the field assembled
/// from the increment slice per its sampling scheme.  Returns the
/// unnormalized propagated state; norm underflow marks it dead.
inline StateVector step_trajectory(const StateVector& state, const CollapseOperatorSet& ops,
                                   const NoiseSlice& noise, double dt, double lambda = 1.0)
{
    state.validate();
    if (state.dead) return state;
    if (lambda == 0.0) return state;  // identity propagator
    if (!(lambda > 0.0)) throw std::domain_error("step_trajectory: coupling must be >= 0");
    const int n = ops.n();
    if (static_cast<int>(state.amp.size()) != n)
        throw config_error("step_trajectory: state size does not match operator set");
    if (noise.n_sites != n) throw config_error("step_trajectory: noise slice size mismatch");
    if (!(dt > 0.0) || std::abs(noise.dt - dt) > 1e-9 * dt)
        throw config_error("step_trajectory: noise increments were drawn for a different dt");

    const double dx = ops.grid.dx;
    const bool cooked = noise.scheme == NoiseScheme::cooked;
    const double drive = std::sqrt(lambda / dx) / dt;  // w = 2 lambda m + drive * dW

    StateVector out = state;
    std::vector<double> w(static_cast<std::size_t>(n));

    if (!ops.quasirelativistic()) {
        if (cooked) {
            const double n2 = state.norm_squared();
            for (int i = 0; i < n; ++i) {
                double m = 0.0;
                for (int j = 0; j < n; ++j)
                    m += ops.profile(i, j) * std::norm(state.amp[static_cast<std::size_t>(j)]);
                w[static_cast<std::size_t>(i)] = 2.0 * lambda * m / n2 + drive * noise.dw[i];
            }
        } else {
            for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = drive * noise.dw[i];
        }
        const double c = -dx * dt / (4.0 * lambda);
        for (int j = 0; j < n; ++j) {
            double g = 0.0;
            for (int i = 0; i < n; ++i) {
                const double d = w[static_cast<std::size_t>(i)] - 2.0 * lambda * ops.profile(i, j);
                g += d * d;
            }
            out.amp[static_cast<std::size_t>(j)] *= std::exp(c * g);
        }
    } else {
        const DftPlan plan(n);
        std::vector<cplx> pt;
        plan.forward(state.amp, pt);

        if (cooked) {
            // <A_i> from the momentum representation: group by index offset
            std::vector<cplx> s_delta(static_cast<std::size_t>(n), cplx(0.0, 0.0));
            for (int d = 0; d < n; ++d) {
                cplx s(0.0, 0.0);
                for (int k = 0; k < n; ++k) {
                    const int kp = (k + d) % n;
                    s += std::conj(pt[static_cast<std::size_t>(kp)]) *
                         ops.kernel_at(kp, k) * pt[static_cast<std::size_t>(k)];
                }
                s_delta[static_cast<std::size_t>(d)] = s;
            }
            const double n2 = state.norm_squared();
            for (int i = 0; i < n; ++i) {
                cplx m(0.0, 0.0);
                for (int d = 0; d < n; ++d)
                    m += s_delta[static_cast<std::size_t>(d)] *
                         plan.twiddle(static_cast<long long>(d) * i);
                w[static_cast<std::size_t>(i)] = 2.0 * lambda * m.real() / n2 + drive * noise.dw[i];
            }
        } else {
            for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = drive * noise.dw[i];
        }

        std::vector<cplx> what(static_cast<std::size_t>(n), cplx(0.0, 0.0));
        double w2 = 0.0, wmax = 0.0;
        for (int d = 0; d < n; ++d) {
            cplx s(0.0, 0.0);
            for (int i = 0; i < n; ++i)
                s += w[static_cast<std::size_t>(i)] * plan.twiddle(static_cast<long long>(d) * i);
            what[static_cast<std::size_t>(d)] = s;
            wmax = std::max(wmax, std::abs(s));
        }
        for (int i = 0; i < n; ++i) w2 += w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];

        double row_sum_max = 0.0, b_max = 0.0;
        for (int k = 0; k < n; ++k) {
            double rs = 0.0;
            for (int kp = 0; kp < n; ++kp) rs += ops.kernel_at(kp, k);
            row_sum_max = std::max(row_sum_max, rs);
            b_max = std::max(b_max, ops.b_momentum[static_cast<std::size_t>(k)]);
        }

        const double cw = dx * dt;
        auto hmat = [&](const std::vector<cplx>& in, std::vector<cplx>& hout) {
            for (int kp = 0; kp < n; ++kp) {
                cplx s(0.0, 0.0);
                for (int k = 0; k < n; ++k)
                    s += ops.kernel_at(kp, k) * what[static_cast<std::size_t>((kp - k + n) % n)] *
                         in[static_cast<std::size_t>(k)];
                hout[static_cast<std::size_t>(kp)] =
                    cw * s - lambda * dt * ops.b_momentum[static_cast<std::size_t>(kp)] *
                                 in[static_cast<std::size_t>(kp)];
            }
        };
        std::vector<cplx> scratch1, scratch2;
        detail::expm_apply(hmat, pt, cw * row_sum_max * wmax + lambda * dt * b_max, scratch1,
                           scratch2);
        const double scal = -dx * dt / (4.0 * lambda) * w2;
        const double f = std::exp(std::max(scal, -745.0));
        for (cplx& a : pt) a *= f;
        plan.inverse(pt, out.amp);
    }

    if (out.norm_squared() < 1e-300) out.dead = true;
    return out;
}

namespace detail {

/// Shared per-trajectory evolution used by the ensemble driver: keeps the
/// state normalized (position basis for CSL, momentum basis for QRCSL),
/// returns per-step log weights, and optionally applies a kinetic
/// splitting half-step on each side of the collapse update.
struct TrajectoryEngine {
    const CollapseOperatorSet* ops = nullptr;
    NoiseScheme scheme = NoiseScheme::cooked;
    bool cooked = true;
    bool momentum_basis = false;
    bool kinetic = false;
    int n = 0;
    double s = 0.0;  // sqrt(dt dx), lambda_sim = 1
    double dt = 0.0;
    DftPlan plan;
    std::vector<double> dtb;         // dt * diag(B) in the working basis
    double row_sum_max = 0.0;        // QRCSL exponent norm helper
    std::vector<cplx> half_phase;    // exp(-i p^2 dt / (4 m))

    std::vector<double> xi, m, avec, t1, t2, ctil, w_abs2;
    std::vector<cplx> s_delta, chat, scratch1, scratch2, scratch3;

    TrajectoryEngine(const CollapseOperatorSet& o, NoiseScheme sch, double sim_mass)
        : ops(&o), scheme(sch), cooked(sch == NoiseScheme::cooked),
          momentum_basis(o.quasirelativistic()), n(o.n()),
          s(std::sqrt(o.grid.dt * o.grid.dx)), dt(o.grid.dt), plan(o.n())
    {
        const std::size_t nn = static_cast<std::size_t>(n);
        const auto& b = momentum_basis ? o.b_momentum : o.b_position;
        dtb.resize(nn);
        for (std::size_t k = 0; k < nn; ++k) dtb[k] = dt * b[k];
        if (momentum_basis) {
            for (int k = 0; k < n; ++k) {
                double rs = 0.0;
                for (int kp = 0; kp < n; ++kp) rs += o.kernel_at(kp, k);
                row_sum_max = std::max(row_sum_max, rs);
            }
        }
        if (std::isfinite(sim_mass)) {
            if (!(sim_mass > 0.0)) throw config_error("trajectory engine: sim_mass must be > 0");
            kinetic = true;
            half_phase.resize(nn);
            for (int k = 0; k < n; ++k) {
                const double p = o.grid.momentum(k);
                half_phase[static_cast<std::size_t>(k)] =
                    std::polar(1.0, -p * p * dt / (4.0 * sim_mass));
            }
        }
        xi.resize(nn);
        m.assign(nn, 0.0);
        if (!momentum_basis) {
            avec.resize(nn);
            t1.resize(nn);
            t2.resize(nn);
        } else {
            ctil.resize(nn);
            s_delta.resize(nn);
            chat.resize(nn);
        }
    }

    /// normalized initial state in the engine's working basis
    std::vector<cplx> prepare(const StateVector& psi0) const
    {
        psi0.validate();
        if (static_cast<int>(psi0.amp.size()) != n)
            throw config_error("trajectory engine: state size does not match operator set");
        std::vector<cplx> psi = psi0.amp;
        const double nrm = psi0.norm();
        for (cplx& a : psi) a /= nrm;
        if (momentum_basis) {
            std::vector<cplx> pt;
            plan.forward(psi, pt);
            return pt;
        }
        return psi;
    }

    void apply_half_kinetic(std::vector<cplx>& psi)
    {
        if (momentum_basis) {
            for (int k = 0; k < n; ++k)
                psi[static_cast<std::size_t>(k)] *= half_phase[static_cast<std::size_t>(k)];
        } else {
            plan.forward(psi, scratch3);
            for (int k = 0; k < n; ++k)
                scratch3[static_cast<std::size_t>(k)] *= half_phase[static_cast<std::size_t>(k)];
            plan.inverse(scratch3, psi);
        }
    }

    /// One step on the normalized state; draws its noise from rng (site
    /// order, matching sample_noise), renormalizes, returns log of the
    /// step weight r = |e^{-X} psi|^2 e^{-2 scal}.
    double advance(std::vector<cplx>& psi, SampleStream& rng)
    {
        if (kinetic) apply_half_kinetic(psi);
        for (double& x : xi) x = rng.normal();
        double logr;
        if (!momentum_basis) logr = advance_position(psi);
        else logr = advance_momentum(psi);
        if (kinetic) apply_half_kinetic(psi);
        return logr;
    }

    double advance_position(std::vector<cplx>& psi)
    {
        double scal = 0.0;
        if (cooked) {
            // m = P |psi|^2, then the two symmetric matvecs against P
            for (int i = 0; i < n; ++i) {
                double a = 0.0;
                for (int j = 0; j < n; ++j)
                    a += ops->profile(i, j) * std::norm(psi[static_cast<std::size_t>(j)]);
                avec[static_cast<std::size_t>(i)] = a;
            }
            double xa = 0.0, aa = 0.0;
            for (int i = 0; i < n; ++i) {
                xa += xi[static_cast<std::size_t>(i)] * avec[static_cast<std::size_t>(i)];
                aa += avec[static_cast<std::size_t>(i)] * avec[static_cast<std::size_t>(i)];
            }
            scal = s * xa + s * s * aa;
            for (int j = 0; j < n; ++j) {
                double v = 0.0;
                for (int i = 0; i < n; ++i)
                    v += ops->profile(j, i) * avec[static_cast<std::size_t>(i)];
                t2[static_cast<std::size_t>(j)] = v;
            }
        }
        for (int j = 0; j < n; ++j) {
            double v = 0.0;
            for (int i = 0; i < n; ++i)
                v += ops->profile(j, i) * xi[static_cast<std::size_t>(i)];
            t1[static_cast<std::size_t>(j)] = v;
        }
        double r = 0.0;
        for (int j = 0; j < n; ++j) {
            double x = -s * t1[static_cast<std::size_t>(j)] + dtb[static_cast<std::size_t>(j)];
            if (cooked) x += scal - 2.0 * s * s * t2[static_cast<std::size_t>(j)];
            const double f = std::exp(-x);
            psi[static_cast<std::size_t>(j)] *= f;
            r += std::norm(psi[static_cast<std::size_t>(j)]);
        }
        const double inv = 1.0 / std::sqrt(r);
        for (cplx& a : psi) a *= inv;
        return std::log(r);
    }

    double advance_momentum(std::vector<cplx>& psi)
    {
        double scal = 0.0;
        if (cooked) {
            for (int d = 0; d < n; ++d) {
                cplx acc(0.0, 0.0);
                for (int k = 0; k < n; ++k) {
                    const int kp = (k + d) % n;
                    acc += std::conj(psi[static_cast<std::size_t>(kp)]) *
                           ops->kernel_at(kp, k) * psi[static_cast<std::size_t>(k)];
                }
                s_delta[static_cast<std::size_t>(d)] = acc;
            }
            for (int i = 0; i < n; ++i) {
                cplx acc(0.0, 0.0);
                for (int d = 0; d < n; ++d)
                    acc += s_delta[static_cast<std::size_t>(d)] *
                           plan.twiddle(static_cast<long long>(d) * i);
                m[static_cast<std::size_t>(i)] = acc.real();
            }
            double xm = 0.0, mm = 0.0;
            for (int i = 0; i < n; ++i) {
                xm += xi[static_cast<std::size_t>(i)] * m[static_cast<std::size_t>(i)];
                mm += m[static_cast<std::size_t>(i)] * m[static_cast<std::size_t>(i)];
            }
            scal = s * xm + s * s * mm;
        }
        for (int i = 0; i < n; ++i)
            ctil[static_cast<std::size_t>(i)] =
                s * xi[static_cast<std::size_t>(i)] + 2.0 * s * s * m[static_cast<std::size_t>(i)];
        double cmax = 0.0;
        for (int d = 0; d < n; ++d) {
            cplx acc(0.0, 0.0);
            for (int i = 0; i < n; ++i)
                acc += ctil[static_cast<std::size_t>(i)] *
                       plan.twiddle(static_cast<long long>(d) * i);
            chat[static_cast<std::size_t>(d)] = acc;
            cmax = std::max(cmax, std::abs(acc));
        }
        double bmax = 0.0;
        for (int k = 0; k < n; ++k) bmax = std::max(bmax, dtb[static_cast<std::size_t>(k)]);
        auto hmat = [&](const std::vector<cplx>& in, std::vector<cplx>& hout) {
            for (int kp = 0; kp < n; ++kp) {
                cplx acc(0.0, 0.0);
                for (int k = 0; k < n; ++k)
                    acc += ops->kernel_at(kp, k) *
                           chat[static_cast<std::size_t>((kp - k + n) % n)] *
                           in[static_cast<std::size_t>(k)];
                hout[static_cast<std::size_t>(kp)] =
                    acc - dtb[static_cast<std::size_t>(kp)] * in[static_cast<std::size_t>(kp)];
            }
        };
        expm_apply(hmat, psi, row_sum_max * cmax + bmax, scratch1, scratch2);
        double r = 0.0;
        for (const cplx& a : psi) r += std::norm(a);
        const double inv = 1.0 / std::sqrt(r);
        for (cplx& a : psi) a *= inv;
        return std::log(r) - 2.0 * scal;
    }

    /// |psi_j|^2 on the position lattice from the working representation
    void position_mass(const std::vector<cplx>& psi, std::vector<double>& out)
    {
        out.resize(static_cast<std::size_t>(n));
        if (momentum_basis) {
            plan.inverse(psi, scratch3);
            for (int j = 0; j < n; ++j)
                out[static_cast<std::size_t>(j)] = std::norm(scratch3[static_cast<std::size_t>(j)]);
        } else {
            for (int j = 0; j < n; ++j)
                out[static_cast<std::size_t>(j)] = std::norm(psi[static_cast<std::size_t>(j)]);
        }
    }
};

} // namespace detail

} // namespace qrcsl
