#pragma once

#include <cmath>
#include <vector>

#include "qrcsl/errors.hpp"
#include "qrcsl/numerics/linalg.hpp"
#include "qrcsl/trajectories/grid.hpp"
#include "qrcsl/trajectories/operators.hpp"

// Ensemble-mean dynamics: d rho / dt = -(1/2) sum_i dx [A_i, [A_i, rho]]
// in simulation units (lambda_sim = 1), integrated with classic RK4.
//
// CSL: the operators are position-diagonal, so the double commutator is
// an entrywise damping rho_jk' = -Gamma_jk rho_jk with
//   Gamma_jk = (1/2) sum_i dx ([A_i]_jj - [A_i]_kk)^2,
// and rho_jk(t) = rho_jk(0) e^{-Gamma_jk t} is available in closed form
// as an integrator cross-check.
//
// QRCSL: in the momentum basis the site sum enforces momentum
// conservation, giving the gain term
//   (sum_i dx A_i rho A_i)_{k'k} = L sum_q M_{k'q'} rho_{q'q} M_{qk},
//   q' = (q + k' - k) mod n,
// against the diagonal loss (1/2){B, rho} with B's momentum diagonal.
// Both forms preserve the trace identically up to rounding.

namespace qrcsl {

/// Gamma_jk for the diagonal CSL set, row-major n x n.
inline std::vector<double> csl_decay_matrix(const CollapseOperatorSet& ops)
{
    if (ops.quasirelativistic())
        throw config_error("csl_decay_matrix: defined for the diagonal CSL set");
    const int n = ops.n();
    std::vector<double> gamma(static_cast<std::size_t>(n) * n, 0.0);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) {
                const double d = ops.profile(i, j) - ops.profile(i, k);
                s += d * d;
            }
            gamma[static_cast<std::size_t>(j) * n + k] = 0.5 * ops.grid.dx * s;
        }
    return gamma;
}

/// Closed-form CSL solution rho_jk(t) = rho_jk(0) e^{-Gamma_jk t}.
inline DensityMatrixGrid csl_closed_form_evolve(const DensityMatrixGrid& rho0,
                                                const CollapseOperatorSet& ops, double t)
{
    rho0.validate();
    if (rho0.rho.n() != ops.n())
        throw config_error("csl_closed_form_evolve: size mismatch");
    if (!(t >= 0.0)) throw config_error("csl_closed_form_evolve: time must be >= 0");
    const std::vector<double> gamma = csl_decay_matrix(ops);
    const int n = ops.n();
    DensityMatrixGrid out = rho0;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            out.rho(j, k) *= std::exp(-gamma[static_cast<std::size_t>(j) * n + k] * t);
    return out;
}

inline DensityMatrixGrid master_evolve(const DensityMatrixGrid& rho0,
                                       const CollapseOperatorSet& ops, double t_final, double dt)
{
    rho0.validate();
    const int n = ops.n();
    if (rho0.rho.n() != n) throw config_error("master_evolve: size mismatch");
    if (!(t_final >= 0.0)) throw config_error("master_evolve: t_final must be >= 0");
    if (!(dt > 0.0)) throw config_error("master_evolve: dt must be positive");
    if (!(dt * ops.generator_norm < 0.1))
        throw config_error("master_evolve: stability bound violated, need dt * 2||B|| < 0.1");

    const bool qr = ops.quasirelativistic();
    const double L = ops.grid.length();
    std::vector<double> gamma;
    if (!qr) gamma = csl_decay_matrix(ops);

    CMatrix rho(n);
    DftPlan plan(qr ? n : 0);
    CMatrix f;
    if (qr) {
        f = plan.matrix();
        rho = matmul(f, matmul(rho0.rho, adjoint(f)));
    } else {
        rho = rho0.rho;
    }

    auto rhs = [&](const CMatrix& r, CMatrix& out) {
        if (!qr) {
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    out(j, k) = -gamma[static_cast<std::size_t>(j) * n + k] * r(j, k);
            return;
        }
        for (int kp = 0; kp < n; ++kp)
            for (int k = 0; k < n; ++k) {
                cplx gain(0.0, 0.0);
                for (int q = 0; q < n; ++q) {
                    const int qp = (q + kp - k + n) % n;
                    gain += ops.kernel_at(kp, qp) * r(qp, q) * ops.kernel_at(q, k);
                }
                out(kp, k) = L * gain -
                             0.5 *
                                 (ops.b_momentum[static_cast<std::size_t>(kp)] +
                                  ops.b_momentum[static_cast<std::size_t>(k)]) *
                                 r(kp, k);
            }
    };

    CMatrix k1(n), k2(n), k3(n), k4(n), work(n);
    auto rk4_step = [&](double h) {
        rhs(rho, k1);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) work(j, k) = rho(j, k) + 0.5 * h * k1(j, k);
        rhs(work, k2);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) work(j, k) = rho(j, k) + 0.5 * h * k2(j, k);
        rhs(work, k3);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) work(j, k) = rho(j, k) + h * k3(j, k);
        rhs(work, k4);
        const double h6 = h / 6.0;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                rho(j, k) += h6 * (k1(j, k) + 2.0 * k2(j, k) + 2.0 * k3(j, k) + k4(j, k));
    };

    const int n_full = static_cast<int>(std::floor(t_final / dt + 1e-12));
    for (int st = 0; st < n_full; ++st) rk4_step(dt);
    const double rem = t_final - n_full * dt;
    if (rem > 1e-12 * dt) rk4_step(rem);

    DensityMatrixGrid out;
    out.rho = qr ? matmul(adjoint(f), matmul(rho, f)) : rho;

    const double tr0 = rho0.trace();
    const double drift = std::abs(out.trace() - tr0);
    if (drift > 1e-8 * std::max(1.0, t_final) * std::max(std::abs(tr0), 1e-300))
        throw accuracy_error("master_evolve: trace drifted beyond tolerance", drift, 1e-8);
    out.validate();
    double min_eig = 0.0;
    for (double ev : eigenvalues_hermitian(out.rho)) min_eig = std::min(min_eig, ev);
    if (min_eig < -1e-8 * std::max(1.0, std::abs(tr0)))
        throw accuracy_error("master_evolve: positivity violated beyond tolerance", min_eig, 1e-8);
    return out;
}

} // namespace qrcsl
