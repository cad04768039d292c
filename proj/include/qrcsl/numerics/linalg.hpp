#pragma once

#include <cassert>
#include <cmath>
#include <complex>
#include <vector>

// Dense complex linear algebra for the small grids used by the trajectory
// and master-equation code (n <= a few hundred).  Row-major storage; no
// external BLAS/LAPACK dependency.

namespace qrcsl {

using cplx = std::complex<double>;

/// Square complex matrix, row-major.
class CMatrix {
public:
    CMatrix() = default;
    explicit CMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n) {}

    int n() const { return n_; }
    cplx& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    const cplx& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    cplx* data() { return a_.data(); }
    const cplx* data() const { return a_.data(); }

    CMatrix& operator+=(const CMatrix& o)
    {
        assert(n_ == o.n_);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    CMatrix& operator-=(const CMatrix& o)
    {
        assert(n_ == o.n_);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    CMatrix& operator*=(cplx s)
    {
        for (auto& v : a_) v *= s;
        return *this;
    }

private:
    int n_ = 0;
    std::vector<cplx> a_;
};

inline std::vector<cplx> matvec(const CMatrix& m, const std::vector<cplx>& v)
{
    const int n = m.n();
    assert(static_cast<int>(v.size()) == n);
    std::vector<cplx> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        cplx s = 0.0;
        const cplx* row = m.data() + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) s += row[j] * v[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = s;
    }
    return out;
}

inline CMatrix matmul(const CMatrix& a, const CMatrix& b)
{
    const int n = a.n();
    assert(b.n() == n);
    CMatrix c(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx(0.0)) continue;
            for (int j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline CMatrix adjoint(const CMatrix& a)
{
    const int n = a.n();
    CMatrix c(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) c(i, j) = std::conj(a(j, i));
    return c;
}

inline double frobenius_norm(const CMatrix& a)
{
    double s = 0.0;
    const int n = a.n();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

inline double max_abs_entry(const CMatrix& a)
{
    double s = 0.0;
    const int n = a.n();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s = std::max(s, std::abs(a(i, j)));
    return s;
}

inline double herm_defect(const CMatrix& a)
{
    double s = 0.0;
    const int n = a.n();
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) s = std::max(s, std::abs(a(i, j) - std::conj(a(j, i))));
    return s;
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations,
/// ascending order.  In-place on a copy; adequate for n up to a few hundred.
inline std::vector<double> jacobi_eigenvalues_sym(std::vector<double> m, int n)
{
    auto at = [&](int i, int j) -> double& { return m[static_cast<std::size_t>(i) * n + j]; };
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
        if (off < 1e-26 * n * n) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = at(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

/// Eigenvalues of a Hermitian matrix, ascending.  Uses the standard real
/// embedding [[Re, -Im], [Im, Re]], whose spectrum is that of the input with
/// every eigenvalue doubled.
inline std::vector<double> eigenvalues_hermitian(const CMatrix& h)
{
    const int n = h.n();
    const int m = 2 * n;
    std::vector<double> e(static_cast<std::size_t>(m) * m, 0.0);
    auto at = [&](int i, int j) -> double& { return e[static_cast<std::size_t>(i) * m + j]; };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double re = 0.5 * (h(i, j).real() + h(j, i).real());
            const double im = 0.5 * (h(i, j).imag() - h(j, i).imag());
            at(i, j) = re;
            at(n + i, n + j) = re;
            at(n + i, j) = im;
            at(i, n + j) = -im;
        }
    std::vector<double> all = jacobi_eigenvalues_sym(std::move(e), m);
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = all[static_cast<std::size_t>(2 * i)];
    return ev;
}

/// Spectral norm of a Hermitian matrix (max |eigenvalue|).
inline double spectral_norm_hermitian(const CMatrix& h)
{
    const std::vector<double> ev = eigenvalues_hermitian(h);
    return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

} // namespace qrcsl
