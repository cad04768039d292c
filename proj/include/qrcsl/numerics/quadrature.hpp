#pragma once

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "qrcsl/errors.hpp"

// Adaptive quadrature over finite, semi-infinite and doubly infinite
// intervals.  Thin contract over Boost.Math double-exponential rules: the
// caller states a relative tolerance and either gets a value whose estimated
// error meets it or an accuracy_error carrying the best estimate.

namespace qrcsl {

struct QuadResult {
    double value;
    double error; // absolute error estimate
};

inline constexpr double quad_default_rel_tol = 1e-10;

namespace detail {

inline void check_quad(double value, double error, double l1, double rel_tol,
                       const char* what)
{
    if (!std::isfinite(value))
        throw accuracy_error(std::string(what) + ": non-finite integral estimate", value, error);
    // Error is judged against the L1 mass: for integrands without internal
    // cancellation this coincides with the relative error of the value.
    const double scale = std::max({std::abs(value), l1, 1e-300});
    if (!(error <= rel_tol * scale))
        throw accuracy_error(std::string(what) + ": tolerance not reached", value, error);
}

} // namespace detail

/// Integrate f over (a, b); either endpoint may be +-infinity.  Endpoint
/// singularities that are integrable are handled by the variable transform.
template <typename F>
QuadResult quad_adaptive(F&& f, double a, double b, double rel_tol = quad_default_rel_tol)
{
    if (!(rel_tol > 0.0))
        throw config_error("quad_adaptive: relative tolerance must be positive");
    if (!(a < b))
        throw config_error("quad_adaptive: empty or reversed interval");

    const double inf = std::numeric_limits<double>::infinity();
    double error = 0.0, l1 = 0.0;

    // The double-exponential rules probe extreme abscissae; an integrand that
    // goes non-finite there surfaces as a typed numerical failure, not as a
    // stray exception from the backend.
    try {
        if (a > -inf && b < inf) {
            boost::math::quadrature::tanh_sinh<double> integ;
            const double v = integ.integrate(f, a, b, rel_tol, &error, &l1);
            detail::check_quad(v, error, l1, rel_tol, "quad_adaptive[finite]");
            return {v, error};
        }
        if (a > -inf || b < inf) {
            boost::math::quadrature::exp_sinh<double> integ;
            const double v = integ.integrate(f, a, b, rel_tol, &error, &l1);
            detail::check_quad(v, error, l1, rel_tol, "quad_adaptive[half-infinite]");
            return {v, error};
        }
        boost::math::quadrature::sinh_sinh<double> integ;
        const double v = integ.integrate(f, rel_tol, &error, &l1);
        detail::check_quad(v, error, l1, rel_tol, "quad_adaptive[infinite]");
        return {v, error};
    } catch (const accuracy_error&) {
        throw;
    } catch (const std::exception& e) {
        throw accuracy_error(std::string("quad_adaptive: integrand evaluation failed: ") + e.what(),
                             std::numeric_limits<double>::quiet_NaN(), inf);
    }
}

} // namespace qrcsl
