#pragma once

// Thin adaptive-quadrature layer over Boost.Math's Gauss-Kronrod rules. All
// numeric integration in the library goes through here so tolerances and the
// accuracy-failure contract live in one place.

#include "finpoisson/error.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <span>
#include <string>
#include <vector>

namespace finpoisson::quad {

struct Tolerance {
    double abs = 1e-12;
    double rel = 1e-10;
    unsigned max_depth = 15;
};

/// Relative accuracy below which the Gauss-Kronrod error estimate is noise.
inline constexpr double noise_floor = 1e-10;

struct Result {
    double value = 0.0;
    double error = 0.0;
};

/// Adaptive G10K21 on [a, b]. Throws accuracy_failure when the error estimate
/// exceeds max(abs, rel * |value|).
template <class F>
Result integrate(F&& f, double a, double b, Tolerance tol = {})
{
    using Rule = boost::math::quadrature::gauss_kronrod<double, 21>;
    if (a == b) {
        return {};
    }
    // A few ulps wide: the rule's error estimate is meaningless there.
    if (std::abs(b - a) <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b))) {
        return {f(0.5 * (a + b)) * (b - a), 0.0};
    }
    double err = 0.0;
    double l1 = 0.0;
    // Boost stops on a relative criterion against the L1 norm, so the absolute
    // floor is turned into a relative one from a single-panel estimate. The
    // |G - K| estimate itself bottoms out near 1e-11 relative; asking for less
    // only drives bisection to max_depth while the summed estimate grows.
    Rule::integrate(f, a, b, 0, 0.0, &err, &l1);
    const double rel = l1 > 0.0 ? std::max(tol.rel, tol.abs / l1) : tol.rel;
    const double value =
        Rule::integrate(f, a, b, tol.max_depth, std::max(rel * 1e-1, noise_floor), &err, &l1);
    auto interval = [&] {
        std::ostringstream os;
        os.precision(17);
        os << "[" << a << ", " << b << "]";
        return os.str();
    };
    if (!std::isfinite(value)) {
        fail(ErrorKind::accuracy_failure, "non-finite integral on " + interval());
    }
    if (err > std::max({tol.abs, tol.rel * std::abs(value), noise_floor * l1})) {
        std::ostringstream os;
        os << "quadrature error estimate " << err << " above tolerance (value " << value << ") on ";
        fail(ErrorKind::accuracy_failure, os.str() + interval());
    }
    return {value, err};
}

/// Integrates over consecutive pieces [p0,p1], [p1,p2], ... so kinks and
/// near-singular points can be placed on panel boundaries.
template <class F>
Result integrate_pieces(F&& f, std::span<const double> points, Tolerance tol = {})
{
    Result total;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const Result piece = integrate(f, points[i], points[i + 1], tol);
        total.value += piece.value;
        total.error += piece.error;
    }
    return total;
}

template <class F>
Result integrate_pieces(F&& f, std::initializer_list<double> points, Tolerance tol = {})
{
    return integrate_pieces(std::forward<F>(f), std::span<const double>(points.begin(), points.size()),
                            tol);
}

/// Fixed 20-point Gauss-Legendre rule mapped to [a, b].
template <class F>
double gauss_legendre20(F&& f, double a, double b)
{
    using Rule = boost::math::quadrature::gauss<double, 20>;
    return Rule::integrate(f, a, b);
}

} // namespace finpoisson::quad
