#include "finpoisson/model_spaces.hpp"

#include "finpoisson/error.hpp"
#include "finpoisson/quadrature.hpp"
#include "finpoisson/randers.hpp"

#include <cmath>
#include <string>

namespace finpoisson::model {

namespace {

void check_curvature(double c)
{
    require(std::isfinite(c) && c <= 0.0, ErrorKind::domain_error,
            "curvature must be finite and non-positive, got " + std::to_string(c));
}

void check_disc_radius(double r)
{
    require(std::isfinite(r) && r >= 0.0 && r < 2.0, ErrorKind::domain_error,
            "disc radius must lie in [0, 2), got " + std::to_string(r));
}

// x coth x for small x.
double x_coth_x_series(double x)
{
    const double x2 = x * x;
    return 1.0 + x2 / 3.0 - x2 * x2 / 45.0 + 2.0 * x2 * x2 * x2 / 945.0;
}

constexpr double series_cutoff = 1e-4;

} // namespace

double s_c(double c, double r)
{
    check_curvature(c);
    require(r >= 0.0, ErrorKind::domain_error, "s_c needs r >= 0");
    if (c == 0.0) {
        return r;
    }
    const double k = std::sqrt(-c);
    return std::sinh(k * r) / k;
}

double s_c_prime(double c, double r)
{
    check_curvature(c);
    if (c == 0.0) {
        return 1.0;
    }
    return std::cosh(std::sqrt(-c) * r);
}

double r_ct_c(double c, double r)
{
    check_curvature(c);
    require(r >= 0.0, ErrorKind::domain_error, "r ct_c needs r >= 0");
    if (c == 0.0) {
        return 1.0;
    }
    const double x = std::sqrt(-c) * r;
    if (x < series_cutoff) {
        return x_coth_x_series(x);
    }
    return x / std::tanh(x);
}

double ct_c(double c, double r)
{
    check_curvature(c);
    require(r > 0.0, ErrorKind::domain_error, "ct_c needs r > 0, got " + std::to_string(r));
    if (c == 0.0) {
        return 1.0 / r;
    }
    return r_ct_c(c, r) / r;
}

double V_cn(double c, int n, double rho)
{
    check_curvature(c);
    require(n >= 2, ErrorKind::invalid_argument, "V_cn needs n >= 2");
    require(rho > 0.0 && std::isfinite(rho), ErrorKind::domain_error, "V_cn needs rho > 0");
    const double omega = unit_ball_volume(n);
    if (c == 0.0) {
        return omega * std::pow(rho, n);
    }
    const auto res = quad::integrate([&](double t) { return std::pow(s_c(c, t), n - 1); }, 0.0, rho);
    return n * omega * res.value;
}

double w_c(double c, int n, double r)
{
    check_curvature(c);
    require(n >= 2, ErrorKind::invalid_argument, "w_c needs n >= 2");
    require(r >= 0.0 && std::isfinite(r), ErrorKind::domain_error, "w_c needs r >= 0");
    if (r == 0.0) {
        return 0.0;
    }
    auto weight = [&](double t) { return std::pow(s_c(c, t), n - 1); };
    auto panels = [&](int m) {
        const double h = r / m;
        double inner_at_start = 0.0;
        double total = 0.0;
        for (int p = 0; p < m; ++p) {
            const double a = p * h;
            const double b = a + h;
            total += quad::gauss_legendre20(
                [&](double s) {
                    const double inner = inner_at_start + quad::gauss_legendre20(weight, a, s);
                    return inner / weight(s);
                },
                a, b);
            inner_at_start += quad::gauss_legendre20(weight, a, b);
        }
        return total;
    };
    int m = 2;
    double prev = panels(m);
    for (m = 4; m <= 4096; m *= 2) {
        const double next = panels(m);
        if (std::abs(next - prev) <= std::max(1e-15, 1e-14 * std::abs(next))) {
            return next;
        }
        prev = next;
    }
    fail(ErrorKind::accuracy_failure, "w_c panel refinement did not converge");
}

double radial_laplacian(double c, int n, double r)
{
    require(n >= 2, ErrorKind::invalid_argument, "radial_laplacian needs n >= 2");
    return (n - 1) * ct_c(c, r);
}

double poincare_metric(PoincarePoint x, double p, double q)
{
    check_disc_radius(x.r);
    const double r = x.r;
    const double r2 = r * r;
    return 4.0 * std::sqrt(p * p + r2 * q * q) / (4.0 - r2) + 16.0 * p * r / (16.0 - r2 * r2);
}

double poincare_dist_from_origin(double r)
{
    check_disc_radius(r);
    return std::log((4.0 + r * r) / ((2.0 - r) * (2.0 - r)));
}

double poincare_dist_to_origin(double r)
{
    check_disc_radius(r);
    return std::log((2.0 + r) * (2.0 + r) / (4.0 + r * r));
}

double poincare_density(double r)
{
    check_disc_radius(r);
    const double d = 4.0 + r * r;
    return 16.0 * r * (4.0 - r * r) / (d * d * d);
}

double poincare_reversibility(double r)
{
    check_disc_radius(r);
    const double q = (2.0 + r) / (2.0 - r);
    return q * q;
}

double poincare_distance_derivative(double r)
{
    check_disc_radius(r);
    return 4.0 * (2.0 + r) / ((2.0 - r) * (4.0 + r * r));
}

DualAlongDistance poincare_dual_along_distance(double r, int sign)
{
    check_disc_radius(r);
    require(r > 0.0, ErrorKind::domain_error, "D d_F(0, x) has no direction at the origin");
    require(sign == 1 || sign == -1, ErrorKind::invalid_argument, "sign must be +1 or -1");
    static const RandersStructure disc = RandersStructure::poincare_disc();
    DualAlongDistance out;
    out.closed_form = sign > 0 ? 1.0 : poincare_reversibility(r);
    // At (r, 0) the covector dr coincides with dx.
    Vec x(2);
    x << r, 0.0;
    Vec alpha(2);
    alpha << sign * poincare_distance_derivative(r), 0.0;
    out.via_dual = eval_F_dual(disc, x, alpha);
    return out;
}

} // namespace finpoisson::model
