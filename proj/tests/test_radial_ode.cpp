#include "finpoisson/error.hpp"
#include "finpoisson/model_spaces.hpp"
#include "finpoisson/radial_ode.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace finpoisson;

namespace {

ode::OdeParams params(int n, double mu, double c, double rho)
{
    ode::OdeParams p;
    p.sigma = special::SigmaParams{n, mu, c, rho};
    return p;
}

double sup_rel(const ode::RadialSolution& sol, auto&& exact, double r_min)
{
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < sol.r.size(); ++i) {
        if (sol.r[i] >= r_min) {
            const double e = exact(sol.r[i]);
            num = std::max(num, std::abs(sol.f[i] - e));
            den = std::max(den, std::abs(e));
        }
    }
    return num / den;
}

} // namespace

TEST_CASE("flat case reproduces the power-law closed form")
{
    for (double mu : {0.0, 0.2, 0.45}) {
        const auto p = params(4, mu, 0.0, 2.0);
        const auto sol = ode::solve_Q(p);
        const double a = p.sigma.alpha_plus();
        auto exact = [&](double r) { return (4.0 * std::pow(r / 2.0, a) - r * r) / (mu + 8.0); };
        CHECK(sup_rel(sol, exact, 0.02) <= 1e-8);
        CHECK(sol.alpha_plus == doctest::Approx(a).epsilon(1e-15));
    }
}

TEST_CASE("mu = 0 with negative curvature matches w_c(rho) - w_c(r)")
{
    const auto p = params(3, 0.0, -1.0, 1.0);
    const auto sol = ode::solve_Q(p);
    const double wr = model::w_c(-1.0, 3, 1.0);
    CHECK(sup_rel(sol, [&](double r) { return wr - model::w_c(-1.0, 3, r); }, 0.01) <= 1e-8);
}

TEST_CASE("solution is non-negative, non-increasing and vanishes at rho")
{
    const auto p = params(3, 0.2, -1.0, 1.0);
    const auto sol = ode::solve_Q(p);
    CHECK(std::abs(sol.f.back()) <= 1e-12);
    for (std::size_t i = 1; i < sol.f.size(); ++i) {
        CHECK(sol.f[i] >= -1e-14);
        CHECK(sol.f[i] <= sol.f[i - 1] + 1e-14);
    }
    CHECK(ode::residual_check(sol, p) <= 1e-8);
}

TEST_CASE("energy integral is finite and stable in the startup radius")
{
    auto p = params(5, 1.5, -0.5, 1.0);
    p.eps = 1e-6;
    const double e1 = ode::energy_integral(ode::solve_Q(p), 5);
    p.eps = 5e-7;
    const double e2 = ode::energy_integral(ode::solve_Q(p), 5);
    CHECK(std::isfinite(e1));
    CHECK(std::abs(e1 - e2) <= 1e-8 * std::abs(e1));
}

TEST_CASE("interpolation reproduces grid values and explicit radii")
{
    auto p = params(3, 0.1, -1.0, 1.0);
    const auto sol = ode::solve_Q(p);
    CHECK(ode::interpolate(sol, sol.r[100]) == doctest::Approx(sol.f[100]).epsilon(1e-14));
    p.radii = {0.1, 0.37, 0.8};
    const auto at = ode::solve_Q(p);
    for (std::size_t i = 0; i < p.radii.size(); ++i) {
        const auto it = std::find(at.r.begin(), at.r.end(), p.radii[i]);
        REQUIRE(it != at.r.end());
        CHECK(at.f[it - at.r.begin()] == doctest::Approx(ode::interpolate(sol, p.radii[i])).epsilon(1e-9));
    }
}

TEST_CASE("ordering in curvature and radius")
{
    const std::vector<double> rhos{0.5, 1.0};
    const std::vector<double> cs{-1.0, -0.5, 0.0};
    const auto rep = ode::sigma_monotonicity_scan(3, 0.1, rhos, cs);
    CHECK(rep.comparisons > 0);
    CHECK(rep.curvature_order_ok);
    CHECK(rep.radius_order_ok);
    CHECK(rep.nonnegative_ok);
    CHECK(rep.nonincreasing_ok);
}

TEST_CASE("invalid solver settings are rejected")
{
    auto p = params(3, 0.1, 0.0, 1.0);
    p.grid_n = 8;
    CHECK_THROWS_AS(p.validate(), Error);
    p = params(3, 0.1, 0.0, 1.0);
    p.eps = 2.0;
    CHECK_THROWS_AS(ode::solve_Q(p), Error);
}
