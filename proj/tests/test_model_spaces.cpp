#include "finpoisson/model_spaces.hpp"
#include "finpoisson/quadrature.hpp"
#include "finpoisson/randers.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace finpoisson;

TEST_CASE("comparison functions against elementary closed forms")
{
    for (double r : {1e-4, 0.1, 1.0, 3.0}) {
        CHECK(model::s_c(0.0, r) == doctest::Approx(r).epsilon(1e-15));
        CHECK(model::s_c(-1.0, r) == doctest::Approx(std::sinh(r)).epsilon(1e-14));
        CHECK(model::s_c(-0.25, r) == doctest::Approx(2 * std::sinh(r / 2)).epsilon(1e-14));
        CHECK(model::ct_c(-1.0, r) == doctest::Approx(1 / std::tanh(r)).epsilon(1e-13));
        CHECK(model::s_c_prime(-1.0, r) == doctest::Approx(std::cosh(r)).epsilon(1e-14));
    }
    CHECK(model::r_ct_c(-1.0, 0.0) == 1.0);
}

TEST_CASE("model ball volumes")
{
    const double pi = std::numbers::pi;
    CHECK(model::V_cn(0.0, 3, 2.0) == doctest::Approx(4.0 / 3.0 * pi * 8.0).epsilon(1e-12));
    CHECK(model::V_cn(-1.0, 2, 1.5) == doctest::Approx(2 * pi * (std::cosh(1.5) - 1)).epsilon(1e-12));
    // sinh^2 integrates to (sinh(2r) - 2r) / 4.
    CHECK(model::V_cn(-1.0, 3, 1.0) == doctest::Approx(pi * (std::sinh(2.0) - 2.0)).epsilon(1e-12));
}

TEST_CASE("w_c has radial Laplacian one")
{
    CHECK(model::w_c(0.0, 3, 0.7) == doctest::Approx(0.49 / 6).epsilon(1e-13));
    for (double c : {-0.5, -1.0}) {
        for (int n : {3, 4}) {
            const double r = 0.8;
            const double h = 1e-3;
            const double wp = (model::w_c(c, n, r + h) - model::w_c(c, n, r - h)) / (2 * h);
            const double wpp =
                (model::w_c(c, n, r + h) - 2 * model::w_c(c, n, r) + model::w_c(c, n, r - h)) / (h * h);
            CHECK(wpp + model::radial_laplacian(c, n, r) * wp == doctest::Approx(1.0).epsilon(1e-5));
        }
    }
}

TEST_CASE("disc distances integrate the metric along rays")
{
    for (double r : {0.3, 1.0, 1.8}) {
        const auto out = quad::integrate(
            [](double s) { return model::poincare_metric({s, 0.0}, 1.0, 0.0); }, 0.0, r, {1e-13, 1e-13});
        const auto in = quad::integrate(
            [](double s) { return model::poincare_metric({s, 0.0}, -1.0, 0.0); }, 0.0, r, {1e-13, 1e-13});
        CHECK(model::poincare_dist_from_origin(r) == doctest::Approx(out.value).epsilon(1e-11));
        CHECK(model::poincare_dist_to_origin(r) == doctest::Approx(in.value).epsilon(1e-11));
        CHECK(model::poincare_reversibility(r) == doctest::Approx(std::pow((2 + r) / (2 - r), 2)).epsilon(1e-14));
    }
}

TEST_CASE("disc density and dual along the distance gradient")
{
    const auto s = RandersStructure::poincare_disc();
    for (double r : {0.25, 1.0, 1.5}) {
        Vec x(2);
        x << r, 0.0;
        CHECK(model::poincare_density(r) == doctest::Approx(hausdorff_density(s, x) * r).epsilon(1e-12));
        const auto plus = model::poincare_dual_along_distance(r, +1);
        CHECK(plus.via_dual == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(plus.closed_form == doctest::Approx(plus.via_dual).epsilon(1e-12));
        const auto minus = model::poincare_dual_along_distance(r, -1);
        CHECK(minus.closed_form == doctest::Approx(minus.via_dual).epsilon(1e-11));
    }
}
