#include "finpoisson/randers.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace finpoisson;

namespace {

Vec v2(double a, double b)
{
    Vec v(2);
    v << a, b;
    return v;
}

// Dual of |y| + b.y for |b| < 1, from the quadric form of the unit ball.
double minkowski_dual_oracle(const Vec& b, const Vec& alpha)
{
    const double bb = b.squaredNorm();
    const double ab = alpha.dot(b);
    return (std::sqrt((1.0 - bb) * alpha.squaredNorm() + ab * ab) - ab) / (1.0 - bb);
}

bool throws_kind(ErrorKind k, auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.kind() == k;
    }
    return false;
}

} // namespace

TEST_CASE("euclidean norm and dual coincide with the Euclidean length")
{
    const auto s = RandersStructure::euclidean(3);
    Vec x = Vec::Zero(3);
    Vec y(3);
    y << 1.0, -2.0, 2.0;
    CHECK(eval_F(s, x, y) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(eval_F_dual(s, x, y) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(eval_F_sym_dual(s, x, y) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(reversibility(s, x) == 1.0);
}

TEST_CASE("minkowski randers values and reversibility constants")
{
    for (double b : {0.1, 0.3, 0.5, 0.9}) {
        const auto s = RandersStructure::minkowski_randers(v2(b, 0.0));
        const Vec x = Vec::Zero(2);
        CHECK(eval_F(s, x, v2(1, 0)) == doctest::Approx(1.0 + b).epsilon(1e-15));
        CHECK(eval_F(s, x, v2(-1, 0)) == doctest::Approx(1.0 - b).epsilon(1e-15));
        const auto k = metric_constants(s, x);
        CHECK(k.r_F == doctest::Approx((1 + b) / (1 - b)).epsilon(1e-14));
        CHECK(k.l_F * k.r_F * k.r_F == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(reversibility_numeric(norm_fn(s), x) == doctest::Approx(k.r_F).epsilon(1e-6));
    }
}

TEST_CASE("dual norm matches the quadric oracle and the sampled supremum")
{
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    const Vec b = v2(0.4, -0.25);
    const auto s = RandersStructure::minkowski_randers(b);
    const Vec x = Vec::Zero(2);
    for (int i = 0; i < 200; ++i) {
        const Vec a = v2(g(rng), g(rng));
        const double exact = minkowski_dual_oracle(b, a);
        CHECK(eval_F_dual(s, x, a) == doctest::Approx(exact).epsilon(1e-13));
        CHECK(polar_transform_numeric(norm_fn(s), x, a) == doctest::Approx(exact).epsilon(1e-9));
    }
}

TEST_CASE("legendre transform identities")
{
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    const auto s = RandersStructure::minkowski_randers(v2(0.6, 0.2));
    const Vec x = Vec::Zero(2);
    for (int i = 0; i < 100; ++i) {
        const Vec a = v2(g(rng), g(rng));
        const double fd = eval_F_dual(s, x, a);
        const Vec J = legendre(s, x, a);
        CHECK(eval_F(s, x, J) == doctest::Approx(fd).epsilon(1e-12));
        CHECK(a.dot(J) == doctest::Approx(fd * fd).epsilon(1e-12));
        const Vec Jn = legendre_numeric(dual_norm_fn(s), x, a);
        CHECK((J - Jn).norm() <= 1e-6 * J.norm());
    }
}

TEST_CASE("symmetrized dual lies between the scaled dual norms")
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    const auto s = RandersStructure::minkowski_randers(v2(0.5, 0.0));
    const Vec x = Vec::Zero(2);
    const double rF = metric_constants(s, x).r_F;
    for (int i = 0; i < 500; ++i) {
        const Vec a = v2(g(rng), g(rng));
        const double d = eval_F_dual(s, x, a);
        const double ds = eval_F_sym_dual(s, x, a);
        CHECK(ds >= d / std::sqrt((1 + rF * rF) / 2) * (1 - 1e-12));
        CHECK(ds <= d / std::sqrt((1 + 1 / (rF * rF)) / 2) * (1 + 1e-12));
    }
}

TEST_CASE("hausdorff density is pi over the ellipse area")
{
    for (double b : {0.0, 0.3, 0.7}) {
        const auto s = RandersStructure::minkowski_randers(v2(0.0, b));
        const Vec x = Vec::Zero(2);
        const double area = std::numbers::pi / std::pow(1 - b * b, 1.5);
        CHECK(unit_ball_volume_numeric(norm_fn(s), x, 2) == doctest::Approx(area).epsilon(1e-8));
        CHECK(hausdorff_density(s, x) == doctest::Approx(std::numbers::pi / area).epsilon(1e-14));
    }
    CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-15));
}

TEST_CASE("poincare disc reversibility and domain")
{
    const auto s = RandersStructure::poincare_disc();
    for (double r : {0.2, 1.0, 1.7}) {
        const double rf = std::pow((2 + r) / (2 - r), 2);
        CHECK(reversibility(s, v2(r, 0.0)) == doctest::Approx(rf).epsilon(1e-12));
    }
    CHECK(throws_kind(ErrorKind::domain_error, [&] { (void)s.at(v2(2.5, 0.0)); }));
}

TEST_CASE("invalid inputs raise tagged errors")
{
    CHECK(throws_kind(ErrorKind::invalid_structure, [] {
        const auto s = RandersStructure::minkowski_randers(v2(1.0, 0.0));
        (void)eval_F(s, Vec::Zero(2), v2(1, 0));
    }));
    CHECK(throws_kind(ErrorKind::invalid_argument, [] {
        (void)RandersStructure::from_json(nlohmann::json{{"kind", "euclidean"}, {"dim", 2}, {"extra", 1}});
    }));
    const auto s = RandersStructure::from_json(nlohmann::json{{"kind", "minkowski_randers"}, {"b", {0.2, 0.1}}});
    CHECK(s.dim() == 2);
    CHECK(s.is_minkowski());
}

TEST_CASE("positive homogeneity and triangle inequality")
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    const auto s = RandersStructure::minkowski_randers(v2(-0.3, 0.7));
    const Vec x = Vec::Zero(2);
    for (int i = 0; i < 200; ++i) {
        const Vec y = v2(g(rng), g(rng));
        const Vec z = v2(g(rng), g(rng));
        CHECK(eval_F(s, x, 2.5 * y) == doctest::Approx(2.5 * eval_F(s, x, y)).epsilon(1e-14));
        CHECK(eval_F(s, x, y + z) <= eval_F(s, x, y) + eval_F(s, x, z) + 1e-14);
    }
}
