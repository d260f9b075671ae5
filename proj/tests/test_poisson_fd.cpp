#include "finpoisson/poisson_fd.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace finpoisson;

namespace {

pde::GridProblem randers(double b, pde::BallKind kind, int N = 161)
{
    pde::GridProblem p;
    Vec beta(2);
    beta << b, 0.0;
    p.norm = RandersStructure::minkowski_randers(beta);
    p.ball_kind = kind;
    p.N = N;
    return p;
}

} // namespace

TEST_CASE("euclidean disc against (1 - r^2) / 4")
{
    pde::GridProblem p;
    const auto g = pde::build_domain(p);
    const auto r = pde::solve(p, g);
    const auto err = pde::forward_error(p, g, r.u);
    CHECK(err.sup_rel <= 2e-3);
    CHECK(err.u_center == doctest::Approx(0.25).epsilon(1e-3));
}

TEST_CASE("randers forward ball against (1 - F^2) / 4")
{
    const auto p = randers(0.3, pde::BallKind::forward);
    const auto g = pde::build_domain(p);
    const auto r = pde::solve(p, g);
    CHECK(pde::forward_error(p, g, r.u).sup_rel <= 5e-3);
}

TEST_CASE("energy decreases monotonically along the iteration")
{
    const auto p = randers(0.5, pde::BallKind::backward, 97);
    const auto g = pde::build_domain(p);
    const auto r = pde::solve(p, g);
    REQUIRE(r.energy_history.size() >= 2);
    for (std::size_t i = 1; i < r.energy_history.size(); ++i) {
        CHECK(r.energy_history[i] <= r.energy_history[i - 1] + 1e-14 * std::abs(r.energy_history[i - 1]));
    }
    CHECK(r.energy == doctest::Approx(pde::energy(p, g, r.u)).epsilon(1e-14));
}

TEST_CASE("two initializations converge to the same minimizer")
{
    const auto p = randers(0.3, pde::BallKind::backward);
    const auto g = pde::build_domain(p);
    const auto a = pde::solve(p, g);
    pde::GridFunction start;
    start.u.assign(a.u.u.size(), 0.0);
    for (int j = 0; j < g.N; ++j) {
        for (int i = 0; i < g.N; ++i) {
            const int k = g.index(i, j);
            if (g.interior[k]) {
                start.u[k] = 0.5 + 0.1 * std::sin(7.0 * g.x(i)) * std::cos(5.0 * g.y(j));
            }
        }
    }
    const auto b = pde::solve(p, g, {}, &start);
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t k = 0; k < a.u.u.size(); ++k) {
        diff = std::max(diff, std::abs(a.u.u[k] - b.u.u[k]));
        scale = std::max(scale, std::abs(a.u.u[k]));
    }
    CHECK(diff / scale <= 1e-6);
}

TEST_CASE("backward ball sandwich")
{
    const auto p = randers(0.3, pde::BallKind::backward);
    const auto g = pde::build_domain(p);
    const auto r = pde::solve(p, g);
    const auto s = pde::backward_sandwich(p, g, r.u);
    CHECK(s.holds);
    CHECK(s.lower_slack >= -1e-3);
    CHECK(s.upper_slack >= -1e-3);
    CHECK(s.r_F == doctest::Approx(1.3 / 0.7).epsilon(1e-14));
}

TEST_CASE("uniform convexity of the discrete energy")
{
    const auto p = randers(0.4, pde::BallKind::forward, 81);
    const auto g = pde::build_domain(p);
    pde::GridFunction u;
    pde::GridFunction v;
    u.u.assign(static_cast<std::size_t>(g.N * g.N), 0.0);
    v.u = u.u;
    for (int j = 0; j < g.N; ++j) {
        for (int i = 0; i < g.N; ++i) {
            const int k = g.index(i, j);
            if (g.interior[k]) {
                u.u[k] = pde::forward_exact(p, g.x(i), g.y(j));
                v.u[k] = std::cos(3.0 * g.x(i)) * std::sin(2.0 * g.y(j) + 0.3);
            }
        }
    }
    const auto c = pde::convexity_probe(p, g, u, v, {0.1, 0.25, 0.5, 0.75, 0.9});
    CHECK(c.holds);
    CHECK(c.worst_margin >= 0.0);
    CHECK(c.l_F == doctest::Approx(std::pow(0.6 / 1.4, 2)).epsilon(1e-12));
}

TEST_CASE("csv and summary outputs")
{
    const auto p = randers(0.3, pde::BallKind::backward, 65);
    const auto g = pde::build_domain(p);
    const auto r = pde::solve(p, g);
    const std::string csv = pde::to_csv(p, g, r.u);
    CHECK(csv.rfind("i,j,x,y,u,lower_bound,upper_bound\n", 0) == 0);
    const auto lines = std::count(csv.begin(), csv.end(), '\n');
    CHECK(lines == g.interior_count() + 1);
    const auto j = pde::summary_json(p, g, r);
    CHECK(j["schema"] == "1");
    CHECK(j["ball"] == "backward");
}

TEST_CASE("invalid problems")
{
    pde::GridProblem p;
    p.N = 100;
    CHECK_THROWS_AS(p.validate(), Error);
    p.N = 161;
    p.rho = -1.0;
    CHECK_THROWS_AS(p.validate(), Error);
    CHECK_THROWS_AS(pde::parse_ball_kind("sideways"), Error);
}
