#include "finpoisson/error.hpp"
#include "finpoisson/special_functions.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/hypergeometric_pFq.hpp>
#include <doctest.h>

#include <array>
#include <cmath>

using namespace finpoisson;

TEST_CASE("gamma against boost")
{
    for (double x : {-2.5, -0.3, 0.1, 0.5, 1.0, 3.7, 10.2, 40.0}) {
        CHECK(special::gamma(x) == doctest::Approx(boost::math::tgamma(x)).epsilon(1e-13));
    }
}

TEST_CASE("modified bessel functions against boost")
{
    for (double nu : {0.0, 0.1, 0.3873, 0.5, 1.0, 2.5, 7.0}) {
        for (double x : {1e-3, 0.1, 1.0, 2.0, 5.0, 30.0}) {
            const auto ik = special::bessel_ik(nu, x);
            CHECK(ik.I == doctest::Approx(boost::math::cyl_bessel_i(nu, x)).epsilon(1e-12));
            CHECK(ik.K == doctest::Approx(boost::math::cyl_bessel_k(nu, x)).epsilon(1e-12));
            CHECK(ik.Ip == doctest::Approx(boost::math::cyl_bessel_i_prime(nu, x)).epsilon(1e-11));
            CHECK(ik.Kp == doctest::Approx(boost::math::cyl_bessel_k_prime(nu, x)).epsilon(1e-11));
        }
    }
}

TEST_CASE("hypergeometric series against boost")
{
    const std::array<double, 3> a{0.5, 1.2, -0.3};
    const std::array<double, 4> b{1.5, 2.0, 0.7, 3.1};
    for (double z : {-4.0, -0.5, 0.3, 2.0, 10.0}) {
        const double ref = boost::math::hypergeometric_pFq({a[0], a[1], a[2]}, {b[0], b[1], b[2], b[3]}, z);
        CHECK(special::hyp3F4(a, b, z) == doctest::Approx(ref).epsilon(1e-13));
    }
    const std::array<double, 2> a2{0.5, 1.0};
    const std::array<double, 1> b2{1.5};
    // 2F1(1/2, 1; 3/2; z^2) = atanh(z) / z.
    CHECK(special::hypergeometric_pfq(a2, b2, 0.25) == doctest::Approx(std::atanh(0.5) / 0.5).epsilon(1e-14));
}

TEST_CASE("hypergeometric pole raises pole_error")
{
    const std::array<double, 1> a{1.0};
    const std::array<double, 1> b{-2.0};
    bool pole = false;
    try {
        (void)special::hypergeometric_pfq(a, b, 0.5);
    } catch (const Error& e) {
        pole = e.kind() == ErrorKind::pole_error;
    }
    CHECK(pole);
}

TEST_CASE("c = 0 closed form satisfies the equation and boundary condition")
{
    const special::SigmaParams p{4, 0.6, 0.0, 1.5};
    p.validate();
    CHECK(special::sigma_closed(p, 1.5) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    const double r = 0.7;
    const double h = 1e-4;
    const double f = special::sigma_closed(p, r);
    const double fp = (special::sigma_closed(p, r + h) - special::sigma_closed(p, r - h)) / (2 * h);
    const double fpp = (special::sigma_closed(p, r + h) - 2 * f + special::sigma_closed(p, r - h)) / (h * h);
    CHECK(fpp + (p.n - 1) / r * fp + p.mu * f / (r * r) + 1.0 == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
}

TEST_CASE("mu = 0 nested form reduces to (rho^2 - r^2) / (2n) when c = 0")
{
    const special::SigmaParams p{3, 0.0, 0.0, 1.0};
    for (double r : {0.1, 0.5, 0.9}) {
        CHECK(special::sigma_closed(p, r) == doctest::Approx((1 - r * r) / 6).epsilon(1e-14));
    }
}

TEST_CASE("parameter validation")
{
    auto kind_of = [](special::SigmaParams p) {
        try {
            p.validate();
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::degenerate_bvp;
    };
    CHECK(kind_of({2, 0.0, 0.0, 1.0}) == ErrorKind::invalid_argument);
    CHECK(kind_of({3, 0.25, 0.0, 1.0}) == ErrorKind::invalid_argument);
    CHECK(kind_of({3, 0.1, 0.5, 1.0}) == ErrorKind::invalid_argument);
    CHECK(kind_of({3, 0.1, -1.0, 0.0}) == ErrorKind::invalid_argument);
}
