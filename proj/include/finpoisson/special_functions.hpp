#pragma once

// Gamma, modified Bessel functions, generalized hypergeometric series and the
// closed-form radial profiles sigma_{mu, rho, c}.

#include <array>
#include <span>

namespace finpoisson::special {

/// Lanczos approximation (g = 7, 9 terms) with reflection for x < 1/2.
double gamma(double x);

struct BesselIK {
    double I = 0.0;
    double Ip = 0.0;
    double K = 0.0;
    double Kp = 0.0;
};

/// I_nu, K_nu and their derivatives for nu in [0, 10], x > 0.
///
/// I_nu'/I_nu comes from its continued fraction and downward recurrence.
/// K_mu, K_{mu+1} with |mu| <= 1/2 come from Temme's series for x <= 2 and
/// Steed's continued fraction for x > 2, then upward recurrence to nu. I_nu is
/// fixed by the Wronskian I K' - I' K = -1/x.
BesselIK bessel_ik(double nu, double x);
double bessel_I(double nu, double x);
double bessel_K(double nu, double x);

struct SeriesOptions {
    /// Stop once |term| < rel_tol * |partial sum| for `quiet_terms` terms in a row.
    double rel_tol = 1e-16;
    int quiet_terms = 5;
    int max_terms = 100000;
    /// Accumulate in long double.
    bool extended = false;
};

/// Generalized hypergeometric series pFq(a; b; z) for p <= q + 1 (|z| < 1
/// when p = q + 1). Throws pole_error when a lower parameter is a
/// non-positive integer.
double hypergeometric_pfq(std::span<const double> a, std::span<const double> b, double z,
                          SeriesOptions opts = {});

double hyp3F4(const std::array<double, 3>& a, const std::array<double, 4>& b, double z,
              SeriesOptions opts = {});

/// The function H(nu, r) that builds the Bessel-form radial profile for
/// c = -1, n = 3. nu in (0, 1/2], r > 0.
double H_func(double nu, double r, SeriesOptions opts = {});

/// Parameters of the radial problem on (0, rho]:
///   f'' + (n-1) ct_c(r) f' + mu f / r^2 + 1 = 0, f(rho) = 0, finite energy.
struct SigmaParams {
    int n = 3;
    double mu = 0.0;
    double c = 0.0;
    double rho = 1.0;

    double mu_bar() const noexcept { return (n - 2.0) * (n - 2.0) / 4.0; }
    /// nu = sqrt(mu_bar - mu).
    double nu() const;
    /// The finite-energy exponent -sqrt(mu_bar) + nu of the homogeneous solution.
    double alpha_plus() const;

    /// Throws invalid_argument unless n >= 3, 0 <= mu < mu_bar, c <= 0, rho > 0.
    void validate() const;
};

/// Closed-form sigma_{mu, rho, c}(r), r in (0, rho]:
///   c = 0:             (rho^2 (r/rho)^{alpha_+} - r^2) / (mu + 2n)
///   c < 0, mu = 0:     nested integral of sinh powers
///   c = -1, n = 3:     Bessel/3F4 form built from H
/// Any other combination throws unsupported_case.
double sigma_closed(const SigmaParams& p, double r);

/// The c = -1, n = 3 Bessel/3F4 form, callable directly even when another
/// closed form also applies.
double sigma_bessel_form(const SigmaParams& p, double r, SeriesOptions opts = {});

/// The c < 0, mu = 0 nested-integral form.
double sigma_double_integral(const SigmaParams& p, double r);

} // namespace finpoisson::special
