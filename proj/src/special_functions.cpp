#include "finpoisson/special_functions.hpp"

#include "finpoisson/error.hpp"
#include "finpoisson/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace finpoisson::special {

namespace {

constexpr double pi = std::numbers::pi;

// Taylor coefficients of 1/Gamma(1 + z) = sum_k kRecipGamma[k] z^k.
constexpr std::array<double, 29> kRecipGamma = {
    1.0,
    0.57721566490153286061,
    -0.65587807152025388108,
    -0.042002635034095235529,
    0.1665386113822914895,
    -0.042197734555544336748,
    -0.0096219715278769735621,
    0.0072189432466630995424,
    -0.0011651675918590651121,
    -0.00021524167411495097282,
    0.00012805028238811618615,
    -0.000020134854780788238656,
    -1.2504934821426706573e-6,
    1.1330272319816958824e-6,
    -2.0563384169776071035e-7,
    6.1160951044814158179e-9,
    5.0020076444692229301e-9,
    -1.1812745704870201446e-9,
    1.0434267116911005105e-10,
    7.782263439905071254e-12,
    -3.6968056186422057082e-12,
    5.100370287454475979e-13,
    -2.0583260535665067832e-14,
    -5.3481225394230179824e-15,
    1.2267786282382607902e-15,
    -1.1812593016974587695e-16,
    1.1866922547516003326e-18,
    1.4123806553180317816e-18,
    -2.2987456844353702066e-19,
};

// Temme's auxiliary functions for |mu| <= 1/2:
//   gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu)
//   gam2 = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2
// from the even and odd parts of the 1/Gamma(1+z) series, free of cancellation.
struct TemmeGammas {
    double gam1;
    double gam2;
    double recip_gamma_plus;  // 1/Gamma(1+mu)
    double recip_gamma_minus; // 1/Gamma(1-mu)
};

TemmeGammas temme_gammas(double mu)
{
    const double m2 = mu * mu;
    double even = 0.0;
    double odd = 0.0;
    double pw = 1.0;
    for (std::size_t k = 0; k + 1 < kRecipGamma.size(); k += 2) {
        even += kRecipGamma[k] * pw;
        odd += kRecipGamma[k + 1] * pw;
        pw *= m2;
    }
    TemmeGammas g{};
    g.gam1 = -odd;
    g.gam2 = even;
    g.recip_gamma_plus = g.gam2 - mu * g.gam1;
    g.recip_gamma_minus = g.gam2 + mu * g.gam1;
    return g;
}

template <class T>
T pfq_series(std::span<const double> a, std::span<const double> b, double z, const SeriesOptions& opts)
{
    T sum = 1;
    T term = 1;
    int quiet = 0;
    for (int k = 0; k < opts.max_terms; ++k) {
        T ratio = static_cast<T>(z) / static_cast<T>(k + 1);
        for (double ai : a) {
            ratio *= static_cast<T>(ai) + static_cast<T>(k);
        }
        for (double bj : b) {
            ratio /= static_cast<T>(bj) + static_cast<T>(k);
        }
        term *= ratio;
        sum += term;
        if (std::abs(term) <= static_cast<T>(opts.rel_tol) * std::abs(sum)) {
            if (++quiet >= opts.quiet_terms) {
                return sum;
            }
        } else {
            quiet = 0;
        }
    }
    fail(ErrorKind::accuracy_failure, "hypergeometric series did not converge");
}

} // namespace

double gamma(double x)
{
    static constexpr std::array<double, 9> coef = {
        0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,   12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
    };
    require(std::isfinite(x), ErrorKind::domain_error, "gamma of a non-finite argument");
    require(!(x <= 0.0 && x == std::floor(x)), ErrorKind::pole_error,
            "gamma has a pole at " + std::to_string(x));
    if (x < 0.5) {
        return pi / (std::sin(pi * x) * gamma(1.0 - x));
    }
    const double xm = x - 1.0;
    double acc = coef[0];
    for (std::size_t i = 1; i < coef.size(); ++i) {
        acc += coef[i] / (xm + static_cast<double>(i));
    }
    const double t = xm + 7.5;
    return std::sqrt(2.0 * pi) * std::pow(t, xm + 0.5) * std::exp(-t) * acc;
}

BesselIK bessel_ik(double nu, double x)
{
    require(std::isfinite(x) && x > 0.0, ErrorKind::domain_error,
            "modified Bessel functions need x > 0, got " + std::to_string(x));
    require(nu >= 0.0 && nu <= 10.0, ErrorKind::domain_error,
            "Bessel order must lie in [0, 10], got " + std::to_string(nu));
    constexpr int max_iter = 100000;
    constexpr double eps = 1e-16;
    constexpr double tiny = 1e-300;
    constexpr double temme_limit = 2.0;

    const int nl = static_cast<int>(nu + 0.5);
    const double mu = nu - nl;
    const double mu2 = mu * mu;
    const double xi = 1.0 / x;
    const double xi2 = 2.0 * xi;

    // CF1 for I_nu'/I_nu by modified Lentz.
    double h = std::max(nu * xi, tiny);
    double b = xi2 * nu;
    double d = 0.0;
    double c = h;
    int it = 1;
    for (; it <= max_iter; ++it) {
        b += xi2;
        d = 1.0 / (b + d);
        c = b + 1.0 / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < eps) {
            break;
        }
    }
    require(it <= max_iter, ErrorKind::accuracy_failure, "Bessel CF1 did not converge");

    // Downward recurrence of an unnormalized I from nu to mu.
    double ril = tiny;
    double ripl = h * ril;
    const double ril1 = ril;
    const double rip1 = ripl;
    double fact = nu * xi;
    for (int l = nl; l >= 1; --l) {
        const double ritemp = fact * ril + ripl;
        fact -= xi;
        ripl = fact * ritemp + ril;
        ril = ritemp;
    }
    const double f = ripl / ril;

    double kmu = 0.0;
    double k1 = 0.0;
    if (x < temme_limit) {
        const double x2 = 0.5 * x;
        const double pimu = pi * mu;
        const double fact_mu = std::abs(pimu) < eps ? 1.0 : pimu / std::sin(pimu);
        double dl = -std::log(x2);
        double e = mu * dl;
        const double fact2 = std::abs(e) < eps ? 1.0 : std::sinh(e) / e;
        const TemmeGammas g = temme_gammas(mu);
        double ff = fact_mu * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * dl);
        double sum = ff;
        e = std::exp(e);
        double p = 0.5 * e / g.recip_gamma_plus;
        double q = 0.5 / (e * g.recip_gamma_minus);
        double cc = 1.0;
        dl = x2 * x2;
        double sum1 = p;
        int i = 1;
        for (; i <= max_iter; ++i) {
            ff = (i * ff + p + q) / (i * i - mu2);
            cc *= dl / i;
            p /= i - mu;
            q /= i + mu;
            const double del = cc * ff;
            sum += del;
            sum1 += cc * (p - i * ff);
            if (std::abs(del) < std::abs(sum) * eps) {
                break;
            }
        }
        require(i <= max_iter, ErrorKind::accuracy_failure, "Temme series did not converge");
        kmu = sum;
        k1 = sum1 * xi2;
    } else {
        // Steed's CF2 with Temme's normalization.
        double bb = 2.0 * (1.0 + x);
        double dd = 1.0 / bb;
        double hh = dd;
        double delh = dd;
        double q1 = 0.0;
        double q2 = 1.0;
        const double a1 = 0.25 - mu2;
        double q = a1;
        double cc = a1;
        double a = -a1;
        double s = 1.0 + q * delh;
        int i = 2;
        for (; i <= max_iter; ++i) {
            a -= 2.0 * (i - 1);
            cc = -a * cc / i;
            const double qnew = (q1 - bb * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += cc * qnew;
            bb += 2.0;
            dd = 1.0 / (bb + a * dd);
            delh = (bb * dd - 1.0) * delh;
            hh += delh;
            const double dels = q * delh;
            s += dels;
            if (std::abs(dels / s) < eps) {
                break;
            }
        }
        require(i <= max_iter, ErrorKind::accuracy_failure, "Bessel CF2 did not converge");
        hh *= a1;
        kmu = std::sqrt(pi / (2.0 * x)) * std::exp(-x) / s;
        k1 = kmu * (mu + x + 0.5 - hh) * xi;
    }

    const double kmup = mu * xi * kmu - k1;
    const double imu = xi / (f * kmu - kmup);
    BesselIK out;
    out.I = imu * ril1 / ril;
    out.Ip = imu * rip1 / ril;
    for (int i = 1; i <= nl; ++i) {
        const double ktemp = (mu + i) * xi2 * k1 + kmu;
        kmu = k1;
        k1 = ktemp;
    }
    out.K = kmu;
    out.Kp = nu * xi * kmu - k1;
    return out;
}

double bessel_I(double nu, double x)
{
    return bessel_ik(nu, x).I;
}

double bessel_K(double nu, double x)
{
    return bessel_ik(nu, x).K;
}

double hypergeometric_pfq(std::span<const double> a, std::span<const double> b, double z,
                          SeriesOptions opts)
{
    require(std::isfinite(z), ErrorKind::invalid_argument, "hypergeometric argument must be finite");
    for (double bj : b) {
        require(!(bj <= 0.0 && bj == std::floor(bj)), ErrorKind::pole_error,
                "lower parameter " + std::to_string(bj) + " is a non-positive integer");
    }
    bool terminating = false;
    for (double ai : a) {
        terminating = terminating || (ai <= 0.0 && ai == std::floor(ai));
    }
    if (!terminating) {
        require(a.size() <= b.size() + 1, ErrorKind::invalid_argument,
                "series diverges for p > q + 1");
        require(a.size() <= b.size() || std::abs(z) < 1.0, ErrorKind::domain_error,
                "p = q + 1 series needs |z| < 1");
    }
    if (opts.extended) {
        return static_cast<double>(pfq_series<long double>(a, b, z, opts));
    }
    return pfq_series<double>(a, b, z, opts);
}

double hyp3F4(const std::array<double, 3>& a, const std::array<double, 4>& b, double z,
              SeriesOptions opts)
{
    return hypergeometric_pfq(a, b, z, opts);
}

double H_func(double nu, double r, SeriesOptions opts)
{
    require(nu > 0.0 && nu <= 0.5, ErrorKind::domain_error,
            "H is defined for nu in (0, 1/2], got " + std::to_string(nu));
    require(r > 0.0 && std::isfinite(r), ErrorKind::domain_error, "H needs r > 0");
    const double s = std::sin(nu * pi);
    const double g = gamma(nu);
    const double z = r * r;
    const double h = 0.5 * nu;
    const double F_plus = hyp3F4({0.75 + h, 1.25 + h, 1.25 + h}, {1.5, 1.0 + nu, 1.5 + nu, 2.25 + h}, z, opts);
    const double F_minus =
        hyp3F4({0.75 - h, 1.25 - h, 1.25 - h}, {1.5, 1.0 - nu, 1.5 - nu, 2.25 - h}, z, opts);
    const BesselIK ik = bessel_ik(nu, r);
    const double prefactor = 2.0 * nu / ((25.0 - 4.0 * nu * nu) * s * g * std::sinh(r));
    const double first = (5.0 - 2.0 * nu) * F_plus *
                         (std::pow(2.0, nu - 2.0) * s * ik.K + std::pow(2.0, -nu - 1.0) * pi * ik.I) *
                         std::pow(r, 3.0 + nu);
    const double second =
        nu * (5.0 + 2.0 * nu) * std::pow(2.0, nu - 1.0) * F_minus * g * g * s * ik.I * std::pow(r, 3.0 - nu);
    return prefactor * (first - second);
}

double SigmaParams::nu() const
{
    return std::sqrt(mu_bar() - mu);
}

double SigmaParams::alpha_plus() const
{
    return -std::sqrt(mu_bar()) + nu();
}

void SigmaParams::validate() const
{
    require(n >= 3, ErrorKind::invalid_argument, "dimension n must be at least 3");
    require(std::isfinite(mu) && mu >= 0.0 && mu < mu_bar(), ErrorKind::invalid_argument,
            "mu must lie in [0, (n-2)^2/4), got " + std::to_string(mu));
    require(std::isfinite(c) && c <= 0.0, ErrorKind::invalid_argument, "curvature c must be <= 0");
    require(std::isfinite(rho) && rho > 0.0, ErrorKind::invalid_argument, "rho must be positive");
}

double sigma_double_integral(const SigmaParams& p, double r)
{
    p.validate();
    require(p.c < 0.0 && p.mu == 0.0, ErrorKind::unsupported_case,
            "the nested-integral form needs c < 0 and mu = 0");
    require(r > 0.0 && r <= p.rho, ErrorKind::domain_error, "r must lie in (0, rho]");
    const double k = std::sqrt(-p.c);
    const int n = p.n;
    auto weight = [&](double t) { return std::pow(std::sinh(k * t), n - 1); };
    // The inner integrand is entire; fixed GL20 panels of width <= 1/(2k)
    // reach rounding level without adaptive refinement near t = 0.
    auto outer = [&](double s) {
        const int m = std::max(1, static_cast<int>(std::ceil(2.0 * k * s)));
        const double h = s / m;
        double inner = 0.0;
        for (int i = 0; i < m; ++i) {
            inner += quad::gauss_legendre20(weight, i * h, (i + 1) * h);
        }
        return inner / weight(s);
    };
    return quad::integrate(outer, r, p.rho, {1e-15, 1e-12}).value;
}

double sigma_bessel_form(const SigmaParams& p, double r, SeriesOptions opts)
{
    p.validate();
    require(p.c == -1.0 && p.n == 3, ErrorKind::unsupported_case,
            "the Bessel form covers c = -1, n = 3 only");
    require(r > 0.0 && r <= p.rho, ErrorKind::domain_error, "r must lie in (0, rho]");
    const double nu = p.nu();
    const double rho = p.rho;
    const double homogeneous = std::sqrt(r) * std::sinh(rho) * bessel_I(nu, r) /
                               (std::sqrt(rho) * std::sinh(r) * bessel_I(nu, rho));
    return H_func(nu, rho, opts) * homogeneous - H_func(nu, r, opts);
}

double sigma_closed(const SigmaParams& p, double r)
{
    p.validate();
    require(r > 0.0 && r <= p.rho, ErrorKind::domain_error, "r must lie in (0, rho]");
    if (p.c == 0.0) {
        const double a = p.alpha_plus();
        return (p.rho * p.rho * std::pow(r / p.rho, a) - r * r) / (p.mu + 2.0 * p.n);
    }
    if (p.mu == 0.0) {
        return sigma_double_integral(p, r);
    }
    if (p.c == -1.0 && p.n == 3) {
        return sigma_bessel_form(p, r);
    }
    fail(ErrorKind::unsupported_case, "no closed form for n = " + std::to_string(p.n) +
                                          ", mu = " + std::to_string(p.mu) +
                                          ", c = " + std::to_string(p.c));
}

} // namespace finpoisson::special
