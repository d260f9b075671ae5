#include "finpoisson/checks.hpp"

#include "finpoisson/model_spaces.hpp"
#include "finpoisson/quadrature.hpp"
#include "finpoisson/radial_ode.hpp"
#include "finpoisson/special_functions.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <thread>

namespace finpoisson::checks {

using report::Provenance;
using report::divergence_check;
using report::format_double;
using report::property_check;
using report::value_check;

namespace {

constexpr double pi = std::numbers::pi;

std::string fmt(double v)
{
    return format_double(v);
}

// Short decimal label for ids: 0.3 -> "0.3", 1e-05 -> "1e-05".
std::string label(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

double rel_sup(const std::vector<double>& a, const std::vector<double>& b)
{
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff = std::max(diff, std::abs(a[i] - b[i]));
        scale = std::max(scale, std::abs(b[i]));
    }
    return scale > 0.0 ? diff / scale : diff;
}

// ---------------------------------------------------------------- disc model

// Pieces near the rim are tiny and noisy (1 - ||beta||^2 cancels); ~10 pieces at
// 1e-11 each keep the totals well inside 1e-9.
constexpr quad::Tolerance tight{1e-11, 1e-12, 15};

// u = -exp(-d/4), so Du = u'(r) dr with u' = exp(-d/4) d'(r) / 4 > 0.
double disc_u_prime(double r)
{
    return 0.25 * std::exp(-0.25 * model::poincare_dist_from_origin(r)) *
           model::poincare_distance_derivative(r);
}

Vec disc_point(double r)
{
    Vec x(2);
    x << r, 0.0;
    return x;
}

Vec radial_covector(double coeff)
{
    Vec a(2);
    a << coeff, 0.0;
    return a;
}

// Rotation invariance reduces every disc integral to 2 pi int_0^2 g(r) dr; the
// measure dm = sigma(x) dx dy = sigma(x) r dr dtheta uses the Randers
// Hausdorff density of the structure itself.
template <class G>
double disc_integral(G&& g, double upper = 2.0, quad::Tolerance tol = tight)
{
    std::vector<double> pts{0.0, 0.5, 1.0, 1.5, 1.9};
    if (upper < 2.0) {
        for (int k = 2; 2.0 - std::pow(10.0, -k) < upper; ++k) {
            pts.push_back(2.0 - std::pow(10.0, -k));
        }
    }
    pts.erase(std::remove_if(pts.begin(), pts.end(), [&](double p) { return p >= upper; }), pts.end());
    pts.push_back(upper);
    return 2.0 * pi * quad::integrate_pieces(g, pts, tol).value;
}

// Integrands built from the structure itself stop here: ||beta||_h rounds to 1
// closer to the rim, and they vanish like (2 - r)^2, so the tail is O(1e-17).
constexpr double rim = 2.0 - 1e-5;

double disc_measure(const RandersStructure& disc, double r)
{
    return hausdorff_density(disc, disc_point(r)) * r;
}

double disc_fs_gradient_sq(int sign)
{
    const auto disc = RandersStructure::poincare_disc();
    return disc_integral([&](double r) {
        const double fs = eval_F_sym_dual(disc, disc_point(r), radial_covector(sign * disc_u_prime(r)));
        return fs * fs * disc_measure(disc, r);
    }, rim);
}

double disc_u_sq()
{
    return disc_integral([](double r) {
        return std::exp(-0.5 * model::poincare_dist_from_origin(r)) * model::poincare_density(r);
    });
}

// 2 pi int_0^{2 - delta} r (2 + r)^5 / ((4 + r^2)^{7/2} (2 - r)^2) dr, written
// in t = log(2 - r) so the distance to the rim is exact and every decade
// towards the rim is a panel of the same width.
double i_minus_partial(double delta)
{
    auto g = [](double t) {
        const double s = std::exp(t);
        const double r = 2.0 - s;
        return r * std::pow(2.0 + r, 5) / (std::pow(4.0 + r * r, 3.5) * s);
    };
    std::vector<double> pts{std::log(delta)};
    for (double p = 1e-5; p < 0.1; p *= 10.0) {
        if (p > delta) {
            pts.push_back(std::log(p));
        }
    }
    for (double p : {0.1, 0.5, 1.0, 2.0}) {
        pts.push_back(std::log(p));
    }
    return 2.0 * pi * quad::integrate_pieces(g, pts, {0.0, 1e-10, 15}).value;
}

struct DivergenceFit {
    std::vector<double> deltas;
    std::vector<double> partials;
    LinearFit fit;
};

DivergenceFit i_minus_fit()
{
    DivergenceFit d;
    d.deltas = {1e-2, 1e-3, 1e-4, 1e-5};
    std::vector<double> inv;
    for (double delta : d.deltas) {
        d.partials.push_back(i_minus_partial(delta));
        inv.push_back(1.0 / delta);
    }
    d.fit = linear_fit(inv, d.partials);
    return d;
}

std::string fit_notes(const DivergenceFit& d)
{
    std::string s = "fit a/delta + b: a=" + fmt(d.fit.slope) + " b=" + fmt(d.fit.intercept) +
                    " R^2=" + fmt(d.fit.r_squared) + "; partials";
    for (std::size_t i = 0; i < d.deltas.size(); ++i) {
        s += " [" + label(d.deltas[i]) + "]=" + fmt(d.partials[i]);
    }
    return s;
}

// ------------------------------------------------------------------- sampling

Vec random_vector(std::mt19937_64& rng, int dim)
{
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec v(dim);
    for (int i = 0; i < dim; ++i) {
        v[i] = gauss(rng);
    }
    return v;
}

Vec random_point(std::mt19937_64& rng, const RandersStructure& s, double disc_radius)
{
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Vec x(s.dim());
    if (s.is_minkowski()) {
        for (int i = 0; i < s.dim(); ++i) {
            x[i] = unit(rng);
        }
        return x;
    }
    do {
        for (int i = 0; i < s.dim(); ++i) {
            x[i] = disc_radius * unit(rng);
        }
    } while (x.norm() >= disc_radius);
    return x;
}

std::uint64_t stream_seed(std::uint64_t seed, const std::string& name)
{
    // FNV-1a over the stream name, mixed into the user seed.
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : name) {
        h = (h ^ ch) * 1099511628211ull;
    }
    return seed ^ h;
}

std::vector<NamedStructure> minkowski_family()
{
    std::vector<NamedStructure> out;
    for (int k = 0; k <= 9; ++k) {
        const double b = 0.1 * k;
        Vec beta(2);
        beta << b * std::cos(0.3), b * std::sin(0.3);
        out.push_back({"b" + label(b), RandersStructure::minkowski_randers(beta)});
    }
    return out;
}

// --------------------------------------------------------------------- hardy

double smoothstep5(double s)
{
    return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double smoothstep5_prime(double s)
{
    return 30.0 * s * s * (1.0 - s) * (1.0 - s);
}

struct HardyQuotient {
    double i1 = 0.0;
    double i2 = 0.0;
    double q() const { return i1 / i2; }
};

// Radial integrals of v = psi * max(eps, r)^{-g} on R^n (the sphere area cancels).
HardyQuotient hardy_quotient(int n, double r_cut, double R_cut, double eps)
{
    const double g = 0.5 * (n - 2.0);
    const double width = R_cut - r_cut;
    HardyQuotient hq;
    // [0, eps]: v constant eps^{-g}; v^2 r^{n-3} scaled by r = eps s.
    hq.i2 += quad::integrate([&](double s) { return std::pow(s, n - 3.0); }, 0.0, 1.0, tight).value;
    // [eps, r_cut]: in t = log r both integrands are constant (g^2 and 1).
    const double lo = std::log(eps);
    const double hi = std::log(r_cut);
    hq.i1 += quad::integrate([&](double) { return g * g; }, lo, hi, tight).value;
    hq.i2 += quad::integrate([&](double) { return 1.0; }, lo, hi, tight).value;
    // [r_cut, R_cut]: cutoff region.
    auto v = [&](double r) { return (1.0 - smoothstep5((r - r_cut) / width)) * std::pow(r, -g); };
    auto vp = [&](double r) {
        const double s = (r - r_cut) / width;
        return -smoothstep5_prime(s) / width * std::pow(r, -g) -
               (1.0 - smoothstep5(s)) * g * std::pow(r, -g - 1.0);
    };
    hq.i1 += quad::integrate([&](double r) { return vp(r) * vp(r) * std::pow(r, n - 1.0); }, r_cut, R_cut,
                             tight)
                 .value;
    hq.i2 += quad::integrate([&](double r) { return v(r) * v(r) * std::pow(r, n - 3.0); }, r_cut, R_cut,
                             tight)
                 .value;
    return hq;
}

// ------------------------------------------------------------------ ode bits

ode::RadialSolution solve_at(const special::SigmaParams& s, const std::vector<double>& radii,
                             double eps = 0.0, int grid_n = 4096, double rk_tol = 1e-12,
                             double source = 1.0)
{
    ode::OdeParams p;
    p.sigma = s;
    p.eps = eps;
    p.grid_n = grid_n;
    p.rk_tol = rk_tol;
    p.source = source;
    if (!radii.empty()) {
        p.radii = radii;
        const double e = p.startup_radius();
        if (p.radii.front() > e) {
            p.radii.insert(p.radii.begin(), e);
        }
    }
    return ode::solve_Q(p);
}

std::vector<double> linspace(double a, double b, int m)
{
    std::vector<double> v(m);
    for (int i = 0; i < m; ++i) {
        v[i] = a + (b - a) * i / (m - 1);
    }
    v.back() = b;
    return v;
}

// Solution values at `radii`, skipping the startup node prepended by solve_at.
std::vector<double> values_at(const ode::RadialSolution& sol, const std::vector<double>& radii)
{
    std::vector<double> out;
    out.reserve(radii.size());
    for (double r : radii) {
        out.push_back(ode::interpolate(sol, r));
    }
    return out;
}

std::string sigma_tag(const special::SigmaParams& s)
{
    return "n" + std::to_string(s.n) + ".c" + label(s.c) + ".mu" + label(s.mu) + ".rho" + label(s.rho);
}

} // namespace

// ======================================================================

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y)
{
    require(x.size() == y.size() && x.size() >= 2, ErrorKind::invalid_argument,
            "linear fit needs at least two points");
    const double m = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (f.slope * x[i] + f.intercept);
        ss_res += e * e;
    }
    f.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return f;
}

double fs_norm_closed_form()
{
    const double s2 = std::sqrt(2.0);
    const double a = std::sqrt(-2.0 + 2.0 * s2);
    const double b = std::sqrt(2.0 + 2.0 * s2);
    return pi / 5.0 + pi / 16.0 * a * std::log(5.0 + 4.0 * s2 + 4.0 * std::sqrt(4.0 - 2.0 * s2) + 6.0 * a) +
           pi / 8.0 * b * std::atan((b - a) / (s2 - 2.0));
}

// ---------------------------------------------------------------- poincare

std::vector<CheckReport> poincare_sharpness_suite()
{
    std::vector<CheckReport> out;
    const auto disc = RandersStructure::poincare_disc();

    const double i_plus = disc_integral([](double r) {
        return r * (2.0 - r) * (2.0 - r) * (2.0 + r) / std::pow(4.0 + r * r, 3.5);
    });
    out.push_back(value_check("poincare.I_plus", pi / 30.0, Provenance::paper, i_plus, 1e-9,
                              "2 pi int_0^2 r(2-r)^2(2+r)/(4+r^2)^{7/2} dr"));

    const double i_plus_dual = disc_integral([&](double r) {
        const double fd = eval_F_dual(disc, disc_point(r), radial_covector(disc_u_prime(r)));
        return fd * fd * disc_measure(disc, r);
    }, rim);
    out.push_back(value_check("poincare.I_plus_via_dual", pi / 30.0, Provenance::paper, i_plus_dual, 1e-9,
                              "int F*(Du)^2 dm with the Randers dual and Hausdorff density of the disc"));

    const double i_u = disc_u_sq();
    out.push_back(value_check("poincare.I", 8.0 * pi / 15.0, Provenance::paper, i_u, 1e-9,
                              "int exp(-d_F(0,x)/2) dm"));
    out.push_back(value_check("poincare.norm_F_sq", 17.0 * pi / 30.0, Provenance::paper, i_plus + i_u, 1e-9,
                              "I_plus + I"));

    // F*(x, Dd_F(0, x)) = 1 along the radius.
    double eikonal = 0.0;
    for (double r : linspace(0.01, 1.99, 100)) {
        const double fd = eval_F_dual(disc, disc_point(r), radial_covector(model::poincare_distance_derivative(r)));
        eikonal = std::max(eikonal, std::abs(fd - 1.0));
    }
    out.push_back(value_check("poincare.eikonal", 0.0, Provenance::paper, eikonal, 1e-10,
                              "max |F*(x, D d_F(0,x)) - 1| over 100 radii"));

    const double gs = disc_fs_gradient_sq(+1);
    const double gs_minus = disc_fs_gradient_sq(-1);
    const double closed = fs_norm_closed_form();
    out.push_back(value_check("poincare.Fs_gradient_sq.closed_form", closed, Provenance::derived, gs, 1e-9,
                              "int F_s*(Du)^2 dm against the reference closed-form expression " + fmt(closed)));
    const double rounded = std::round(gs * 1e4) / 1e4;
    out.push_back(value_check("poincare.Fs_gradient_sq.rounded", 0.1877, Provenance::paper, rounded, 1e-12,
                              "int F_s*(Du)^2 dm = " + fmt(gs) + " rounded to 4 decimals; truncated: " +
                                  fmt(std::trunc(gs * 1e4) / 1e4)));
    out.push_back(value_check("poincare.Fs_gradient_sq.sign_symmetric", 0.0, Provenance::trivial,
                              std::abs(gs - gs_minus), 1e-12 * gs, "F_s* is reversible so u and -u agree"));
    out.push_back(property_check("poincare.Fs_norm_sq.finite", Provenance::paper, std::isfinite(gs + i_u),
                                 "int F_s*(Du)^2 dm + int u^2 dm = " + fmt(gs + i_u)));

    // I_minus integrand check against the Randers dual at a few radii.
    double worst = 0.0;
    for (double r : {0.3, 0.8, 1.3, 1.7, 1.95}) {
        const double fd = eval_F_dual(disc, disc_point(r), radial_covector(-disc_u_prime(r)));
        const double via_dual = fd * fd * disc_measure(disc, r);
        const double reference =
            r * std::pow(2.0 + r, 5) / (std::pow(4.0 + r * r, 3.5) * (2.0 - r) * (2.0 - r));
        worst = std::max(worst, std::abs(via_dual - reference) / reference);
    }
    out.push_back(value_check("poincare.I_minus_integrand", 0.0, Provenance::derived, worst, 1e-9,
                              "relative gap between F*(-Du)^2 dm/dr/dtheta and the reference radial integrand"));

    const DivergenceFit d = i_minus_fit();
    out.push_back(divergence_check("poincare.I_minus", Provenance::paper, d.fit.r_squared, 0.999, fit_notes(d)));
    return out;
}

// ------------------------------------------------------------------- hardy

std::vector<CheckReport> hardy_quotient_suite(const HardyConfig& cfg)
{
    require(cfg.n >= 3, ErrorKind::invalid_argument, "hardy suite needs n >= 3");
    require(0.0 < cfg.r_cut && cfg.r_cut < cfg.R_cut, ErrorKind::invalid_argument,
            "hardy suite needs 0 < r_cut < R_cut");
    require(cfg.eps.size() >= 2, ErrorKind::invalid_argument, "hardy suite needs at least two eps values");
    std::vector<double> eps = cfg.eps;
    std::sort(eps.begin(), eps.end(), std::greater<>());
    for (double e : eps) {
        require(e > 0.0 && e < cfg.r_cut, ErrorKind::invalid_argument, "eps values must lie in (0, r_cut)");
    }
    const double g2 = 0.25 * (cfg.n - 2.0) * (cfg.n - 2.0);
    const std::string base = "hardy.n" + std::to_string(cfg.n);
    const Provenance bound_prov = cfg.n == 3 ? Provenance::paper : Provenance::trivial;

    std::vector<CheckReport> out;
    std::vector<double> inv_log;
    std::vector<double> q;
    for (double e : eps) {
        const double qe = hardy_quotient(cfg.n, cfg.r_cut, cfg.R_cut, e).q();
        q.push_back(qe);
        inv_log.push_back(1.0 / std::log(cfg.r_cut / e));
        out.push_back(property_check(base + ".eps" + label(e) + ".above_bound", bound_prov, qe > g2,
                                     "quotient " + fmt(qe) + " vs " + fmt(g2)));
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < q.size(); ++i) {
        decreasing = decreasing && q[i] < q[i - 1];
    }
    out.push_back(property_check(base + ".decreasing", Provenance::derived, decreasing,
                                 "quotients strictly decrease as eps shrinks"));
    const LinearFit f = linear_fit(inv_log, q);
    out.push_back(value_check(base + ".intercept", g2, bound_prov, f.intercept, 0.02 * g2,
                              "fit gamma^2 + C/log(r_cut/eps): C=" + fmt(f.slope) + " R^2=" + fmt(f.r_squared)));
    return out;
}

std::vector<CheckReport> hardy_quotient_suite()
{
    std::vector<CheckReport> out;
    for (int n : {3, 4}) {
        HardyConfig cfg;
        cfg.n = n;
        cfg.eps = {1e-4, 1e-8, 1e-16, 1e-32, 1e-64, 1e-128};
        auto part = hardy_quotient_suite(cfg);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

// -------------------------------------------------------- norm equivalence

std::vector<CheckReport> norm_equivalence_suite(const std::vector<NamedStructure>& structures,
                                                const SuiteOptions& opts)
{
    std::vector<CheckReport> out;
    for (const auto& ns : structures) {
        const auto& s = ns.structure;
        const std::string base = "norm_equiv." + ns.name;
        require(s.is_minkowski(), ErrorKind::invalid_argument,
                "pointwise sampling needs a structure with finite global r_F: " + ns.name);
        std::mt19937_64 rng(stream_seed(opts.seed, base));
        const double rF = reversibility(s, Vec::Zero(s.dim()));
        const double lo_c = 1.0 / std::sqrt(0.5 * (1.0 + rF * rF));
        const double hi_c = 1.0 / std::sqrt(0.5 * (1.0 + 1.0 / (rF * rF)));
        double lower_margin = INFINITY;
        double upper_margin = INFINITY;
        double spread = 0.0;
        for (int k = 0; k < opts.samples; ++k) {
            const Vec x = random_point(rng, s, 1.0);
            const Vec a = random_vector(rng, s.dim());
            const double fd = eval_F_dual(s, x, a);
            const double fs = eval_F_sym_dual(s, x, a);
            lower_margin = std::min(lower_margin, (fs - lo_c * fd) / fd);
            upper_margin = std::min(upper_margin, (hi_c * fd - fs) / fd);
            spread = std::max(spread, std::abs(fs - fd) / fd);
        }
        const double slack = 1e-12;
        out.push_back(property_check(base + ".lower", Provenance::derived, lower_margin >= -slack,
                                     "min (F_s* - c_lo F*)/F* = " + fmt(lower_margin) + ", r_F=" + fmt(rF)));
        out.push_back(property_check(base + ".upper", Provenance::derived, upper_margin >= -slack,
                                     "min (c_hi F* - F_s*)/F* = " + fmt(upper_margin) + ", r_F=" + fmt(rF)));
        if (rF == 1.0) {
            out.push_back(value_check(base + ".reversible_equal", 0.0, Provenance::trivial, spread, 1e-14,
                                      "max |F_s* - F*|/F*"));
        }
    }

    // Disc model: r_F(x) grows without bound towards the rim.
    const double rF_rim = model::poincare_reversibility(2.0 - 1e-3);
    out.push_back(property_check("norm_equiv.disc.r_F_unbounded", Provenance::paper, rF_rim >= 1e6,
                                 "r_F(x) at |x| = 2 - 1e-3 is " + fmt(rF_rim) + "; excluded from sampling"));
    const double gs = disc_fs_gradient_sq(+1);
    const double iu = disc_u_sq();
    out.push_back(property_check("norm_equiv.disc.Fs_finite", Provenance::paper, std::isfinite(gs + iu),
                                 "||u||_{F_s}^2 = " + fmt(gs + iu) + " (gradient part " + fmt(gs) + ")"));
    const DivergenceFit d = i_minus_fit();
    out.push_back(divergence_check("norm_equiv.disc.minus_u_F_divergent", Provenance::paper, d.fit.r_squared,
                                   0.999, fit_notes(d)));
    return out;
}

std::vector<CheckReport> norm_equivalence_suite(const SuiteOptions& opts)
{
    std::vector<NamedStructure> s;
    s.push_back({"b0", RandersStructure::minkowski_randers(Vec::Zero(2))});
    Vec b(2);
    b << 0.5 * std::cos(1.1), 0.5 * std::sin(1.1);
    s.push_back({"b0.5", RandersStructure::minkowski_randers(b)});
    Vec b3(3);
    b3 << 0.3, -0.2, 0.4;
    s.push_back({"dim3", RandersStructure::minkowski_randers(b3)});
    return norm_equivalence_suite(s, opts);
}

// ------------------------------------------------------------------ volume

std::vector<CheckReport> volume_identity_suite()
{
    std::vector<CheckReport> out;
    for (int k = 0; k <= 9; ++k) {
        const double b = 0.1 * k;
        Vec beta(2);
        beta << 0.0, b;
        const auto s = RandersStructure::minkowski_randers(beta);
        const Vec x0 = Vec::Zero(2);
        const double area = unit_ball_volume_numeric(norm_fn(s), x0, 2);
        const double expected = pi / std::pow(1.0 - b * b, 1.5);
        out.push_back(value_check("volume.unit_ball_area.b" + label(b), expected,
                                  k == 0 ? Provenance::trivial : Provenance::derived, area, 1e-6 * expected,
                                  "Euclidean area of {F < 1}"));
        out.push_back(value_check("volume.density_times_area.b" + label(b), pi, Provenance::paper,
                                  hausdorff_density(s, x0) * area, 1e-6 * pi, "sigma_F * area = omega_2"));
    }
    // Vol_F(B+(x, rho)) = omega_n rho^n in Minkowski spaces.
    for (double b : {0.3, 0.9}) {
        for (double rho : {0.5, 2.0}) {
            Vec beta(2);
            beta << b, 0.0;
            const auto s = RandersStructure::minkowski_randers(beta);
            const auto F = norm_fn(s);
            NormFn scaled = [&](const Vec& x, const Vec& y) { return F(x, y) / rho; };
            Vec x0(2);
            x0 << 0.7, -0.2;
            const double vol = hausdorff_density(s, x0) * unit_ball_volume_numeric(scaled, x0, 2);
            out.push_back(value_check("volume.minkowski_ball.dim2.b" + label(b) + ".rho" + label(rho),
                                      pi * rho * rho, Provenance::paper, vol, 1e-6 * pi * rho * rho));
        }
    }
    {
        Vec beta(3);
        beta << 0.0, 0.3, 0.4;
        const auto s = RandersStructure::minkowski_randers(beta);
        const double rho = 1.5;
        const auto F = norm_fn(s);
        NormFn scaled = [&](const Vec& x, const Vec& y) { return F(x, y) / rho; };
        const Vec x0 = Vec::Zero(3);
        const double vol = hausdorff_density(s, x0) * unit_ball_volume_numeric(scaled, x0, 3);
        const double expected = 4.0 / 3.0 * pi * rho * rho * rho;
        out.push_back(value_check("volume.minkowski_ball.dim3.b0.5.rho1.5", expected, Provenance::paper, vol,
                                  1e-6 * expected));
    }

    // Model spaces: Vol(B(rho)) / V_{c,n}(rho) = 1 against the elementary antiderivatives.
    for (double c : {0.0, -0.25, -1.0}) {
        for (int n : {2, 3}) {
            for (double rho : {0.5, 2.0}) {
                double exact = 0.0;
                const double k = std::sqrt(-c);
                if (c == 0.0) {
                    exact = unit_ball_volume(n) * std::pow(rho, n);
                } else if (n == 2) {
                    exact = 2.0 * pi * (std::cosh(k * rho) - 1.0) / (k * k);
                } else {
                    exact = pi * (std::sinh(2.0 * k * rho) - 2.0 * k * rho) / (k * k * k);
                }
                const double ratio = model::V_cn(c, n, rho) / exact;
                out.push_back(value_check("volume.model_ratio.c" + label(c) + ".n" + std::to_string(n) + ".rho" +
                                              label(rho),
                                          1.0, Provenance::derived, ratio, 1e-10));
            }
        }
    }

    // Disc model: Vol_F(B+(0, rho)) by inverting d_F(0, .) and integrating the density.
    auto radius_of = [](double rho) {
        double lo = 0.0;
        double hi = 2.0;
        for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) {
                break;
            }
            (model::poincare_dist_from_origin(mid) < rho ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    double prev_gap = INFINITY;
    bool shrinking = true;
    for (double rho : {1e-1, 1e-2, 1e-3}) {
        const double R = radius_of(rho);
        const double vol =
            2.0 * pi *
            quad::integrate([](double r) { return model::poincare_density(r); }, 0.0, R, {0.0, 1e-10, 15})
                .value;
        const double ratio = vol / model::V_cn(-0.25, 2, rho);
        const double gap = std::abs(ratio - 1.0);
        shrinking = shrinking && gap < prev_gap;
        prev_gap = gap;
        if (rho == 1e-3) {
            out.push_back(value_check("volume.disc_small_ball.rho0.001", 1.0, Provenance::derived, ratio, 1e-4,
                                      "Vol_F(B+(0,rho)) / V_{-1/4,2}(rho)"));
            // d_F(0, x) = r + r^2/2 + O(r^3) and dm = r(1 + O(r^2)) dr dtheta give
            // ratio = 1 - rho + O(rho^2): the limit is approached at first order.
            out.push_back(value_check("volume.disc_small_ball.first_order_rate", 1.0, Provenance::derived,
                                      (1.0 - ratio) / rho, 1e-2, "(1 - ratio) / rho at rho = 1e-3"));
        }
    }
    out.push_back(property_check("volume.disc_small_ball.converging", Provenance::derived, shrinking,
                                 "|ratio - 1| decreases over rho = 1e-1, 1e-2, 1e-3"));
    const double total =
        2.0 * pi *
        quad::integrate_pieces([](double r) { return model::poincare_density(r); }, {0.0, 1.0, 2.0}, tight)
            .value;
    out.push_back(value_check("volume.disc_total", pi, Provenance::derived, total, 1e-10,
                              "2 pi int_0^2 16r(4-r^2)/(4+r^2)^3 dr; antiderivative gives pi"));
    return out;
}

// --------------------------------------------------------- sandwich and w_c

std::vector<CheckReport> sandwich_and_wc_suite()
{
    std::vector<CheckReport> out;
    const std::vector<double> rhos{0.5, 1.0, 2.0};
    const std::vector<double> cs{-1.0, -0.5, -0.25, 0.0};
    for (int n : {3, 4}) {
        const double mu_bar = 0.25 * (n - 2.0) * (n - 2.0);
        for (double frac : {0.0, 0.5}) {
            const double mu = frac * mu_bar;
            const auto rep = ode::sigma_monotonicity_scan(n, mu, rhos, cs);
            const std::string base = "sandwich.n" + std::to_string(n) + ".mu" + label(mu);
            const std::string cnt = std::to_string(rep.comparisons) + " comparisons";
            out.push_back(property_check(base + ".curvature_order", Provenance::derived, rep.curvature_order_ok,
                                         cnt + ", worst " + fmt(rep.worst_curvature_violation)));
            out.push_back(property_check(base + ".radius_order", Provenance::derived, rep.radius_order_ok,
                                         cnt + ", worst " + fmt(rep.worst_radius_violation)));
            out.push_back(property_check(base + ".nonnegative", Provenance::derived, rep.nonnegative_ok));
            out.push_back(property_check(base + ".nonincreasing", Provenance::derived, rep.nonincreasing_ok));
        }
    }
    const double rho = 1.0;
    const auto radii = linspace(0.01, 1.0, 34);
    for (double c : {0.0, -0.5, -1.0}) {
        for (int n : {3, 4}) {
            const special::SigmaParams s{n, 0.0, c, rho};
            const auto sol = solve_at(s, radii);
            const auto f = values_at(sol, radii);
            std::vector<double> w;
            const double w_rho = model::w_c(c, n, rho);
            for (double r : radii) {
                w.push_back(c == 0.0 ? (rho * rho - r * r) / (2.0 * n) : w_rho - model::w_c(c, n, r));
            }
            out.push_back(value_check("sandwich.wc_identity.n" + std::to_string(n) + ".c" + label(c), 0.0,
                                      Provenance::derived, rel_sup(f, w), 1e-9,
                                      c == 0.0 ? "against (rho^2 - r^2)/(2n)" : "against w_c(rho) - w_c(r)"));
        }
    }
    return out;
}

// ------------------------------------------------------------------ metric

std::vector<CheckReport> metric_invariant_suite(const SuiteOptions& opts)
{
    std::vector<CheckReport> out;
    auto family = minkowski_family();
    Vec b3(3);
    b3 << 0.2, 0.5, -0.3;
    family.push_back({"dim3", RandersStructure::minkowski_randers(b3)});
    family.push_back({"disc", RandersStructure::poincare_disc()});

    for (const auto& ns : family) {
        const auto& s = ns.structure;
        const std::string base = "metric." + ns.name;
        std::mt19937_64 rng(stream_seed(opts.seed, base));
        const int dim = s.dim();
        const bool disc = !s.is_minkowski();
        const Vec x_ref = disc ? disc_point(1.2) : Vec::Zero(dim);

        const double rF = reversibility(s, x_ref);
        const double lF = uniformity(s, x_ref);
        out.push_back(value_check(base + ".lr2_closed", 1.0, Provenance::paper, lF * rF * rF, 1e-14,
                                  "l_F r_F^2 from the closed forms at a reference point"));
        if (dim == 2) {
            const double rn = reversibility_numeric(norm_fn(s), x_ref);
            const double ln = uniformity_numeric(s, x_ref);
            out.push_back(value_check(base + ".lr2_numeric", 1.0, Provenance::paper, ln * rn * rn, 1e-3,
                                      "r_F=" + fmt(rn) + " l_F=" + fmt(ln)));
            const double rd = reversibility_numeric(dual_norm_fn(s), x_ref);
            out.push_back(value_check(base + ".dual_reversibility", rF, Provenance::derived, rd, 1e-3,
                                      "numeric reversibility of F*"));
        }

        double lower_margin = INFINITY;
        double upper_margin = INFINITY;
        double legendre_F = 0.0;
        double legendre_pair = 0.0;
        double legendre_fd = 0.0;
        double dual_numeric = 0.0;
        double homogeneity = 0.0;
        double triangle = INFINITY;
        const auto F = norm_fn(s);
        const auto Fd = dual_norm_fn(s);
        std::uniform_real_distribution<double> scale(0.1, 10.0);
        for (int k = 0; k < opts.samples; ++k) {
            const Vec x = random_point(rng, s, 1.8);
            const Vec a = random_vector(rng, dim);
            const Vec y1 = random_vector(rng, dim);
            const Vec y2 = random_vector(rng, dim);
            const double t = scale(rng);
            // Global r_F for Minkowski structures; the disc has none, so the pointwise one.
            const double r = reversibility(s, x);
            const double fd = eval_F_dual(s, x, a);
            const double fs = eval_F_sym_dual(s, x, a);
            lower_margin = std::min(lower_margin, (fs - fd / std::sqrt(0.5 * (1.0 + r * r))) / fd);
            upper_margin = std::min(upper_margin, (fd / std::sqrt(0.5 * (1.0 + 1.0 / (r * r))) - fs) / fd);

            const Vec J = legendre(s, x, a);
            legendre_F = std::max(legendre_F, std::abs(eval_F(s, x, J) - fd) / fd);
            legendre_pair = std::max(legendre_pair, std::abs(a.dot(J) - fd * fd) / (fd * fd));
            const Vec Jn = legendre_numeric(Fd, x, a);
            legendre_fd = std::max(legendre_fd, (Jn - J).norm() / J.norm());
            dual_numeric = std::max(dual_numeric, std::abs(polar_transform_numeric(F, x, a) - fd) / fd);

            homogeneity = std::max(homogeneity, std::abs(eval_F(s, x, t * y1) - t * eval_F(s, x, y1)) /
                                                    (t * eval_F(s, x, y1)));
            triangle = std::min(triangle, eval_F(s, x, y1) + eval_F(s, x, y2) - eval_F(s, x, y1 + y2));
        }
        const std::string n = std::to_string(opts.samples) + " samples";
        out.push_back(property_check(base + ".dual_sandwich_lower", Provenance::paper, lower_margin >= -1e-12,
                                     n + ", min margin " + fmt(lower_margin)));
        out.push_back(property_check(base + ".dual_sandwich_upper", Provenance::paper, upper_margin >= -1e-12,
                                     n + ", min margin " + fmt(upper_margin)));
        out.push_back(value_check(base + ".legendre_norm", 0.0, Provenance::paper, legendre_F, 1e-6,
                                  n + ", max |F(J*a) - F*(a)| / F*(a)"));
        out.push_back(value_check(base + ".legendre_pairing", 0.0, Provenance::paper, legendre_pair, 1e-6,
                                  n + ", max |a(J*a) - F*(a)^2| / F*(a)^2"));
        out.push_back(value_check(base + ".legendre_numeric", 0.0, Provenance::derived, legendre_fd, 1e-6,
                                  n + ", closed-form J* against central differences of F*^2/2"));
        out.push_back(value_check(base + ".dual_vs_numeric", 0.0, Provenance::derived, dual_numeric, 1e-6,
                                  n + ", closed-form F* against the numeric supremum"));
        out.push_back(value_check(base + ".homogeneity", 0.0, Provenance::trivial, homogeneity, 1e-13, n));
        out.push_back(property_check(base + ".triangle", Provenance::trivial, triangle >= -1e-12,
                                     n + ", min F(y1)+F(y2)-F(y1+y2) = " + fmt(triangle)));
    }
    return out;
}

// ------------------------------------------------------------- radial ode

std::vector<CheckReport> radial_ode_invariant_suite()
{
    std::vector<CheckReport> out;
    double worst_boundary = 0.0;
    double worst_residual = 0.0;
    bool nonneg = true;
    bool nonincreasing = true;
    int cases = 0;
    auto track = [&](const ode::RadialSolution& sol) {
        double fmax = 0.0;
        for (double v : sol.f) {
            fmax = std::max(fmax, std::abs(v));
        }
        worst_boundary = std::max(worst_boundary, std::abs(sol.f.back()) / fmax);
        worst_residual = std::max(worst_residual, sol.residual_max);
        for (std::size_t i = 0; i < sol.f.size(); ++i) {
            nonneg = nonneg && sol.f[i] >= -1e-12 * fmax;
            if (i > 0) {
                nonincreasing = nonincreasing && sol.f[i] <= sol.f[i - 1] + 1e-12 * fmax;
            }
        }
        ++cases;
    };

    // c = 0 against (rho^2 (r/rho)^{alpha_+} - r^2)/(mu + 2n).
    for (int n : {3, 4, 5}) {
        const double mu_bar = 0.25 * (n - 2.0) * (n - 2.0);
        for (double frac : {0.0, 0.3, 0.9}) {
            for (double rho : {0.5, 1.0, 2.0}) {
                const special::SigmaParams s{n, frac * mu_bar, 0.0, rho};
                const auto sol = solve_at(s, {});
                track(sol);
                std::vector<double> f;
                std::vector<double> exact;
                for (std::size_t i = 0; i < sol.r.size(); ++i) {
                    if (sol.r[i] >= rho / 100.0) {
                        f.push_back(sol.f[i]);
                        exact.push_back(special::sigma_closed(s, sol.r[i]));
                    }
                }
                out.push_back(value_check("ode.closed_c0.n" + std::to_string(n) + ".mu" + label(frac) + "bar.rho" +
                                              label(rho),
                                          0.0, Provenance::derived, rel_sup(f, exact), 1e-7,
                                          "relative sup error on [rho/100, rho]"));
            }
        }
    }
    // c < 0, mu = 0 against the nested integral.
    for (int n : {3, 4}) {
        for (double c : {-0.5, -1.0}) {
            for (double rho : {1.0, 2.0}) {
                const special::SigmaParams s{n, 0.0, c, rho};
                const auto radii = linspace(rho / 100.0, rho, 25);
                const auto sol = solve_at(s, {});
                track(sol);
                const auto f = values_at(sol, radii);
                std::vector<double> exact;
                for (double r : radii) {
                    exact.push_back(special::sigma_double_integral(s, r));
                }
                out.push_back(value_check("ode.closed_nested." + sigma_tag(s), 0.0, Provenance::derived,
                                          rel_sup(f, exact), 1e-7, "relative sup error on [rho/100, rho]"));
            }
        }
    }
    out.push_back(value_check("ode.boundary", 0.0, Provenance::trivial, worst_boundary, 1e-10,
                              std::to_string(cases) + " solves, max |f(rho)| / max f"));
    out.push_back(value_check("ode.residual", 0.0, Provenance::derived, worst_residual, 1e-6,
                              std::to_string(cases) + " solves, max normalized residual"));
    out.push_back(property_check("ode.nonnegative", Provenance::paper, nonneg, std::to_string(cases) + " solves"));
    out.push_back(property_check("ode.nonincreasing", Provenance::paper, nonincreasing,
                                 std::to_string(cases) + " solves"));

    // Linearity in the source and robustness in eps.
    const special::SigmaParams s{3, 0.1, -1.0, 1.0};
    const auto radii = linspace(0.01, 1.0, 50);
    const auto base_sol = solve_at(s, radii);
    const auto base = values_at(base_sol, radii);
    const double lambda = 3.7;
    auto scaled = values_at(solve_at(s, radii, 0.0, 4096, 1e-12, lambda), radii);
    for (double& v : scaled) {
        v /= lambda;
    }
    out.push_back(value_check("ode.linearity", 0.0, Provenance::trivial, rel_sup(scaled, base), 1e-10,
                              "source 3.7 against source 1, " + sigma_tag(s)));
    const double eps0 = 1e-6 * s.rho;
    const auto half_sol = solve_at(s, radii, 0.5 * eps0);
    out.push_back(value_check("ode.eps_halving", 0.0, Provenance::derived, rel_sup(values_at(half_sol, radii), base),
                              1e-8, "eps 1e-6 rho against 5e-7 rho, " + sigma_tag(s)));
    for (const special::SigmaParams& e : {special::SigmaParams{3, 0.1, -1.0, 1.0},
                                          special::SigmaParams{4, 0.5, -0.5, 2.0},
                                          special::SigmaParams{5, 2.0, 0.0, 1.0}}) {
        const double e1 = ode::energy_integral(solve_at(e, {}, 1e-6 * e.rho), e.n);
        const double e2 = ode::energy_integral(solve_at(e, {}, 0.5e-6 * e.rho), e.n);
        out.push_back(value_check("ode.energy_eps_stable." + sigma_tag(e), 0.0, Provenance::derived,
                                  std::isfinite(e1) ? std::abs(e1 - e2) / std::abs(e1) : INFINITY, 1e-8,
                                  "energy " + fmt(e1) + " vs " + fmt(e2)));
    }
    return out;
}

// ---------------------------------------------------------------- bessel

std::vector<CheckReport> bessel_form_study()
{
    std::vector<CheckReport> out;
    const auto radii = linspace(0.05, 1.0, 39);
    struct Level {
        int grid_n;
        double rk_tol;
    };
    const std::vector<Level> ladder{{1024, 1e-10}, {4096, 1e-12}, {16384, 1e-13}};
    for (double mu : {0.1, 0.2}) {
        const special::SigmaParams s{3, mu, -1.0, 1.0};
        const std::string base = "bessel.mu" + label(mu);
        std::vector<std::vector<double>> levels;
        for (const Level& l : ladder) {
            levels.push_back(values_at(solve_at(s, radii, 0.0, l.grid_n, l.rk_tol), radii));
        }
        double drift = 0.0;
        for (std::size_t i = 1; i < levels.size(); ++i) {
            drift = std::max(drift, rel_sup(levels[i - 1], levels.back()));
        }
        out.push_back(value_check(base + ".ode_convergence", 0.0, Provenance::derived, drift, 1e-8,
                                  "max relative change of the radial solution over grid 1024..16384, "
                                  "tolerance 1e-10..1e-13"));
        const auto& ode_f = levels.back();
        const double scale = *std::max_element(ode_f.begin(), ode_f.end());
        double worst = 0.0;
        double worst_r = 0.0;
        double closed_at = 0.0;
        for (std::size_t i = 0; i < radii.size(); ++i) {
            const double b = special::sigma_bessel_form(s, radii[i]);
            const double rel = std::abs(b - ode_f[i]) / scale;
            if (!(rel <= worst)) {
                worst = rel;
                worst_r = radii[i];
                closed_at = b;
            }
        }
        if (worst <= 1e-5) {
            out.push_back(value_check(base + ".closed_form", 0.0, Provenance::derived, worst, 1e-5,
                                      "max gap on [0.05, 1] relative to max f"));
        } else {
            const auto idx = static_cast<std::size_t>(std::find(radii.begin(), radii.end(), worst_r) - radii.begin());
            out.push_back(property_check(
                base + ".suspected_formula_discrepancy", Provenance::derived, drift <= 1e-8,
                "suspected paper-formula discrepancy: Bessel/3F4 form deviates from the converged radial "
                "solution (used as oracle) by " +
                    fmt(worst) + " of max f at r=" + fmt(worst_r) + " (closed form " + fmt(closed_at) + ", ode " +
                    fmt(ode_f[idx]) + ")"));
        }
    }
    return out;
}

// ----------------------------------------------------------------- driver

const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names{"poincare", "hardy",  "norm_equiv", "volume",
                                                "sandwich", "metric", "ode",        "bessel"};
    return names;
}

std::vector<CheckReport> run_suite(const std::string& name, const SuiteOptions& opts)
{
    if (name == "poincare") {
        return poincare_sharpness_suite();
    }
    if (name == "hardy") {
        return hardy_quotient_suite();
    }
    if (name == "norm_equiv") {
        return norm_equivalence_suite(opts);
    }
    if (name == "volume") {
        return volume_identity_suite();
    }
    if (name == "sandwich") {
        return sandwich_and_wc_suite();
    }
    if (name == "metric") {
        return metric_invariant_suite(opts);
    }
    if (name == "ode") {
        return radial_ode_invariant_suite();
    }
    if (name == "bessel") {
        return bessel_form_study();
    }
    fail(ErrorKind::invalid_argument, "unknown suite '" + name + "'");
}

std::vector<CheckReport> verify_all(const SuiteOptions& opts, int threads)
{
    const auto& names = suite_names();
    std::vector<std::vector<CheckReport>> parts(names.size());
    std::vector<std::exception_ptr> errors(names.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < names.size(); i = next++) {
            try {
                parts[i] = run_suite(names[i], opts);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int t = std::clamp(threads, 1, static_cast<int>(names.size()));
    std::vector<std::thread> pool;
    for (int i = 1; i < t; ++i) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& th : pool) {
        th.join();
    }
    std::vector<CheckReport> all;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (errors[i]) {
            std::rethrow_exception(errors[i]);
        }
        all.insert(all.end(), parts[i].begin(), parts[i].end());
    }
    std::stable_sort(all.begin(), all.end(), [](const CheckReport& a, const CheckReport& b) { return a.id < b.id; });
    return all;
}

} // namespace finpoisson::checks
