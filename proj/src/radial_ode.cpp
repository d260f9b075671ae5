#include "finpoisson/radial_ode.hpp"

#include "finpoisson/error.hpp"
#include "finpoisson/model_spaces.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace finpoisson::ode {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

// State in t = log r: (f_hom, d f_hom/dt, f_part, d f_part/dt).
using State = std::array<double, 4>;

struct System {
    int n;
    double mu;
    double c;
    double source;

    State operator()(double t, const State& y) const
    {
        const double r = std::exp(t);
        const double damp = 1.0 - (n - 1) * model::r_ct_c(c, r);
        State dy;
        dy[0] = y[1];
        dy[1] = damp * y[1] - mu * y[0];
        dy[2] = y[3];
        dy[3] = damp * y[3] - mu * y[2] - source * r * r;
        return dy;
    }
};

State axpy(const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms)
{
    State out = y;
    for (const auto& [w, k] : terms) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] += h * w * (*k)[i];
        }
    }
    return out;
}

/// Integrates from t0 to each target in order, landing on every target exactly.
/// Returns the state at each target.
std::vector<State> integrate_to(const System& sys, double t0, State y, const std::vector<double>& targets,
                                double tol, int& steps)
{
    std::vector<State> out;
    out.reserve(targets.size());
    double t = t0;
    double h = 1e-3;
    State k1 = sys(t, y);
    State scale_floor{};
    for (std::size_t i = 0; i < y.size(); ++i) {
        scale_floor[i] = std::abs(y[i]);
    }
    steps = 0;
    for (const double target : targets) {
        while (target - t > 1e-14 * (1.0 + std::abs(target))) {
            const double step = std::min(h, target - t);
            const State k2 = sys(t + c2 * step, axpy(y, step, {{a21, &k1}}));
            const State k3 = sys(t + c3 * step, axpy(y, step, {{a31, &k1}, {a32, &k2}}));
            const State k4 = sys(t + c4 * step, axpy(y, step, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
            const State k5 =
                sys(t + c5 * step, axpy(y, step, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
            const State k6 = sys(t + step, axpy(y, step, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4},
                                                          {a65, &k5}}));
            const State ynew = axpy(y, step, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
            const State k7 = sys(t + step, ynew);
            double err = 0.0;
            for (std::size_t i = 0; i < y.size(); ++i) {
                const double e = step * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                                         e7 * k7[i]);
                const double sc = tol * std::max({std::abs(y[i]), std::abs(ynew[i]), 1e-3 * scale_floor[i]}) +
                                  1e-300;
                err = std::max(err, std::abs(e) / sc);
            }
            if (!std::isfinite(err)) {
                fail(ErrorKind::accuracy_failure, "integrator produced a non-finite state");
            }
            const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            if (err <= 1.0) {
                t += step;
                y = ynew;
                k1 = k7;
                ++steps;
                for (std::size_t i = 0; i < y.size(); ++i) {
                    scale_floor[i] = std::max(scale_floor[i], std::abs(y[i]));
                }
                // A step shortened to land on a target says nothing about h.
                if (step == h) {
                    h *= factor;
                }
            } else {
                h = step * factor;
            }
            if (h < 1e-14) {
                fail(ErrorKind::accuracy_failure, "integrator step size underflow at r = " +
                                                      std::to_string(std::exp(t)));
            }
        }
        t = target;
        out.push_back(y);
    }
    return out;
}

/// d/dt of the Lagrange interpolant through five nodes, evaluated at t[2].
double five_point_derivative(const std::array<double, 5>& t, const std::array<double, 5>& v)
{
    double out = 0.0;
    for (int j = 0; j < 5; ++j) {
        double w = 0.0;
        if (j == 2) {
            for (int k = 0; k < 5; ++k) {
                if (k != 2) {
                    w += 1.0 / (t[2] - t[k]);
                }
            }
        } else {
            double num = 1.0;
            double den = 1.0;
            for (int k = 0; k < 5; ++k) {
                if (k != j) {
                    den *= t[j] - t[k];
                    if (k != 2) {
                        num *= t[2] - t[k];
                    }
                }
            }
            w = num / den;
        }
        out += w * v[j];
    }
    return out;
}

} // namespace

void OdeParams::validate() const
{
    sigma.validate();
    const double e = startup_radius();
    require(e > 0.0 && e < sigma.rho / 100.0, ErrorKind::invalid_argument,
            "startup radius must lie in (0, rho/100)");
    require(grid_n >= 64, ErrorKind::invalid_argument, "grid_n must be at least 64");
    require(rk_tol > 0.0 && rk_tol < 1e-3, ErrorKind::invalid_argument, "rk_tol must lie in (0, 1e-3)");
    require(std::isfinite(source), ErrorKind::invalid_argument, "source must be finite");
    for (double r : radii) {
        require(r >= e && r <= sigma.rho, ErrorKind::domain_error,
                "output radius " + std::to_string(r) + " outside [eps, rho]");
    }
}

RadialSolution solve_Q(const OdeParams& p)
{
    p.validate();
    const auto& s = p.sigma;
    const double eps = p.startup_radius();
    const double alpha = s.alpha_plus();
    const double denom = s.mu + 2.0 * s.n;

    std::vector<double> radii = p.radii;
    if (radii.empty()) {
        radii.resize(static_cast<std::size_t>(p.grid_n));
        const double lo = std::log(eps);
        const double hi = std::log(s.rho);
        for (int i = 0; i < p.grid_n; ++i) {
            radii[static_cast<std::size_t>(i)] = std::exp(lo + (hi - lo) * i / (p.grid_n - 1));
        }
        radii.front() = eps;
        radii.back() = s.rho;
    } else {
        std::sort(radii.begin(), radii.end());
        radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
    }
    const bool rho_in_grid = radii.back() == s.rho;

    std::vector<double> targets;
    targets.reserve(radii.size() + 1);
    for (double r : radii) {
        targets.push_back(std::log(r));
    }
    if (!rho_in_grid) {
        targets.push_back(std::log(s.rho));
    }

    const System sys{s.n, s.mu, s.c, p.source};
    State y0;
    y0[0] = std::pow(eps, alpha);
    y0[1] = alpha * y0[0];
    y0[2] = -p.source * eps * eps / denom;
    y0[3] = 2.0 * y0[2];

    RadialSolution sol;
    const double t0 = std::log(eps);
    // Targets equal to t0 are handled by the zero-length loop in integrate_to.
    const auto states = integrate_to(sys, t0, y0, targets, p.rk_tol, sol.steps);
    const State& at_rho = states.back();
    require(at_rho[0] != 0.0 && std::isfinite(at_rho[0]), ErrorKind::degenerate_bvp,
            "homogeneous solution vanishes at rho");
    const double a = -at_rho[2] / at_rho[0];

    sol.r = radii;
    sol.f.resize(radii.size());
    sol.fp.resize(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const State& st = states[i];
        sol.f[i] = st[2] + a * st[0];
        sol.fp[i] = (st[3] + a * st[1]) / radii[i];
    }
    if (rho_in_grid) {
        sol.f.back() = 0.0;
    }
    sol.a_hom = a;
    sol.alpha_plus = alpha;
    sol.eps = eps;
    sol.sigma = s;
    sol.source = p.source;
    if (radii.front() == eps && radii.size() >= 3) {
        sol.energy = energy_integral(sol, s.n);
    }
    if (radii.size() >= 3) {
        sol.residual_max = residual_check(sol, p);
    }
    return sol;
}

double energy_integral(const RadialSolution& sol, int n)
{
    const std::size_t m = sol.r.size();
    require(m >= 3, ErrorKind::invalid_argument, "energy integral needs at least three nodes");
    // Integrand in t = log r: (r f')^2 r^{n-2}.
    std::vector<double> t(m);
    std::vector<double> q(m);
    for (std::size_t i = 0; i < m; ++i) {
        t[i] = std::log(sol.r[i]);
        const double g = sol.r[i] * sol.fp[i];
        q[i] = g * g * std::pow(sol.r[i], n - 2);
    }
    // Nonuniform composite Simpson on interval pairs, trapezoid-free tail via
    // a final three-node panel when the interval count is odd.
    auto simpson_pair = [&](std::size_t i) {
        const double h0 = t[i + 1] - t[i];
        const double h1 = t[i + 2] - t[i + 1];
        const double hs = h0 + h1;
        return hs / 6.0 *
               ((2.0 - h1 / h0) * q[i] + hs * hs / (h0 * h1) * q[i + 1] + (2.0 - h0 / h1) * q[i + 2]);
    };
    double total = 0.0;
    std::size_t i = 0;
    const std::size_t intervals = m - 1;
    const std::size_t paired = intervals % 2 == 0 ? intervals : intervals - 1;
    for (; i < paired; i += 2) {
        total += simpson_pair(i);
    }
    if (paired != intervals) {
        // Last interval [m-2, m-1] from the quadratic through the last three nodes.
        const double h0 = t[m - 2] - t[m - 3];
        const double h1 = t[m - 1] - t[m - 2];
        const double whole = [&] {
            const double hs = h0 + h1;
            return hs / 6.0 *
                   ((2.0 - h1 / h0) * q[m - 3] + hs * hs / (h0 * h1) * q[m - 2] + (2.0 - h0 / h1) * q[m - 1]);
        }();
        // Integral over the first of the two intervals of the same quadratic.
        const double first = h0 / 6.0 *
                             ((3.0 - h0 / (h0 + h1)) * q[m - 3] + (3.0 + h0 / h1) * q[m - 2] -
                              h0 * h0 / (h1 * (h0 + h1)) * q[m - 1]);
        total += whole - first;
    }

    // [0, r_0] from the leading behaviour.
    const double e = sol.r.front();
    const double alpha = sol.alpha_plus;
    const double a = sol.a_hom;
    const double k = 2.0 * sol.source / (sol.sigma.mu + 2.0 * n);
    double tail = k * k * std::pow(e, n + 2) / (n + 2);
    if (alpha != 0.0) {
        tail += alpha * alpha * a * a * std::pow(e, 2.0 * alpha + n - 2) / (2.0 * alpha + n - 2);
        tail -= 2.0 * alpha * a * k * std::pow(e, alpha + n) / (alpha + n);
    }
    return total + tail;
}

std::vector<double> residual_profile(const RadialSolution& sol, const OdeParams& p)
{
    const std::size_t m = sol.r.size();
    std::vector<double> res(m, 0.0);
    const auto& s = p.sigma;
    for (std::size_t i = 2; i + 2 < m; ++i) {
        std::array<double, 5> t{};
        std::array<double, 5> g{};
        for (std::size_t j = 0; j < 5; ++j) {
            t[j] = std::log(sol.r[i + j - 2]);
            g[j] = sol.r[i + j - 2] * sol.fp[i + j - 2];
        }
        const double r = sol.r[i];
        const double frr = (five_point_derivative(t, g) - g[2]) / (r * r);
        const double drift = (s.n - 1) * model::ct_c(s.c, r) * sol.fp[i];
        const double pot = s.mu * sol.f[i] / (r * r);
        const double value = frr + drift + pot + p.source;
        res[i] = std::abs(value) / (1.0 + std::abs(frr) + std::abs(drift) + std::abs(pot));
    }
    return res;
}

double residual_check(const RadialSolution& sol, const OdeParams& p)
{
    const auto res = residual_profile(sol, p);
    return res.empty() ? 0.0 : *std::max_element(res.begin(), res.end());
}

double interpolate(const RadialSolution& sol, double r)
{
    require(!sol.r.empty() && r >= sol.r.front() && r <= sol.r.back(), ErrorKind::domain_error,
            "interpolation radius outside the solution grid");
    const auto it = std::lower_bound(sol.r.begin(), sol.r.end(), r);
    std::size_t hi = static_cast<std::size_t>(it - sol.r.begin());
    if (hi == 0) {
        return sol.f.front();
    }
    if (sol.r[hi] == r) {
        return sol.f[hi];
    }
    const std::size_t lo = hi - 1;
    const double t0 = std::log(sol.r[lo]);
    const double t1 = std::log(sol.r[hi]);
    const double h = t1 - t0;
    const double s = (std::log(r) - t0) / h;
    const double g0 = sol.r[lo] * sol.fp[lo] * h;
    const double g1 = sol.r[hi] * sol.fp[hi] * h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * sol.f[lo] + (s3 - 2 * s2 + s) * g0 + (-2 * s3 + 3 * s2) * sol.f[hi] +
           (s3 - s2) * g1;
}

MonotonicityReport sigma_monotonicity_scan(int n, double mu, std::span<const double> rhos,
                                           std::span<const double> cs, double tol)
{
    MonotonicityReport rep;
    rep.n = n;
    rep.mu = mu;
    std::vector<double> rho_sorted(rhos.begin(), rhos.end());
    std::vector<double> c_sorted(cs.begin(), cs.end());
    std::sort(rho_sorted.begin(), rho_sorted.end());
    std::sort(c_sorted.begin(), c_sorted.end());
    require(!rho_sorted.empty() && !c_sorted.empty(), ErrorKind::invalid_argument,
            "scan needs at least one radius and one curvature");

    // Shared comparison radii: log-uniform over [rho_min * 1e-3, rho_min],
    // then uniform out to each rho.
    const double rmin = rho_sorted.front();
    std::vector<double> probe;
    for (int i = 0; i < 200; ++i) {
        probe.push_back(rmin * std::pow(10.0, -3.0 + 3.0 * i / 199.0));
    }
    auto radii_for = [&](double rho) {
        std::vector<double> r = probe;
        for (int i = 1; i <= 200; ++i) {
            const double v = rmin + (rho - rmin) * i / 200.0;
            if (v > rmin) {
                r.push_back(v);
            }
        }
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
        return r;
    };

    // sols[ci][ri]
    std::vector<std::vector<RadialSolution>> sols(c_sorted.size());
    for (std::size_t ci = 0; ci < c_sorted.size(); ++ci) {
        for (double rho : rho_sorted) {
            OdeParams p;
            p.sigma = {n, mu, c_sorted[ci], rho};
            p.radii = radii_for(rho);
            sols[ci].push_back(solve_Q(p));
        }
    }

    for (const auto& row : sols) {
        for (const auto& sol : row) {
            const double fmax = *std::max_element(sol.f.begin(), sol.f.end());
            for (std::size_t i = 0; i < sol.f.size(); ++i) {
                if (sol.f[i] < -tol * fmax) {
                    rep.nonnegative_ok = false;
                }
                if (i > 0 && sol.f[i] > sol.f[i - 1] + tol * fmax) {
                    rep.nonincreasing_ok = false;
                }
            }
        }
    }

    // Curvature ordering at fixed rho.
    for (std::size_t ri = 0; ri < rho_sorted.size(); ++ri) {
        for (std::size_t c1 = 0; c1 + 1 < c_sorted.size(); ++c1) {
            for (std::size_t c2 = c1 + 1; c2 < c_sorted.size(); ++c2) {
                const auto& lo = sols[c1][ri];
                const auto& hi = sols[c2][ri];
                const double fmax = *std::max_element(hi.f.begin(), hi.f.end());
                for (std::size_t i = 0; i < lo.f.size(); ++i) {
                    const double v = (lo.f[i] - hi.f[i]) / fmax;
                    rep.worst_curvature_violation = std::max(rep.worst_curvature_violation, v);
                    ++rep.comparisons;
                }
            }
        }
    }
    // Radius ordering at fixed c, compared on the smaller ball.
    for (std::size_t ci = 0; ci < c_sorted.size(); ++ci) {
        for (std::size_t r1 = 0; r1 + 1 < rho_sorted.size(); ++r1) {
            for (std::size_t r2 = r1 + 1; r2 < rho_sorted.size(); ++r2) {
                const auto& small = sols[ci][r1];
                const auto& large = sols[ci][r2];
                const double fmax = *std::max_element(large.f.begin(), large.f.end());
                for (std::size_t i = 0; i < small.r.size(); ++i) {
                    const double v = (small.f[i] - interpolate(large, small.r[i])) / fmax;
                    rep.worst_radius_violation = std::max(rep.worst_radius_violation, v);
                    ++rep.comparisons;
                }
            }
        }
    }
    rep.curvature_order_ok = rep.worst_curvature_violation <= tol;
    rep.radius_order_ok = rep.worst_radius_violation <= tol;
    return rep;
}

} // namespace finpoisson::ode
