#include "finpoisson/poisson_fd.hpp"

#include "finpoisson/error.hpp"
#include "finpoisson/report.hpp"

#include <Eigen/SparseCholesky>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <sstream>

namespace finpoisson::pde {

namespace {

constexpr double theta_floor = 1e-2;
constexpr double energy_noise = 1e-14;

/// 1/2 F*^2 and its gradient for a constant 2-D Randers norm.
struct DualNorm2 {
    Eigen::Matrix2d hinv;
    Eigen::Vector2d hb; // H^{-1} beta
    double B = 0.0;     // beta^T H^{-1} beta

    explicit DualNorm2(const RandersLocal& loc)
    {
        hinv = loc.h_inv.topLeftCorner<2, 2>();
        const Eigen::Vector2d beta = loc.beta.head<2>();
        hb = hinv * beta;
        B = beta.dot(hb);
    }

    double dual(double ax, double ay) const
    {
        const double hx = hinv(0, 0) * ax + hinv(0, 1) * ay;
        const double hy = hinv(1, 0) * ax + hinv(1, 1) * ay;
        const double A = ax * hx + ay * hy;
        if (A <= 0.0) {
            return 0.0;
        }
        const double ab = ax * hb.x() + ay * hb.y();
        const double S = std::sqrt(ab * ab + (1.0 - B) * A);
        return ab > 0.0 ? A / (S + ab) : (S - ab) / (1.0 - B);
    }

    /// Returns 1/2 F*(a)^2, writes F* grad F* into (gx, gy).
    double half_sq(double ax, double ay, double& gx, double& gy) const
    {
        const double hx = hinv(0, 0) * ax + hinv(0, 1) * ay;
        const double hy = hinv(1, 0) * ax + hinv(1, 1) * ay;
        const double A = ax * hx + ay * hy;
        if (A <= 0.0) {
            gx = gy = 0.0;
            return 0.0;
        }
        const double ab = ax * hb.x() + ay * hb.y();
        const double S = std::sqrt(ab * ab + (1.0 - B) * A);
        const double fs = ab > 0.0 ? A / (S + ab) : (S - ab) / (1.0 - B);
        const double inv = 1.0 / (1.0 - B);
        gx = fs * ((ab * hb.x() + (1.0 - B) * hx) / S - hb.x()) * inv;
        gy = fs * ((ab * hb.y() + (1.0 - B) * hy) / S - hb.y()) * inv;
        return 0.5 * fs * fs;
    }
};

/// A linear element: vertices are interior nodes (node >= 0) or boundary
/// crossings (node = -1, value 0). The gradient is sum_v (cx[v], cy[v]) u_v.
struct Tri {
    std::array<int, 3> node{-1, -1, -1};
    std::array<double, 3> cx{};
    std::array<double, 3> cy{};
    /// Quadrature weight: triangle area over the number of fans averaged.
    double w = 0.0;
};

struct Stencil {
    std::vector<Tri> tris;
};

/// Each cell meeting the ball contributes the polygon of its interior corners
/// and edge crossings. The polygon's energy is the average over the fan
/// triangulations from each vertex; on a full cell this is the average of the
/// four corner one-sided gradients.
Stencil make_stencil(const Grid& g)
{
    Stencil st;
    const int N = g.N;
    const double h = g.h;
    struct Vertex {
        Eigen::Vector2d x;
        int node;
    };
    // theta index for the direction from corner k to corner k+1 (ccw: +x, +y, -x, -y).
    const int dir_fwd[4] = {0, 2, 1, 3};
    const int dir_bwd[4] = {1, 3, 0, 2};
    for (int j = 0; j + 1 < N; ++j) {
        for (int i = 0; i + 1 < N; ++i) {
            const int c[4] = {g.index(i, j), g.index(i + 1, j), g.index(i + 1, j + 1), g.index(i, j + 1)};
            const Eigen::Vector2d cp[4] = {{g.x(i), g.y(j)},
                                           {g.x(i + 1), g.y(j)},
                                           {g.x(i + 1), g.y(j + 1)},
                                           {g.x(i), g.y(j + 1)}};
            std::vector<Vertex> poly;
            int n_int = 0;
            for (int k = 0; k < 4; ++k) {
                const int k1 = (k + 1) % 4;
                const bool in0 = g.interior[static_cast<std::size_t>(c[k])] != 0;
                const bool in1 = g.interior[static_cast<std::size_t>(c[k1])] != 0;
                if (in0) {
                    ++n_int;
                    poly.push_back({cp[k], c[k]});
                }
                if (in0 && !in1) {
                    const double t = g.theta[static_cast<std::size_t>(c[k])][static_cast<std::size_t>(dir_fwd[k])];
                    poly.push_back({cp[k] + t * (cp[k1] - cp[k]), -1});
                } else if (!in0 && in1) {
                    const double t = g.theta[static_cast<std::size_t>(c[k1])][static_cast<std::size_t>(dir_bwd[k])];
                    poly.push_back({cp[k1] + t * (cp[k] - cp[k1]), -1});
                }
            }
            if (n_int == 0) {
                continue;
            }
            const std::size_t n = poly.size();
            const double wfan = 1.0 / static_cast<double>(n);
            for (std::size_t v = 0; v < n; ++v) {
                for (std::size_t k = 1; k + 1 < n; ++k) {
                    const Vertex& p0 = poly[v];
                    const Vertex& p1 = poly[(v + k) % n];
                    const Vertex& p2 = poly[(v + k + 1) % n];
                    if (p0.node < 0 && p1.node < 0 && p2.node < 0) {
                        continue;
                    }
                    Eigen::Matrix2d M;
                    M.row(0) = (p1.x - p0.x).transpose();
                    M.row(1) = (p2.x - p0.x).transpose();
                    const double det = M.determinant();
                    const double area = 0.5 * std::abs(det);
                    if (area <= 1e-12 * h * h) {
                        continue;
                    }
                    const Eigen::Matrix2d Minv = M.inverse();
                    Tri t;
                    t.node = {p0.node, p1.node, p2.node};
                    // grad = Minv * (u1 - u0, u2 - u0)
                    t.cx = {-Minv(0, 0) - Minv(0, 1), Minv(0, 0), Minv(0, 1)};
                    t.cy = {-Minv(1, 0) - Minv(1, 1), Minv(1, 0), Minv(1, 1)};
                    t.w = area * wfan;
                    st.tris.push_back(t);
                }
            }
        }
    }
    return st;
}

/// Dirichlet part sum_T w_T 1/2 F*(sign grad_T w)^2 and source part
/// sum_T w_T mean_T(w); gradient accumulated into grad when non-null.
void accumulate(const DualNorm2& dn, const Grid& g, const Stencil& st, const double* w, double sign,
                double& dirichlet, double& source, double* grad)
{
    // Long double sums keep the energy's rounding noise well below the
    // decrease the line search has to resolve near the minimum.
    long double dir_sum = 0.0L;
    long double src_sum = 0.0L;
    for (const Tri& t : st.tris) {
        double sx = 0.0;
        double sy = 0.0;
        double sum = 0.0;
        for (int v = 0; v < 3; ++v) {
            if (t.node[static_cast<std::size_t>(v)] >= 0) {
                const double u = w[t.node[static_cast<std::size_t>(v)]];
                sx += t.cx[static_cast<std::size_t>(v)] * u;
                sy += t.cy[static_cast<std::size_t>(v)] * u;
                sum += u;
            }
        }
        double gx = 0.0;
        double gy = 0.0;
        dir_sum += t.w * dn.half_sq(sign * sx, sign * sy, gx, gy);
        src_sum += t.w * sum / 3.0;
        if (grad != nullptr) {
            for (int v = 0; v < 3; ++v) {
                const int k = t.node[static_cast<std::size_t>(v)];
                if (k >= 0) {
                    grad[k] += t.w * (sign * (gx * t.cx[static_cast<std::size_t>(v)] +
                                              gy * t.cy[static_cast<std::size_t>(v)]) -
                                      1.0 / 3.0);
                }
            }
        }
    }
    dirichlet = static_cast<double>(dir_sum);
    source = static_cast<double>(src_sum);
    if (grad != nullptr) {
        for (std::size_t k = 0; k < g.interior.size(); ++k) {
            if (g.interior[k] == 0) {
                grad[k] = 0.0;
            }
        }
    }
}

/// Hessian of sum_T w_T 1/2 grad_T^T H^{-1} grad_T over the free nodes; the
/// Riemannian part of the energy, used as the solver's preconditioner.
Eigen::SparseMatrix<double> riemannian_hessian(const Stencil& st, const Eigen::Matrix2d& hinv,
                                               const std::vector<int>& dof)
{
    std::vector<Eigen::Triplet<double>> trip;
    for (const Tri& t : st.tris) {
        for (std::size_t r = 0; r < 3; ++r) {
            if (t.node[r] < 0) {
                continue;
            }
            const int dr = dof[static_cast<std::size_t>(t.node[r])];
            for (std::size_t c = 0; c < 3; ++c) {
                if (t.node[c] < 0) {
                    continue;
                }
                const int dc = dof[static_cast<std::size_t>(t.node[c])];
                const double v = t.w * (t.cx[r] * (hinv(0, 0) * t.cx[c] + hinv(0, 1) * t.cy[c]) +
                                        t.cy[r] * (hinv(1, 0) * t.cx[c] + hinv(1, 1) * t.cy[c]));
                trip.emplace_back(dr, dc, v);
            }
        }
    }
    const int m = *std::max_element(dof.begin(), dof.end()) + 1;
    Eigen::SparseMatrix<double> K(m, m);
    K.setFromTriplets(trip.begin(), trip.end());
    return K;
}

double ball_distance(const GridProblem& p, const DualNorm2&, const RandersLocal& loc, double x, double y)
{
    Eigen::Vector2d v(x - p.center.x(), y - p.center.y());
    if (p.ball_kind == BallKind::backward) {
        v = -v;
    }
    const Eigen::Matrix2d h = loc.h.topLeftCorner<2, 2>();
    return std::sqrt(v.dot(h * v)) + loc.beta.head<2>().dot(v);
}

struct Cache {
    RandersLocal loc;
    DualNorm2 dn;
    explicit Cache(const GridProblem& p) : loc(p.norm.at(Vec(p.center))), dn(loc) {}
};

double sup_abs(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

} // namespace

BallKind parse_ball_kind(const std::string& s)
{
    if (s == "forward") {
        return BallKind::forward;
    }
    if (s == "backward") {
        return BallKind::backward;
    }
    fail(ErrorKind::invalid_argument, "ball kind must be forward or backward, got '" + s + "'");
}

std::string to_string(BallKind k) { return k == BallKind::forward ? "forward" : "backward"; }

void GridProblem::validate() const
{
    require(norm.dim() == 2 && norm.is_minkowski(), ErrorKind::invalid_argument,
            "the grid solver needs a 2-D Minkowski norm");
    require(center.allFinite(), ErrorKind::invalid_argument, "center must be finite");
    require(std::isfinite(rho) && rho > 0.0, ErrorKind::invalid_argument, "rho must be positive");
    require(N >= 65 && N % 2 == 1, ErrorKind::invalid_argument, "N must be odd and at least 65");
    require(N <= 4097, ErrorKind::invalid_argument, "N must be at most 4097");
    require(mu == 0.0, ErrorKind::invalid_argument, "only mu = 0 is admissible in dimension 2");
}

int Grid::interior_count() const
{
    return static_cast<int>(std::count(interior.begin(), interior.end(), std::uint8_t{1}));
}

Grid build_domain(const GridProblem& p)
{
    p.validate();
    const Cache cache(p);
    const auto& loc = cache.loc;
    Grid g;
    g.N = p.N;
    g.center = p.center;
    // Largest Euclidean extent of {F(v) < rho}: F(v) >= (1 - |beta|_h) |v|_h.
    const Eigen::Matrix2d hm = loc.h.topLeftCorner<2, 2>();
    const double tr = 0.5 * (hm(0, 0) + hm(1, 1));
    const double lam_min = tr - std::hypot(0.5 * (hm(0, 0) - hm(1, 1)), hm(0, 1));
    g.half_width = p.rho / ((1.0 - loc.beta_norm) * std::sqrt(lam_min));
    g.h = 2.0 * g.half_width / (p.N - 1);
    const int N = p.N;
    const std::size_t total = static_cast<std::size_t>(N) * static_cast<std::size_t>(N);
    g.interior.assign(total, 0);
    g.theta.assign(total, {1.0, 1.0, 1.0, 1.0});
    auto dist = [&](double x, double y) { return ball_distance(p, cache.dn, loc, x, y); };
    for (int j = 0; j < N; ++j) {
        for (int i = 0; i < N; ++i) {
            if (dist(g.x(i), g.y(j)) < p.rho) {
                g.interior[static_cast<std::size_t>(g.index(i, j))] = 1;
            }
        }
    }
    require(g.interior_count() > 0, ErrorKind::domain_error, "the discrete ball has no interior node");
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    for (int j = 0; j < N; ++j) {
        for (int i = 0; i < N; ++i) {
            const auto k = static_cast<std::size_t>(g.index(i, j));
            if (g.interior[k] == 0) {
                continue;
            }
            for (int d = 0; d < 4; ++d) {
                const int ni = i + di[d];
                const int nj = j + dj[d];
                if (ni >= 0 && nj >= 0 && ni < N && nj < N &&
                    g.interior[static_cast<std::size_t>(g.index(ni, nj))] != 0) {
                    continue;
                }
                // F is convex along the edge: one crossing in (0, 1].
                double lo = 0.0;
                double hi = 1.0;
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (dist(g.x(i) + mid * di[d] * g.h, g.y(j) + mid * dj[d] * g.h) < p.rho) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                g.theta[k][static_cast<std::size_t>(d)] = std::max(theta_floor, hi);
            }
        }
    }
    return g;
}

double energy_and_gradient(const GridProblem& p, const Grid& g, const std::vector<double>& u,
                           std::vector<double>& grad)
{
    const Cache cache(p);
    const Stencil st = make_stencil(g);
    grad.assign(u.size(), 0.0);
    double dir = 0.0;
    double src = 0.0;
    accumulate(cache.dn, g, st, u.data(), -1.0, dir, src, grad.data());
    return dir - src;
}

double energy(const GridProblem& p, const Grid& g, const GridFunction& u)
{
    const Cache cache(p);
    const Stencil st = make_stencil(g);
    double dir = 0.0;
    double src = 0.0;
    accumulate(cache.dn, g, st, u.u.data(), -1.0, dir, src, nullptr);
    return dir - src;
}

double dirichlet_energy(const GridProblem& p, const Grid& g, const GridFunction& w)
{
    const Cache cache(p);
    const Stencil st = make_stencil(g);
    double dir = 0.0;
    double src = 0.0;
    accumulate(cache.dn, g, st, w.u.data(), -1.0, dir, src, nullptr);
    return dir;
}

SolveResult solve(const GridProblem& p, const Grid& g, const SolverOptions& opts, const GridFunction* initial)
{
    p.validate();
    const Cache cache(p);
    const Stencil st = make_stencil(g);
    const std::size_t n = g.interior.size();
    // Optimize over interior nodes only.
    std::vector<int> free;
    for (std::size_t k = 0; k < n; ++k) {
        if (g.interior[k] != 0) {
            free.push_back(static_cast<int>(k));
        }
    }
    const std::size_t m = free.size();
    std::vector<int> dof(n, -1);
    for (std::size_t k = 0; k < m; ++k) {
        dof[static_cast<std::size_t>(free[k])] = static_cast<int>(k);
    }
    const Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> precond(
        riemannian_hessian(st, cache.dn.hinv, dof));
    require(precond.info() == Eigen::Success, ErrorKind::accuracy_failure,
            "preconditioner factorization failed");
    std::vector<double> full(n, 0.0);
    std::vector<double> full_grad(n, 0.0);
    if (initial != nullptr) {
        require(initial->u.size() == n, ErrorKind::invalid_argument, "initial guess has the wrong size");
    }
    auto eval = [&](const Eigen::VectorXd& x, Eigen::VectorXd& gx) {
        for (std::size_t k = 0; k < m; ++k) {
            full[static_cast<std::size_t>(free[k])] = x(static_cast<Eigen::Index>(k));
        }
        std::fill(full_grad.begin(), full_grad.end(), 0.0);
        double dir = 0.0;
        double src = 0.0;
        accumulate(cache.dn, g, st, full.data(), -1.0, dir, src, full_grad.data());
        gx.resize(static_cast<Eigen::Index>(m));
        for (std::size_t k = 0; k < m; ++k) {
            gx(static_cast<Eigen::Index>(k)) = full_grad[static_cast<std::size_t>(free[k])];
        }
        return dir - src;
    };

    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    if (initial != nullptr) {
        for (std::size_t k = 0; k < m; ++k) {
            x(static_cast<Eigen::Index>(k)) = initial->u[static_cast<std::size_t>(free[k])];
        }
    }
    Eigen::VectorXd gx;
    double fx = eval(x, gx);
    const double area = g.h * g.h;

    SolveResult res;
    res.energy_history.push_back(fx);
    std::deque<Eigen::VectorXd> S;
    std::deque<Eigen::VectorXd> Y;
    std::deque<double> Rho;
    Eigen::VectorXd xn;
    Eigen::VectorXd gn;
    for (int iter = 0;; ++iter) {
        res.grad_sup = gx.cwiseAbs().maxCoeff() / area;
        const double umax = x.size() > 0 ? x.cwiseAbs().maxCoeff() : 0.0;
        if (res.grad_sup <= opts.grad_tol * (1.0 + umax)) {
            res.stop_reason = "gradient";
            res.iterations = iter;
            break;
        }
        const auto hs = res.energy_history.size();
        if (hs > static_cast<std::size_t>(opts.stall_window)) {
            const double old = res.energy_history[hs - 1 - static_cast<std::size_t>(opts.stall_window)];
            if (old - fx <= opts.stall_tol * std::abs(fx)) {
                res.stop_reason = "stalled";
                res.iterations = iter;
                break;
            }
        }
        if (iter >= opts.max_iterations) {
            fail(ErrorKind::accuracy_failure,
                 "grid solver did not converge within " + std::to_string(opts.max_iterations) + " iterations");
        }
        // Two-loop recursion.
        Eigen::VectorXd q = gx;
        std::vector<double> alpha(S.size());
        for (std::size_t k = S.size(); k-- > 0;) {
            alpha[k] = Rho[k] * S[k].dot(q);
            q -= alpha[k] * Y[k];
        }
        // Initial inverse Hessian gamma K^{-1}, gamma from the last two points.
        double gamma = 1.0;
        if (!S.empty()) {
            gamma = S.back().dot(Y.back()) / Y.back().dot(precond.solve(Y.back()));
        }
        q = gamma * precond.solve(q);
        for (std::size_t k = 0; k < S.size(); ++k) {
            const double beta = Rho[k] * Y[k].dot(q);
            q += (alpha[k] - beta) * S[k];
        }
        Eigen::VectorXd d = -q;
        double slope0 = gx.dot(d);
        if (!(slope0 < 0.0)) {
            // Lost descent: restart from steepest descent.
            S.clear();
            Y.clear();
            Rho.clear();
            d = -precond.solve(gx);
            slope0 = gx.dot(d);
        }
        double step = 1.0;
        double fn = 0.0;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            xn = x + step * d;
            fn = eval(xn, gn);
            if (fn <= fx + 1e-4 * step * slope0) {
                accepted = true;
                break;
            }
            // Near the minimum energy differences drown in rounding; accept on
            // the approximate Wolfe conditions instead.
            const double dphi = gn.dot(d);
            if (fn <= fx + energy_noise * std::abs(fx) && dphi >= 0.9 * slope0 && dphi <= -0.8 * slope0) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            res.stop_reason = "line-search";
            res.iterations = iter;
            break;
        }
        if (step < 1e-2) {
            // Curvature pairs gathered across the kink of F*^2 at zero covectors
            // can stall the update; start the memory afresh.
            S.clear();
            Y.clear();
            Rho.clear();
        }
        Eigen::VectorXd s = xn - x;
        Eigen::VectorXd y = gn - gx;
        const double sy = s.dot(y);
        if (sy > 1e-300) {
            S.push_back(std::move(s));
            Y.push_back(std::move(y));
            Rho.push_back(1.0 / sy);
            if (static_cast<int>(S.size()) > opts.history) {
                S.pop_front();
                Y.pop_front();
                Rho.pop_front();
            }
        }
        x.swap(xn);
        gx.swap(gn);
        fx = fn;
        res.energy_history.push_back(fx);
    }

    res.u.u.assign(n, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        res.u.u[static_cast<std::size_t>(free[k])] = x(static_cast<Eigen::Index>(k));
    }
    res.energy = fx;
    const double umax = sup_abs(res.u.u);
    const double umin = *std::min_element(res.u.u.begin(), res.u.u.end());
    require(umin >= -1e-9 * std::max(umax, 1e-300), ErrorKind::accuracy_failure,
            "grid solution has a negative value " + report::format_double(umin));
    return res;
}

SolveResult solve(const GridProblem& p, const SolverOptions& opts)
{
    const Grid g = build_domain(p);
    return solve(p, g, opts, nullptr);
}

double forward_distance(const GridProblem& p, double x, double y)
{
    const RandersLocal loc = p.norm.at(Vec(p.center));
    const Eigen::Vector2d v(x - p.center.x(), y - p.center.y());
    return std::sqrt(v.dot(loc.h.topLeftCorner<2, 2>() * v)) + loc.beta.head<2>().dot(v);
}

double forward_exact(const GridProblem& p, double x, double y)
{
    const double F = forward_distance(p, x, y);
    return (p.rho * p.rho - F * F) / 4.0;
}

ErrorReport forward_error(const GridProblem& p, const Grid& g, const GridFunction& u)
{
    ErrorReport rep;
    double umax = 0.0;
    for (int j = 0; j < g.N; ++j) {
        for (int i = 0; i < g.N; ++i) {
            const auto k = static_cast<std::size_t>(g.index(i, j));
            if (g.interior[k] == 0) {
                continue;
            }
            const double exact = forward_exact(p, g.x(i), g.y(j));
            rep.sup_abs = std::max(rep.sup_abs, std::abs(u.u[k] - exact));
            umax = std::max(umax, std::abs(exact));
        }
    }
    rep.sup_rel = umax > 0.0 ? rep.sup_abs / umax : rep.sup_abs;
    rep.u_center = u.u[static_cast<std::size_t>(g.index(g.N / 2, g.N / 2))];
    return rep;
}

SandwichReport backward_sandwich(const GridProblem& p, const Grid& g, const GridFunction& u, double slack)
{
    SandwichReport rep;
    const RandersLocal loc = p.norm.at(Vec(p.center));
    rep.r_F = (1.0 + loc.beta_norm) / (1.0 - loc.beta_norm);
    const double lo_r = p.rho / rep.r_F;
    const double hi_r = p.rho * rep.r_F;
    rep.lower.assign(u.u.size(), 0.0);
    rep.upper.assign(u.u.size(), 0.0);
    rep.lower_slack = std::numeric_limits<double>::infinity();
    rep.upper_slack = std::numeric_limits<double>::infinity();
    rep.min_u = std::numeric_limits<double>::infinity();
    int active = 0;
    int count = 0;
    for (int j = 0; j < g.N; ++j) {
        for (int i = 0; i < g.N; ++i) {
            const auto k = static_cast<std::size_t>(g.index(i, j));
            if (g.interior[k] == 0) {
                continue;
            }
            const double F = forward_distance(p, g.x(i), g.y(j));
            rep.lower[k] = std::max(0.0, (lo_r * lo_r - F * F) / 4.0);
            rep.upper[k] = (hi_r * hi_r - F * F) / 4.0;
            rep.lower_slack = std::min(rep.lower_slack, u.u[k] - rep.lower[k]);
            rep.upper_slack = std::min(rep.upper_slack, rep.upper[k] - u.u[k]);
            rep.min_u = std::min(rep.min_u, u.u[k]);
            if (rep.lower[k] > 0.0) {
                ++active;
            }
            ++count;
        }
    }
    rep.lower_active_fraction = count > 0 ? static_cast<double>(active) / count : 0.0;
    rep.holds = rep.lower_slack >= -slack && rep.upper_slack >= -slack && rep.min_u >= 0.0;
    return rep;
}

ConvexityReport convexity_probe(const GridProblem& p, const Grid& g, const GridFunction& u,
                                const GridFunction& v, const std::vector<double>& ts, double rel_tol)
{
    require(u.u.size() == v.u.size() && u.u.size() == g.interior.size(), ErrorKind::invalid_argument,
            "grid functions do not match the grid");
    ConvexityReport rep;
    const RandersLocal loc = p.norm.at(Vec(p.center));
    rep.l_F = std::pow((1.0 - loc.beta_norm) / (1.0 + loc.beta_norm), 2);
    const double Eu = dirichlet_energy(p, g, u);
    const double Ev = dirichlet_energy(p, g, v);
    GridFunction diff;
    diff.u.resize(u.u.size());
    for (std::size_t k = 0; k < u.u.size(); ++k) {
        diff.u[k] = v.u[k] - u.u[k];
    }
    const double Q = dirichlet_energy(p, g, diff);
    const double scale = std::max({std::abs(Eu), std::abs(Ev), Q, 1e-300});
    rep.worst_margin = std::numeric_limits<double>::infinity();
    GridFunction w;
    w.u.resize(u.u.size());
    for (double t : ts) {
        for (std::size_t k = 0; k < u.u.size(); ++k) {
            w.u[k] = t * u.u[k] + (1.0 - t) * v.u[k];
        }
        const double lhs = dirichlet_energy(p, g, w);
        const double rhs = t * Eu + (1.0 - t) * Ev - rep.l_F * t * (1.0 - t) * Q;
        rep.worst_margin = std::min(rep.worst_margin, (rhs - lhs) / scale);
    }
    for (std::size_t k = 0; k < u.u.size(); ++k) {
        w.u[k] = 0.5 * (u.u[k] + v.u[k]);
    }
    rep.midpoint_gap = (0.5 * (Eu + Ev) - dirichlet_energy(p, g, w)) / scale;
    rep.holds = rep.worst_margin >= -rel_tol;
    rep.strict_midpoint = Q == 0.0 || rep.midpoint_gap > 0.0;
    return rep;
}

std::string to_csv(const GridProblem& p, const Grid& g, const GridFunction& u)
{
    std::vector<double> lower;
    std::vector<double> upper;
    if (p.ball_kind == BallKind::backward) {
        auto rep = backward_sandwich(p, g, u);
        lower = std::move(rep.lower);
        upper = std::move(rep.upper);
    }
    using report::format_double;
    std::ostringstream os;
    os << "i,j,x,y,u,lower_bound,upper_bound\n";
    for (int j = 0; j < g.N; ++j) {
        for (int i = 0; i < g.N; ++i) {
            const auto k = static_cast<std::size_t>(g.index(i, j));
            if (g.interior[k] == 0) {
                continue;
            }
            double lo = 0.0;
            double hi = 0.0;
            if (p.ball_kind == BallKind::backward) {
                lo = lower[k];
                hi = upper[k];
            } else {
                lo = hi = forward_exact(p, g.x(i), g.y(j));
            }
            os << i << ',' << j << ',' << format_double(g.x(i)) << ',' << format_double(g.y(j)) << ','
               << format_double(u.u[k]) << ',' << format_double(lo) << ',' << format_double(hi) << '\n';
        }
    }
    return os.str();
}

nlohmann::ordered_json summary_json(const GridProblem& p, const Grid& g, const SolveResult& r)
{
    nlohmann::ordered_json j;
    j["schema"] = "1";
    j["ball"] = to_string(p.ball_kind);
    j["rho"] = p.rho;
    j["N"] = p.N;
    j["h"] = g.h;
    j["interior_nodes"] = g.interior_count();
    j["iterations"] = r.iterations;
    j["stop_reason"] = r.stop_reason;
    j["energy"] = r.energy;
    j["grad_sup"] = r.grad_sup;
    nlohmann::ordered_json errors;
    if (p.ball_kind == BallKind::forward) {
        const auto e = forward_error(p, g, r.u);
        errors["sup_abs"] = e.sup_abs;
        errors["sup_rel"] = e.sup_rel;
        errors["u_center"] = e.u_center;
    } else {
        const auto s = backward_sandwich(p, g, r.u);
        errors["r_F"] = s.r_F;
        errors["lower_slack"] = s.lower_slack;
        errors["upper_slack"] = s.upper_slack;
        errors["min_u"] = s.min_u;
        errors["lower_active_fraction"] = s.lower_active_fraction;
        errors["sandwich_holds"] = s.holds;
    }
    j["errors"] = std::move(errors);
    return j;
}

} // namespace finpoisson::pde
