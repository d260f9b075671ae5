#pragma once

// Finite-difference solver for Delta(-u) = 1, u = 0 on the boundary, on
// forward and backward balls of a 2-D Minkowski-Randers norm. The solution
// minimizes the convex energy
//
//   E(u) = sum_cells area * [ 1/4 sum_corners 1/2 F*(-grad_k u)^2 - avg(u) ]
//
// where grad_k u are the four one-sided corner gradients of a cell. Cells cut
// by the boundary use the polygon of their interior corners and edge
// crossings (u = 0 there), averaged over its fan triangulations; on an uncut
// cell that average is exactly the corner formula above.

#include "finpoisson/randers.hpp"

#include <nlohmann/json_fwd.hpp>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace finpoisson::pde {

enum class BallKind { forward, backward };

BallKind parse_ball_kind(const std::string& s);
std::string to_string(BallKind k);

struct GridProblem {
    RandersStructure norm = RandersStructure::euclidean(2);
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    double rho = 1.0;
    BallKind ball_kind = BallKind::forward;
    /// Nodes per axis; odd and >= 65 so the center is a node.
    int N = 161;
    double mu = 0.0;

    void validate() const;
};

struct SolverOptions {
    int max_iterations = 20000;
    int history = 12;
    /// Stop when max_i |dE/du_i| / h^2 <= grad_tol * (1 + max |u|).
    /// (dE/du_i / h^2 is the discrete residual of the equation at node i.)
    double grad_tol = 1e-9;
    /// ... or when the energy drops by less than this (relative) over `stall_window` iterations.
    double stall_tol = 1e-12;
    int stall_window = 20;
};

/// Node layout over the square [center - L, center + L]^2 that contains the ball.
struct Grid {
    int N = 0;
    double h = 0.0;
    double half_width = 0.0;
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    /// interior[j * N + i]
    std::vector<std::uint8_t> interior;
    /// Fraction theta in (0, 1] of each edge from an interior node to the
    /// boundary, for the four directions (+x, -x, +y, -y); 1 when the
    /// neighbour is interior.
    std::vector<std::array<double, 4>> theta;

    double x(int i) const { return center.x() - half_width + i * h; }
    double y(int j) const { return center.y() - half_width + j * h; }
    int index(int i, int j) const { return j * N + i; }
    int interior_count() const;
};

/// Builds the node mask and the boundary cut fractions. Throws domain_error
/// when no node is interior.
Grid build_domain(const GridProblem& p);

/// Nodal values over the full N x N grid; zero off the interior.
struct GridFunction {
    std::vector<double> u;
};

/// The full energy (Dirichlet part minus source term).
double energy(const GridProblem& p, const Grid& g, const GridFunction& u);
/// Only the Dirichlet part sum area * 1/4 sum_k 1/2 F*(-grad_k w)^2.
double dirichlet_energy(const GridProblem& p, const Grid& g, const GridFunction& w);
/// Energy and its gradient with respect to the nodal values.
double energy_and_gradient(const GridProblem& p, const Grid& g, const std::vector<double>& u,
                           std::vector<double>& grad);

struct SolveResult {
    GridFunction u;
    double energy = 0.0;
    int iterations = 0;
    double grad_sup = 0.0;
    std::string stop_reason;
    /// Energy after each accepted iteration, starting with the initial guess.
    std::vector<double> energy_history;
};

/// L-BFGS with two-point initial scaling and Armijo backtracking, from u = 0
/// unless `initial` is given. Throws accuracy_failure on hitting the cap.
SolveResult solve(const GridProblem& p, const Grid& g, const SolverOptions& opts = {},
                  const GridFunction* initial = nullptr);
SolveResult solve(const GridProblem& p, const SolverOptions& opts = {});

/// F(x - center): the forward distance from the center, and the exact
/// forward-ball solution (rho^2 - F^2) / 4.
double forward_distance(const GridProblem& p, double x, double y);
double forward_exact(const GridProblem& p, double x, double y);

struct ErrorReport {
    double sup_abs = 0.0;
    double sup_rel = 0.0;
    double u_center = 0.0;
};

/// Sup-norm error against (rho^2 - F(x - x0)^2) / 4 on interior nodes.
ErrorReport forward_error(const GridProblem& p, const Grid& g, const GridFunction& u);

struct SandwichReport {
    double r_F = 1.0;
    /// min over interior nodes of u - lower and upper - u.
    double lower_slack = 0.0;
    double upper_slack = 0.0;
    double min_u = 0.0;
    /// Share of interior nodes where the lower bound is positive.
    double lower_active_fraction = 0.0;
    bool holds = false;
    std::vector<double> lower;
    std::vector<double> upper;
};

/// Bounds ((rho/r_F)^2 - F^2)_+ / 4 <= u <= ((r_F rho)^2 - F^2) / 4 with
/// F = F(x - x0), checked with the given slack.
SandwichReport backward_sandwich(const GridProblem& p, const Grid& g, const GridFunction& u,
                                 double slack = 1e-3);

struct ConvexityReport {
    double l_F = 1.0;
    /// min over t of rhs - lhs; non-negative when the inequality holds.
    double worst_margin = 0.0;
    /// E((u+v)/2) compared with (E(u)+E(v))/2.
    double midpoint_gap = 0.0;
    bool holds = false;
    bool strict_midpoint = false;
};

/// E(tu + (1-t)v) <= t E(u) + (1-t) E(v) - l_F t(1-t) E(v - u) for the
/// Dirichlet part E, at every t in `ts`.
ConvexityReport convexity_probe(const GridProblem& p, const Grid& g, const GridFunction& u,
                                const GridFunction& v, const std::vector<double>& ts,
                                double rel_tol = 1e-12);

/// Rows i,j,x,y,u,lower_bound,upper_bound for the interior nodes. For forward
/// balls both bounds are the exact solution.
std::string to_csv(const GridProblem& p, const Grid& g, const GridFunction& u);
nlohmann::ordered_json summary_json(const GridProblem& p, const Grid& g, const SolveResult& r);

} // namespace finpoisson::pde
