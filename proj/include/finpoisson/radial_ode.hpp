#pragma once

// Solver for the singular two-point problem
//
//   f'' + (n-1) ct_c(r) f' + mu f / r^2 + lambda = 0  on (0, rho],
//   f(rho) = 0,  int_0^rho f'^2 r^{n-1} dr < inf,
//
// by superposing a particular and a finite-energy homogeneous solution, both
// started from their leading Frobenius behaviour at r = eps.

#include "finpoisson/special_functions.hpp"

#include <span>
#include <vector>

namespace finpoisson::ode {

struct OdeParams {
    special::SigmaParams sigma;
    /// Startup radius; values <= 0 select 1e-6 * rho.
    double eps = 0.0;
    /// Size of the default output grid (log-uniform in r over [eps, rho]).
    int grid_n = 4096;
    double rk_tol = 1e-12;
    /// Constant source term lambda (1 in the model problem).
    double source = 1.0;
    /// Explicit output radii in [eps, rho]; replaces the default grid when set.
    std::vector<double> radii;

    double startup_radius() const noexcept { return eps > 0.0 ? eps : 1e-6 * sigma.rho; }
    void validate() const;
};

struct RadialSolution {
    std::vector<double> r;
    std::vector<double> f;
    std::vector<double> fp;
    /// Amplitude of the homogeneous solution normalized by f_hom(eps) = eps^{alpha_+}.
    double a_hom = 0.0;
    double alpha_plus = 0.0;
    double eps = 0.0;
    double energy = 0.0;
    double residual_max = 0.0;
    int steps = 0;
    special::SigmaParams sigma;
    double source = 1.0;
};

RadialSolution solve_Q(const OdeParams& p);

/// int_0^rho f'^2 r^{n-1} dr: composite Simpson in log r over the solution
/// grid plus the closed-form contribution of [0, eps] from the leading
/// behaviour f' ~ alpha a r^{alpha-1} - 2 lambda r / (mu + 2n).
double energy_integral(const RadialSolution& sol, int n);

/// Normalized residual at every interior node:
///   |f'' + (n-1) ct_c f' + mu f / r^2 + lambda| / (1 + |f''| + |(n-1) ct_c f'| + |mu f / r^2|)
/// with f'' = (dg/dt - g) / r^2, g = r f', t = log r, and dg/dt from the
/// five-point Lagrange stencil centred on the node. The two nodes at each end
/// get zero.
std::vector<double> residual_profile(const RadialSolution& sol, const OdeParams& p);
double residual_check(const RadialSolution& sol, const OdeParams& p);

/// Evaluates the solution at radii between grid nodes by cubic Hermite
/// interpolation in log r.
double interpolate(const RadialSolution& sol, double r);

struct MonotonicityReport {
    int n = 3;
    double mu = 0.0;
    int comparisons = 0;
    bool curvature_order_ok = true;
    bool radius_order_ok = true;
    bool nonnegative_ok = true;
    bool nonincreasing_ok = true;
    /// Largest positive value of sigma_{c1} - sigma_{c2} (c1 < c2), resp.
    /// sigma_{rho1} - sigma_{rho2} (rho1 < rho2), relative to max sigma.
    double worst_curvature_violation = 0.0;
    double worst_radius_violation = 0.0;
};

/// Checks c1 <= c2 => sigma_{mu,rho,c1} <= sigma_{mu,rho,c2} and
/// rho1 <= rho2 => sigma_{mu,rho1,c} <= sigma_{mu,rho2,c} on (0, rho1].
MonotonicityReport sigma_monotonicity_scan(int n, double mu, std::span<const double> rhos,
                                           std::span<const double> cs, double tol = 1e-10);

} // namespace finpoisson::ode
