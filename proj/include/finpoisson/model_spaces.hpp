#pragma once

// Constant-curvature comparison functions (c <= 0) and the closed-form
// geometry of the Finsler-Poincare disc B^2(0, 2).

namespace finpoisson::model {

/// s_c(r): solution of y'' + c y = 0, y(0) = 0, y'(0) = 1.
double s_c(double c, double r);
/// s_c'(r).
double s_c_prime(double c, double r);
/// ct_c(r) = s_c'(r) / s_c(r), r > 0. Uses the coth series near the origin.
double ct_c(double c, double r);
/// r * ct_c(r); smooth on [0, inf) with value 1 at r = 0.
double r_ct_c(double c, double r);

/// Volume of a geodesic ball of radius rho in the n-dimensional model space
/// of curvature c: n omega_n int_0^rho s_c^{n-1}.
double V_cn(double c, int n, double rho);

/// w_c(r) = int_0^r s_c(s)^{1-n} int_0^s s_c(t)^{n-1} dt ds, the radial
/// potential with Laplacian 1. Composite Gauss-Legendre panels with the inner
/// integral accumulated along the outer nodes.
double w_c(double c, int n, double r);

/// Exact Laplacian (n-1) ct_c(r) of the distance function on the model space.
double radial_laplacian(double c, int n, double r);

struct PoincarePoint {
    double r = 0.0;
    double theta = 0.0;
};

/// F((r, theta), p d/dr + q d/dtheta).
double poincare_metric(PoincarePoint x, double p, double q);
/// d_F(0, x) = log((4 + r^2) / (2 - r)^2).
double poincare_dist_from_origin(double r);
/// d_F(x, 0) = log((2 + r)^2 / (4 + r^2)).
double poincare_dist_to_origin(double r);
/// Hausdorff density with respect to dr dtheta.
double poincare_density(double r);
/// r_F(x) = ((2 + r) / (2 - r))^2.
double poincare_reversibility(double r);
/// Coefficient of dr in D d_F(0, x).
double poincare_distance_derivative(double r);

struct DualAlongDistance {
    double closed_form = 0.0;
    double via_dual = 0.0; // Randers dual of the disc applied to +-D d_F(0, x)
};

/// F*(x, sign * D d_F(0, x)), sign in {+1, -1}.
DualAlongDistance poincare_dual_along_distance(double r, int sign);

} // namespace finpoisson::model
