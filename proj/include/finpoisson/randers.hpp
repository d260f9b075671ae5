#pragma once

// Randers structures F(x, y) = sqrt(h_x(y, y)) + beta_x(y) together with
// their polar transforms, symmetrizations, Legendre transforms and the
// reversibility / uniformity constants.

#include "finpoisson/error.hpp"

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include <functional>
#include <string>

namespace finpoisson {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct VectorAt {
    Vec base;
    Vec comp;
};

struct CovectorAt {
    Vec base;
    Vec comp;
};

/// Pointwise data of a Randers structure at one base point.
struct RandersLocal {
    Mat h;
    Mat h_inv;
    Vec beta;
    double beta_norm = 0.0; // sqrt(beta^T h^{-1} beta)
    double sqrt_det_h = 1.0;
};

/// Immutable Randers structure. Custom fields are supplied as callables;
/// the named constructors cover the closed-form models used throughout.
class RandersStructure {
public:
    using MetricField = std::function<Mat(const Vec&)>;
    using FormField = std::function<Vec(const Vec&)>;
    using DomainPredicate = std::function<bool(const Vec&)>;

    static RandersStructure euclidean(int dim);
    static RandersStructure minkowski(Mat h, Vec beta);
    /// Constant h = I and beta = b; the usual 2-D/3-D test norm |y| + b.y.
    static RandersStructure minkowski_randers(const Vec& b);
    /// Finsler-Poincare disc on B^2(0,2) in Cartesian coordinates.
    static RandersStructure poincare_disc();
    static RandersStructure custom(int dim, MetricField h, FormField beta,
                                   DomainPredicate inside = {});
    /// {"dim": n, "kind": "...", "b": [...], "h": [[...]]}
    static RandersStructure from_json(const nlohmann::json& descriptor);

    int dim() const noexcept { return dim_; }
    bool is_minkowski() const noexcept { return is_minkowski_; }
    const std::string& kind() const noexcept { return kind_; }

    /// Evaluates and validates h and beta at x. Throws invalid_argument for
    /// non-finite or out-of-domain points, invalid_structure when h is not
    /// positive definite or ||beta||_h >= 1.
    RandersLocal at(const Vec& x) const;

private:
    RandersStructure(int dim, std::string kind, bool minkowski, MetricField h, FormField beta,
                     DomainPredicate inside);

    int dim_;
    std::string kind_;
    bool is_minkowski_;
    MetricField h_;
    FormField beta_;
    DomainPredicate inside_;
};

/// Constants attached to a structure at a point; mu_bar = (n-2)^2/4 and
/// mu_max = l_F r_F^{-2} mu_bar is the admissible Hardy weight.
struct MetricConstants {
    double r_F = 1.0;
    double l_F = 1.0;
    double mu_bar = 0.0;
    double mu_max = 0.0;
};

/// Generic norm evaluator (x, y) -> F(x, y).
using NormFn = std::function<double(const Vec& x, const Vec& y)>;

double eval_F(const RandersStructure& s, const Vec& x, const Vec& y);
double eval_F(const RandersStructure& s, const VectorAt& v);
double eval_F_dual(const RandersStructure& s, const Vec& x, const Vec& alpha);
double eval_F_dual(const RandersStructure& s, const CovectorAt& a);
double eval_F_sym(const RandersStructure& s, const Vec& x, const Vec& y);
double eval_F_sym_dual(const RandersStructure& s, const Vec& x, const Vec& alpha);

/// Dual of F evaluated from precomputed local data; used in hot loops.
double eval_F_dual(const RandersLocal& local, const Vec& alpha);

NormFn norm_fn(const RandersStructure& s);
NormFn sym_norm_fn(const RandersStructure& s);
/// (x, alpha) -> F*(x, alpha) packaged as a norm on covectors.
NormFn dual_norm_fn(const RandersStructure& s);

/// sup_{y != 0} alpha(y) / F(x, y), by uniform direction seeding (2-D angles,
/// 3-D Fibonacci sphere) followed by golden-section refinement of the best
/// seed. A lower bound of the exact supremum.
double polar_transform_numeric(const NormFn& F, const Vec& x, const Vec& alpha, int samples = 256);

double reversibility(const RandersStructure& s, const Vec& x);
double uniformity(const RandersStructure& s, const Vec& x);
MetricConstants metric_constants(const RandersStructure& s, const Vec& x);

/// max over sampled directions of F(x, y) / F(x, -y) (2-D or 3-D).
double reversibility_numeric(const NormFn& F, const Vec& x, int samples = 10000);

/// Fundamental tensor g_v = Hess_y (F^2 / 2) at v, closed form for Randers.
Mat fundamental_tensor(const RandersStructure& s, const Vec& x, const Vec& v);

/// inf_y [min_v g_v(y, y) / max_w g_w(y, y)] over sampled directions.
double uniformity_numeric(const RandersStructure& s, const Vec& x, int samples = 256);

/// J*(x, alpha) = gradient of F*^2/2 at alpha, closed form for Randers.
Vec legendre(const RandersStructure& s, const Vec& x, const Vec& alpha);
VectorAt legendre(const RandersStructure& s, const CovectorAt& a);

/// Same map by central differences of F*^2/2 with relative step
/// fd_step * ||alpha|| per component; works for any dual-norm evaluator.
Vec legendre_numeric(const NormFn& F_dual, const Vec& x, const Vec& alpha, double fd_step = 1e-6);

/// Euclidean volume of the unit ball {y : F(x, y) < 1} (dim 2 or 3) by the
/// polar integral of R(e)^n / n with R(e) = 1 / F(x, e).
double unit_ball_volume_numeric(const NormFn& F, const Vec& x, int dim);

/// sigma_F(x) = omega_n / Vol(B_x(1)); closed form
/// (1 - ||beta||^2)^{(n+1)/2} sqrt(det h) for Randers structures.
double hausdorff_density(const RandersStructure& s, const Vec& x);
double hausdorff_density_numeric(const RandersStructure& s, const Vec& x);

/// Euclidean volume of the unit ball in R^n.
double unit_ball_volume(int n);

} // namespace finpoisson
