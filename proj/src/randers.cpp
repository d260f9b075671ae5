#include "finpoisson/randers.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

namespace finpoisson {

namespace {

constexpr double golden = 0.6180339887498949;

void require_finite(const Vec& v, const char* what)
{
    require(v.allFinite(), ErrorKind::invalid_argument, std::string(what) + " has non-finite entries");
}

void require_dim(const Vec& v, int dim, const char* what)
{
    require(v.size() == dim, ErrorKind::invalid_argument,
            std::string(what) + " has dimension " + std::to_string(v.size()) + ", expected " +
                std::to_string(dim));
}

/// Maximizes a smooth function of one variable on [lo, hi].
template <class F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double tol = 1e-13)
{
    double x1 = hi - golden * (hi - lo);
    double x2 = lo + golden * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > tol * (1.0 + std::abs(lo) + std::abs(hi))) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + golden * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - golden * (hi - lo);
            f1 = f(x1);
        }
    }
    const double xm = 0.5 * (lo + hi);
    const double fm = f(xm);
    if (f1 >= f2 && f1 >= fm) {
        return {x1, f1};
    }
    if (f2 >= fm) {
        return {x2, f2};
    }
    return {xm, fm};
}

Vec unit2(double theta)
{
    Vec e(2);
    e << std::cos(theta), std::sin(theta);
    return e;
}

/// Quasi-uniform points on S^2.
std::vector<Vec> fibonacci_sphere(int count)
{
    std::vector<Vec> pts;
    pts.reserve(static_cast<std::size_t>(count));
    const double ga = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / count;
        const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
        Vec e(3);
        e << rad * std::cos(ga * i), rad * std::sin(ga * i), z;
        pts.push_back(std::move(e));
    }
    return pts;
}

/// Orthonormal tangent pair at a unit vector of R^3.
std::pair<Vec, Vec> tangent_frame(const Vec& e)
{
    Vec a = std::abs(e(0)) < 0.9 ? Vec::Unit(3, 0) : Vec::Unit(3, 1);
    Vec t1 = a - a.dot(e) * e;
    t1.normalize();
    Eigen::Vector3d e3 = e;
    Eigen::Vector3d t13 = t1;
    Vec t2 = e3.cross(t13);
    return {t1, t2};
}

/// Maximizes a smooth 0-homogeneous function on S^1 or S^2.
template <class F>
double sphere_max(F&& f, int dim, int samples)
{
    if (dim == 2) {
        const double step = 2.0 * std::numbers::pi / samples;
        int best = 0;
        double best_val = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < samples; ++k) {
            const double v = f(unit2(k * step));
            if (v > best_val) {
                best_val = v;
                best = k;
            }
        }
        const auto [arg, val] =
            golden_max([&](double t) { return f(unit2(t)); }, (best - 1) * step, (best + 1) * step);
        return std::max(val, best_val);
    }
    if (dim == 3) {
        const auto seeds = fibonacci_sphere(samples);
        Vec e = seeds.front();
        double best_val = -std::numeric_limits<double>::infinity();
        for (const auto& s : seeds) {
            const double v = f(s);
            if (v > best_val) {
                best_val = v;
                e = s;
            }
        }
        // Coordinate ascent in the tangent plane of the current best point.
        double radius = 4.0 / std::sqrt(static_cast<double>(samples));
        for (int sweep = 0; sweep < 60 && radius > 1e-13; ++sweep) {
            const double before = best_val;
            for (int axis = 0; axis < 2; ++axis) {
                const auto [t1, t2] = tangent_frame(e);
                const Vec& t = axis == 0 ? t1 : t2;
                auto g = [&](double s) { return f((e + s * t).normalized()); };
                const auto [arg, val] = golden_max(g, -radius, radius);
                if (val > best_val) {
                    best_val = val;
                    e = (e + arg * t).normalized();
                }
            }
            if (best_val - before <= 1e-15 * std::abs(best_val)) {
                radius *= 0.25;
            }
        }
        return best_val;
    }
    fail(ErrorKind::invalid_argument, "direction sampling supports dimension 2 or 3 only");
}

} // namespace

RandersStructure::RandersStructure(int dim, std::string kind, bool minkowski, MetricField h,
                                   FormField beta, DomainPredicate inside)
    : dim_(dim)
    , kind_(std::move(kind))
    , is_minkowski_(minkowski)
    , h_(std::move(h))
    , beta_(std::move(beta))
    , inside_(std::move(inside))
{
    require(dim_ >= 1, ErrorKind::invalid_argument, "dimension must be positive");
}

RandersStructure RandersStructure::euclidean(int dim)
{
    RandersStructure s = minkowski(Mat::Identity(dim, dim), Vec::Zero(dim));
    s.kind_ = "euclidean";
    return s;
}

RandersStructure RandersStructure::minkowski(Mat h, Vec beta)
{
    const int n = static_cast<int>(h.rows());
    require(h.cols() == n && beta.size() == n, ErrorKind::invalid_argument,
            "h must be square with the same dimension as beta");
    RandersStructure s(
        n, "minkowski_randers", true, [h](const Vec&) { return h; },
        [beta](const Vec&) { return beta; }, {});
    s.at(Vec::Zero(n)); // validate once; the data are constant
    return s;
}

RandersStructure RandersStructure::minkowski_randers(const Vec& b)
{
    return minkowski(Mat::Identity(b.size(), b.size()), b);
}

RandersStructure RandersStructure::poincare_disc()
{
    // h = 16/(4-r^2)^2 (dr^2 + r^2 dtheta^2) is conformal to the Euclidean
    // metric, and beta = 16 r/(16 - r^4) dr = 16/(16 - r^4) (x dx + y dy).
    auto h = [](const Vec& x) -> Mat {
        const double r2 = x.squaredNorm();
        const double conf = 16.0 / ((4.0 - r2) * (4.0 - r2));
        return conf * Mat::Identity(2, 2);
    };
    auto beta = [](const Vec& x) -> Vec {
        const double r2 = x.squaredNorm();
        return (16.0 / (16.0 - r2 * r2)) * x;
    };
    auto inside = [](const Vec& x) { return x.squaredNorm() < 4.0; };
    return RandersStructure(2, "poincare_disc", false, h, beta, inside);
}

RandersStructure RandersStructure::custom(int dim, MetricField h, FormField beta,
                                          DomainPredicate inside)
{
    require(static_cast<bool>(h) && static_cast<bool>(beta), ErrorKind::invalid_argument,
            "custom structure needs both h and beta fields");
    return RandersStructure(dim, "custom", false, std::move(h), std::move(beta), std::move(inside));
}

RandersStructure RandersStructure::from_json(const nlohmann::json& d)
{
    require(d.is_object(), ErrorKind::invalid_argument, "structure descriptor must be an object");
    for (const auto& [key, value] : d.items()) {
        require(key == "dim" || key == "kind" || key == "b" || key == "h", ErrorKind::invalid_argument,
                "unknown key '" + key + "' in structure descriptor");
    }
    require(d.contains("kind") && d["kind"].is_string(), ErrorKind::invalid_argument,
            "descriptor needs a string 'kind'");
    const std::string kind = d["kind"].get<std::string>();
    int dim = 0;
    if (d.contains("dim")) {
        require(d["dim"].is_number_integer() && d["dim"].get<int>() > 0, ErrorKind::invalid_argument,
                "'dim' must be a positive integer");
        dim = d["dim"].get<int>();
    }

    auto read_vec = [&](const nlohmann::json& j) {
        require(j.is_array(), ErrorKind::invalid_argument, "'b' must be an array");
        Vec v(static_cast<Eigen::Index>(j.size()));
        for (std::size_t i = 0; i < j.size(); ++i) {
            require(j[i].is_number(), ErrorKind::invalid_argument, "'b' entries must be numbers");
            v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
        }
        return v;
    };

    if (kind == "euclidean") {
        require(dim > 0, ErrorKind::invalid_argument, "euclidean descriptor needs 'dim'");
        return euclidean(dim);
    }
    if (kind == "poincare_disc") {
        require(dim == 0 || dim == 2, ErrorKind::invalid_argument, "poincare_disc is two-dimensional");
        return poincare_disc();
    }
    if (kind == "minkowski_randers") {
        require(d.contains("b"), ErrorKind::invalid_argument, "minkowski_randers descriptor needs 'b'");
        Vec b = read_vec(d["b"]);
        if (dim == 0) {
            dim = static_cast<int>(b.size());
        }
        require_dim(b, dim, "b");
        Mat h = Mat::Identity(dim, dim);
        if (d.contains("h")) {
            const auto& jh = d["h"];
            require(jh.is_array() && static_cast<int>(jh.size()) == dim, ErrorKind::invalid_argument,
                    "'h' must be a dim x dim array");
            for (int i = 0; i < dim; ++i) {
                const Vec row = read_vec(jh[static_cast<std::size_t>(i)]);
                require_dim(row, dim, "h row");
                h.row(i) = row.transpose();
            }
        }
        return minkowski(h, b);
    }
    if (kind == "custom") {
        fail(ErrorKind::invalid_argument, "custom structures are constructed programmatically only");
    }
    fail(ErrorKind::invalid_argument, "unknown structure kind '" + kind + "'");
}

RandersLocal RandersStructure::at(const Vec& x) const
{
    require_dim(x, dim_, "base point");
    require_finite(x, "base point");
    if (inside_) {
        require(inside_(x), ErrorKind::domain_error, "base point outside the structure's domain");
    }
    RandersLocal local;
    local.h = h_(x);
    local.beta = beta_(x);
    require(local.h.rows() == dim_ && local.h.cols() == dim_ && local.beta.size() == dim_,
            ErrorKind::invalid_structure, "field dimensions do not match the structure");
    require(local.h.allFinite() && local.beta.allFinite(), ErrorKind::invalid_structure,
            "non-finite metric data");
    const double scale = local.h.cwiseAbs().maxCoeff();
    require((local.h - local.h.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(scale, 1.0),
            ErrorKind::invalid_structure, "h is not symmetric");
    Eigen::LLT<Mat> llt(local.h);
    require(llt.info() == Eigen::Success, ErrorKind::invalid_structure, "h is not positive definite");
    local.h_inv = llt.solve(Mat::Identity(dim_, dim_));
    local.sqrt_det_h = llt.matrixL().toDenseMatrix().diagonal().prod();
    local.beta_norm = std::sqrt(std::max(0.0, local.beta.dot(local.h_inv * local.beta)));
    require(local.beta_norm < 1.0, ErrorKind::invalid_structure,
            "||beta||_h = " + std::to_string(local.beta_norm) + " is not below 1");
    return local;
}

double eval_F(const RandersStructure& s, const Vec& x, const Vec& y)
{
    require_finite(y, "vector");
    const RandersLocal l = s.at(x);
    require_dim(y, s.dim(), "vector");
    return std::sqrt(std::max(0.0, y.dot(l.h * y))) + l.beta.dot(y);
}

double eval_F(const RandersStructure& s, const VectorAt& v)
{
    return eval_F(s, v.base, v.comp);
}

double eval_F_dual(const RandersLocal& l, const Vec& alpha)
{
    const Vec ha = l.h_inv * alpha;
    const double aa = std::max(0.0, alpha.dot(ha));
    if (aa == 0.0) {
        return 0.0;
    }
    const double ab = ha.dot(l.beta);
    const double one_minus = 1.0 - l.beta_norm * l.beta_norm;
    const double root = std::sqrt(ab * ab + one_minus * aa);
    // The two algebraically equal forms avoid cancellation on either sign of ab.
    if (ab > 0.0) {
        return aa / (root + ab);
    }
    return (root - ab) / one_minus;
}

double eval_F_dual(const RandersStructure& s, const Vec& x, const Vec& alpha)
{
    require_finite(alpha, "covector");
    const RandersLocal l = s.at(x);
    require_dim(alpha, s.dim(), "covector");
    return eval_F_dual(l, alpha);
}

double eval_F_dual(const RandersStructure& s, const CovectorAt& a)
{
    return eval_F_dual(s, a.base, a.comp);
}

double eval_F_sym(const RandersStructure& s, const Vec& x, const Vec& y)
{
    require_finite(y, "vector");
    const RandersLocal l = s.at(x);
    require_dim(y, s.dim(), "vector");
    const double by = l.beta.dot(y);
    return std::sqrt(std::max(0.0, y.dot(l.h * y) + by * by));
}

double eval_F_sym_dual(const RandersStructure& s, const Vec& x, const Vec& alpha)
{
    require_finite(alpha, "covector");
    const RandersLocal l = s.at(x);
    require_dim(alpha, s.dim(), "covector");
    const Vec ha = l.h_inv * alpha;
    const double ab = ha.dot(l.beta);
    return std::sqrt(std::max(0.0, alpha.dot(ha) - ab * ab / (1.0 + l.beta_norm * l.beta_norm)));
}

NormFn norm_fn(const RandersStructure& s)
{
    return [s](const Vec& x, const Vec& y) { return eval_F(s, x, y); };
}

NormFn sym_norm_fn(const RandersStructure& s)
{
    return [s](const Vec& x, const Vec& y) { return eval_F_sym(s, x, y); };
}

NormFn dual_norm_fn(const RandersStructure& s)
{
    return [s](const Vec& x, const Vec& a) { return eval_F_dual(s, x, a); };
}

double polar_transform_numeric(const NormFn& F, const Vec& x, const Vec& alpha, int samples)
{
    require(samples >= 64, ErrorKind::invalid_argument, "polar transform needs at least 64 samples");
    require_finite(alpha, "covector");
    const int dim = static_cast<int>(alpha.size());
    auto ratio = [&](const Vec& e) {
        const double f = F(x, e);
        require(f > 0.0 && std::isfinite(f), ErrorKind::degenerate_norm,
                "norm evaluator is not positive on a unit direction");
        return alpha.dot(e) / f;
    };
    if (alpha.isZero(0.0)) {
        return 0.0;
    }
    const int seeds = dim == 3 ? std::max(samples, 2048) : samples;
    return std::max(0.0, sphere_max(ratio, dim, seeds));
}

double reversibility(const RandersStructure& s, const Vec& x)
{
    const double b = s.at(x).beta_norm;
    return (1.0 + b) / (1.0 - b);
}

double uniformity(const RandersStructure& s, const Vec& x)
{
    const double b = s.at(x).beta_norm;
    const double q = (1.0 - b) / (1.0 + b);
    return q * q;
}

MetricConstants metric_constants(const RandersStructure& s, const Vec& x)
{
    MetricConstants c;
    c.r_F = reversibility(s, x);
    c.l_F = uniformity(s, x);
    const double n = s.dim();
    c.mu_bar = (n - 2.0) * (n - 2.0) / 4.0;
    c.mu_max = c.l_F * c.mu_bar / (c.r_F * c.r_F);
    return c;
}

double reversibility_numeric(const NormFn& F, const Vec& x, int samples)
{
    const int dim = static_cast<int>(x.size());
    auto ratio = [&](const Vec& e) {
        const double back = F(x, -e);
        require(back > 0.0, ErrorKind::degenerate_norm, "norm vanishes on a nonzero direction");
        return F(x, e) / back;
    };
    return sphere_max(ratio, dim, samples);
}

Mat fundamental_tensor(const RandersStructure& s, const Vec& x, const Vec& v)
{
    const RandersLocal l = s.at(x);
    require_dim(v, s.dim(), "vector");
    const Vec hv = l.h * v;
    const double a = std::sqrt(v.dot(hv));
    require(a > 0.0, ErrorKind::undefined_direction, "fundamental tensor needs v != 0");
    const Vec ell = hv / a;
    const double F = a + l.beta.dot(v);
    const Vec lb = ell + l.beta;
    return (F / a) * (l.h - ell * ell.transpose()) + lb * lb.transpose();
}

double uniformity_numeric(const RandersStructure& s, const Vec& x, int samples)
{
    const int dim = s.dim();
    require(dim == 2 || dim == 3, ErrorKind::invalid_argument,
            "numeric uniformity supports dimension 2 or 3 only");
    const RandersLocal l = s.at(x);
    auto g = [&](const Vec& v, const Vec& y) {
        const Vec hv = l.h * v;
        const double a = std::sqrt(v.dot(hv));
        const double F = a + l.beta.dot(v);
        const double ly = hv.dot(y) / a;
        const double by = l.beta.dot(y);
        return (F / a) * (y.dot(l.h * y) - ly * ly) + (ly + by) * (ly + by);
    };
    // For fixed y the ratio is min_v g_v(y,y) / max_w g_w(y,y).
    auto ratio_for = [&](const Vec& y, int inner) {
        const double hi = sphere_max([&](const Vec& v) { return g(v, y); }, dim, inner);
        const double lo = -sphere_max([&](const Vec& v) { return -g(v, y); }, dim, inner);
        return lo / hi;
    };
    return -sphere_max([&](const Vec& y) { return -ratio_for(y, samples); }, dim, samples);
}

Vec legendre(const RandersStructure& s, const Vec& x, const Vec& alpha)
{
    require_finite(alpha, "covector");
    require(!alpha.isZero(0.0), ErrorKind::undefined_direction, "Legendre transform of the zero covector");
    const RandersLocal l = s.at(x);
    require_dim(alpha, s.dim(), "covector");
    const Vec ha = l.h_inv * alpha;
    const Vec hb = l.h_inv * l.beta;
    const double aa = alpha.dot(ha);
    const double ab = alpha.dot(hb);
    const double one_minus = 1.0 - l.beta_norm * l.beta_norm;
    const double root = std::sqrt(ab * ab + one_minus * aa);
    const double Fd = eval_F_dual(l, alpha);
    const Vec grad = ((ab * hb + one_minus * ha) / root - hb) / one_minus;
    return Fd * grad;
}

VectorAt legendre(const RandersStructure& s, const CovectorAt& a)
{
    return {a.base, legendre(s, a.base, a.comp)};
}

Vec legendre_numeric(const NormFn& F_dual, const Vec& x, const Vec& alpha, double fd_step)
{
    require_finite(alpha, "covector");
    const double scale = alpha.norm();
    require(scale > 0.0, ErrorKind::undefined_direction, "Legendre transform of the zero covector");
    const double step = fd_step * scale;
    Vec out(alpha.size());
    Vec probe = alpha;
    for (Eigen::Index i = 0; i < alpha.size(); ++i) {
        probe(i) = alpha(i) + step;
        const double up = F_dual(x, probe);
        probe(i) = alpha(i) - step;
        const double down = F_dual(x, probe);
        probe(i) = alpha(i);
        out(i) = 0.5 * (up * up - down * down) / (2.0 * step);
    }
    return out;
}

double unit_ball_volume_numeric(const NormFn& F, const Vec& x, int dim)
{
    auto radius = [&](const Vec& e) {
        const double f = F(x, e);
        require(f > 0.0 && std::isfinite(f), ErrorKind::degenerate_norm,
                "norm evaluator is not positive on a unit direction");
        return 1.0 / f;
    };
    if (dim == 2) {
        // Periodic smooth integrand: the trapezoid rule converges geometrically.
        auto trapezoid = [&](int m) {
            double sum = 0.0;
            for (int k = 0; k < m; ++k) {
                const double R = radius(unit2(2.0 * std::numbers::pi * k / m));
                sum += 0.5 * R * R;
            }
            return sum * 2.0 * std::numbers::pi / m;
        };
        int m = 64;
        double prev = trapezoid(m);
        for (; m <= (1 << 20); m *= 2) {
            const double next = trapezoid(2 * m);
            if (std::abs(next - prev) <= 1e-14 * std::abs(next)) {
                return next;
            }
            prev = next;
        }
        fail(ErrorKind::accuracy_failure, "unit-ball area quadrature did not converge");
    }
    if (dim == 3) {
        auto ring = [&](double theta, int m) {
            // Gauss-Legendre panels in the polar angle.
            double acc = 0.0;
            const double w = std::numbers::pi / m;
            for (int p = 0; p < m; ++p) {
                acc += boost::math::quadrature::gauss<double, 20>::integrate(
                    [&](double phi) {
                        Vec e(3);
                        e << std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta),
                            std::cos(phi);
                        const double R = radius(e);
                        return R * R * R / 3.0 * std::sin(phi);
                    },
                    p * w, (p + 1) * w);
            }
            return acc;
        };
        auto product = [&](int m) {
            double sum = 0.0;
            for (int k = 0; k < m; ++k) {
                sum += ring(2.0 * std::numbers::pi * k / m, std::max(4, m / 16));
            }
            return sum * 2.0 * std::numbers::pi / m;
        };
        int m = 32;
        double prev = product(m);
        for (; m <= 4096; m *= 2) {
            const double next = product(2 * m);
            if (std::abs(next - prev) <= 1e-12 * std::abs(next)) {
                return next;
            }
            prev = next;
        }
        fail(ErrorKind::accuracy_failure, "unit-ball volume quadrature did not converge");
    }
    fail(ErrorKind::invalid_argument, "unit-ball quadrature supports dimension 2 or 3 only");
}

double unit_ball_volume(int n)
{
    return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double hausdorff_density(const RandersStructure& s, const Vec& x)
{
    const RandersLocal l = s.at(x);
    const double one_minus = 1.0 - l.beta_norm * l.beta_norm;
    return std::pow(one_minus, 0.5 * (s.dim() + 1)) * l.sqrt_det_h;
}

double hausdorff_density_numeric(const RandersStructure& s, const Vec& x)
{
    const int n = s.dim();
    return unit_ball_volume(n) / unit_ball_volume_numeric(norm_fn(s), x, n);
}

} // namespace finpoisson
