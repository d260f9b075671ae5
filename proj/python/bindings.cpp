#include "finpoisson/checks.hpp"
#include "finpoisson/model_spaces.hpp"
#include "finpoisson/poisson_fd.hpp"
#include "finpoisson/radial_ode.hpp"
#include "finpoisson/randers.hpp"
#include "finpoisson/report.hpp"
#include "finpoisson/special_functions.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace finpoisson;

namespace {

bool is_numerical(ErrorKind k)
{
    return k == ErrorKind::accuracy_failure || k == ErrorKind::degenerate_bvp || k == ErrorKind::degenerate_norm;
}

py::array_t<double> as_array(const std::vector<double>& v)
{
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::dict solve_radial(int n, double mu, double c, double rho, int grid, double eps, double rk_tol, double source,
                      std::vector<double> radii)
{
    ode::OdeParams p;
    p.sigma = special::SigmaParams{n, mu, c, rho};
    p.grid_n = grid;
    p.eps = eps;
    p.rk_tol = rk_tol;
    p.source = source;
    p.radii = std::move(radii);
    p.sigma.validate();
    p.validate();
    ode::RadialSolution sol;
    std::vector<double> res;
    {
        py::gil_scoped_release nogil;
        sol = ode::solve_Q(p);
        res = ode::residual_profile(sol, p);
    }
    py::dict d;
    d["r"] = as_array(sol.r);
    d["f"] = as_array(sol.f);
    d["fprime"] = as_array(sol.fp);
    d["residual"] = as_array(res);
    d["alpha_plus"] = sol.alpha_plus;
    d["a_hom"] = sol.a_hom;
    d["eps"] = sol.eps;
    d["energy"] = ode::energy_integral(sol, n);
    return d;
}

py::dict solve_pde(const std::string& ball, const Eigen::Vector2d& b, double rho, int N,
                   const Eigen::Vector2d& center)
{
    pde::GridProblem p;
    p.norm = RandersStructure::minkowski_randers(b);
    p.center = center;
    p.rho = rho;
    p.ball_kind = pde::parse_ball_kind(ball);
    p.N = N;
    p.validate();
    pde::Grid g;
    pde::SolveResult r;
    {
        py::gil_scoped_release nogil;
        g = pde::build_domain(p);
        r = pde::solve(p, g);
    }
    py::array_t<double> u({g.N, g.N});
    py::array_t<bool> mask({g.N, g.N});
    auto uu = u.mutable_unchecked<2>();
    auto mm = mask.mutable_unchecked<2>();
    for (int j = 0; j < g.N; ++j) {
        for (int i = 0; i < g.N; ++i) {
            uu(j, i) = r.u.u[g.index(i, j)];
            mm(j, i) = g.interior[g.index(i, j)] != 0;
        }
    }
    py::dict d;
    d["u"] = u;
    d["interior"] = mask;
    d["h"] = g.h;
    auto x = py::array_t<double>(g.N);
    auto xs = x.mutable_unchecked<1>();
    for (int i = 0; i < g.N; ++i) {
        xs(i) = g.x(i);
    }
    d["x"] = x;
    auto y = py::array_t<double>(g.N);
    auto ys = y.mutable_unchecked<1>();
    for (int j = 0; j < g.N; ++j) {
        ys(j) = g.y(j);
    }
    d["y"] = y;
    d["summary"] = pde::summary_json(p, g, r).dump();
    d["csv"] = pde::to_csv(p, g, r.u);
    return d;
}

std::string verify(const std::string& suite, std::uint64_t seed, int samples, double tol_scale, int threads)
{
    checks::SuiteOptions opts;
    opts.seed = seed;
    opts.samples = samples;
    std::vector<report::CheckReport> all;
    {
        py::gil_scoped_release nogil;
        all = suite == "all" ? checks::verify_all(opts, threads) : checks::run_suite(suite, opts);
    }
    if (tol_scale != 1.0) {
        report::scale_tolerances(all, tol_scale);
    }
    return report::report_json(all).dump();
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Randers metrics, radial profiles, grid solver and verification suites";

    static py::exception<Error> input_error(m, "InputError", PyExc_ValueError);
    static py::exception<Error> numerical_error(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const Error& e) {
            if (is_numerical(e.kind())) {
                numerical_error(e.what());
            } else {
                input_error(e.what());
            }
        }
    });

    py::class_<MetricConstants>(m, "MetricConstants")
        .def_readonly("r_F", &MetricConstants::r_F)
        .def_readonly("l_F", &MetricConstants::l_F)
        .def_readonly("mu_bar", &MetricConstants::mu_bar)
        .def_readonly("mu_max", &MetricConstants::mu_max);

    py::class_<RandersStructure>(m, "RandersStructure")
        .def_static("euclidean", &RandersStructure::euclidean, py::arg("dim"))
        .def_static("minkowski_randers", &RandersStructure::minkowski_randers, py::arg("b"))
        .def_static("minkowski", &RandersStructure::minkowski, py::arg("h"), py::arg("beta"))
        .def_static("poincare_disc", &RandersStructure::poincare_disc)
        .def_property_readonly("dim", &RandersStructure::dim)
        .def_property_readonly("kind", &RandersStructure::kind)
        .def("F", py::overload_cast<const RandersStructure&, const Vec&, const Vec&>(&eval_F), py::arg("x"),
             py::arg("y"))
        .def("F_dual", py::overload_cast<const RandersStructure&, const Vec&, const Vec&>(&eval_F_dual),
             py::arg("x"), py::arg("alpha"))
        .def("F_sym", &eval_F_sym, py::arg("x"), py::arg("y"))
        .def("F_sym_dual", &eval_F_sym_dual, py::arg("x"), py::arg("alpha"))
        .def("legendre", py::overload_cast<const RandersStructure&, const Vec&, const Vec&>(&legendre),
             py::arg("x"), py::arg("alpha"))
        .def("constants", &metric_constants, py::arg("x"))
        .def("hausdorff_density", &hausdorff_density, py::arg("x"));

    m.def("sigma_closed",
          [](int n, double mu, double c, double rho, double r) {
              const special::SigmaParams p{n, mu, c, rho};
              p.validate();
              return special::sigma_closed(p, r);
          },
          py::arg("n"), py::arg("mu"), py::arg("c"), py::arg("rho"), py::arg("r"));
    m.def("solve_radial", &solve_radial, py::arg("n"), py::arg("mu"), py::arg("c"), py::arg("rho"),
          py::arg("grid") = 4096, py::arg("eps") = 0.0, py::arg("rk_tol") = 1e-12, py::arg("source") = 1.0,
          py::arg("radii") = std::vector<double>{});
    m.def("solve_pde", &solve_pde, py::arg("ball") = "forward", py::arg("b") = Eigen::Vector2d::Zero(),
          py::arg("rho") = 1.0, py::arg("N") = 161, py::arg("center") = Eigen::Vector2d::Zero());
    m.def("w_c", &model::w_c, py::arg("c"), py::arg("n"), py::arg("r"));
    m.def("V_cn", &model::V_cn, py::arg("c"), py::arg("n"), py::arg("rho"));
    m.def("suite_names", &checks::suite_names);
    m.def("verify_json", &verify, py::arg("suite") = "all", py::arg("seed") = checks::SuiteOptions{}.seed,
          py::arg("samples") = 1000, py::arg("tol_scale") = 1.0, py::arg("threads") = 1);
}
