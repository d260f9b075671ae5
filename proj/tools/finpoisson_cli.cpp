// finpoisson: metric evaluation, radial ODE, grid PDE and verification suites.
//
// Exit codes: 0 success / all checks pass, 1 check failures, 2 invalid input,
// 3 numerical failure.

#include "finpoisson/checks.hpp"
#include "finpoisson/model_spaces.hpp"
#include "finpoisson/poisson_fd.hpp"
#include "finpoisson/radial_ode.hpp"
#include "finpoisson/randers.hpp"
#include "finpoisson/report.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace finpoisson;
using report::format_double;
using Json = nlohmann::ordered_json;

namespace {

enum Exit { ok = 0, checks_failed = 1, bad_input = 2, numerical = 3 };

int exit_code(ErrorKind k)
{
    switch (k) {
    case ErrorKind::accuracy_failure:
    case ErrorKind::degenerate_bvp:
    case ErrorKind::degenerate_norm:
        return numerical;
    default:
        return bad_input;
    }
}

struct Common {
    std::string format = "json";
    std::string out;
    std::uint64_t seed = checks::SuiteOptions{}.seed;
    std::string config;
};

void emit(const Common& c, const std::string& text)
{
    if (c.out.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) {
        fail(ErrorKind::invalid_argument, "cannot open output file '" + c.out + "'");
    }
    f << text;
}

std::string dump(const Json& j)
{
    return j.dump(2) + "\n";
}

Json vec_json(const Vec& v)
{
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        a.push_back(v[i]);
    }
    return a;
}

Vec to_vec(const std::vector<double>& v)
{
    return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// The JSON config holds {"option-name": value} for the chosen subcommand and
// overrides anything given on the command line.
void apply_config(CLI::App* sub, const std::string& path)
{
    std::ifstream f(path);
    require(static_cast<bool>(f), ErrorKind::invalid_argument, "cannot read config '" + path + "'");
    nlohmann::json cfg;
    try {
        f >> cfg;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::invalid_argument, "config '" + path + "' is not valid JSON: " + e.what());
    }
    require(cfg.is_object(), ErrorKind::invalid_argument, "config must be a JSON object");
    for (const auto& [key, value] : cfg.items()) {
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        require(opt != nullptr && key != "config" && key != "help", ErrorKind::invalid_argument,
                "unknown config key '" + key + "' for '" + sub->get_name() + "'");
        std::vector<std::string> parts;
        auto text = [](const nlohmann::json& v) {
            if (v.is_string()) {
                return v.get<std::string>();
            }
            if (v.is_number_float()) {
                return format_double(v.get<double>());
            }
            return v.dump();
        };
        if (value.is_array()) {
            for (const auto& v : value) {
                parts.push_back(text(v));
            }
        } else {
            parts.push_back(text(value));
        }
        opt->clear();
        opt->add_result(parts);
        opt->run_callback();
    }
}

int thread_cap()
{
    int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("FINPOISSON_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        require(end != env && *end == '\0' && v >= 1, ErrorKind::invalid_argument,
                "FINPOISSON_THREADS must be a positive integer");
        n = std::min<long>(n, v);
    }
    return n;
}

// ------------------------------------------------------------------ metric

struct MetricArgs {
    std::string kind = "minkowski_randers";
    std::vector<double> b{0.0, 0.0};
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> alpha;
};

int run_metric(const Common& c, const MetricArgs& a)
{
    nlohmann::json desc{{"kind", a.kind}};
    if (a.kind == "minkowski_randers") {
        desc["b"] = a.b;
    } else if (a.kind == "euclidean") {
        desc["dim"] = a.x.empty() ? 2 : static_cast<int>(a.x.size());
    }
    const auto s = RandersStructure::from_json(desc);
    const Vec x = a.x.empty() ? Vec::Zero(s.dim()) : to_vec(a.x);
    const MetricConstants k = metric_constants(s, x);

    std::vector<std::pair<std::string, double>> rows{{"r_F", k.r_F},
                                                     {"l_F", k.l_F},
                                                     {"mu_bar", k.mu_bar},
                                                     {"mu_max", k.mu_max},
                                                     {"hausdorff_density", hausdorff_density(s, x)}};
    Vec J;
    if (!a.y.empty()) {
        const Vec y = to_vec(a.y);
        rows.emplace_back("F", eval_F(s, x, y));
        rows.emplace_back("F_reverse", eval_F(s, x, -y));
        rows.emplace_back("F_sym", eval_F_sym(s, x, y));
    }
    if (!a.alpha.empty()) {
        const Vec al = to_vec(a.alpha);
        rows.emplace_back("F_dual", eval_F_dual(s, x, al));
        rows.emplace_back("F_dual_reverse", eval_F_dual(s, x, -al));
        rows.emplace_back("F_sym_dual", eval_F_sym_dual(s, x, al));
        J = legendre(s, x, al);
        for (Eigen::Index i = 0; i < J.size(); ++i) {
            rows.emplace_back("legendre_" + std::to_string(i), J[i]);
        }
    }
    if (c.format == "csv") {
        std::string out = "quantity,value\n";
        for (const auto& [name, v] : rows) {
            out += name + "," + format_double(v) + "\n";
        }
        emit(c, out);
        return ok;
    }
    Json j;
    j["schema"] = "1";
    j["kind"] = s.kind();
    j["x"] = vec_json(x);
    for (const auto& [name, v] : rows) {
        if (name.rfind("legendre_", 0) != 0) {
            j[name] = v;
        }
    }
    if (J.size() > 0) {
        j["legendre"] = vec_json(J);
    }
    emit(c, dump(j));
    return ok;
}

// --------------------------------------------------------------------- ode

struct OdeArgs {
    int n = 3;
    double mu = 0.0;
    double c = 0.0;
    double rho = 1.0;
    int grid = 4096;
    double eps = 0.0;
    double rk_tol = 1e-12;
    double source = 1.0;
};

int run_ode(const Common& c, const OdeArgs& a)
{
    ode::OdeParams p;
    p.sigma = special::SigmaParams{a.n, a.mu, a.c, a.rho};
    p.grid_n = a.grid;
    p.eps = a.eps;
    p.rk_tol = a.rk_tol;
    p.source = a.source;
    p.sigma.validate();
    p.validate();
    const auto sol = ode::solve_Q(p);
    const auto res = ode::residual_profile(sol, p);
    if (c.format == "csv") {
        std::string out = "r,f,fprime,residual\n";
        for (std::size_t i = 0; i < sol.r.size(); ++i) {
            out += format_double(sol.r[i]) + "," + format_double(sol.f[i]) + "," + format_double(sol.fp[i]) + "," +
                   format_double(res[i]) + "\n";
        }
        emit(c, out);
        return ok;
    }
    Json j;
    j["schema"] = "1";
    j["n"] = a.n;
    j["mu"] = a.mu;
    j["c"] = a.c;
    j["rho"] = a.rho;
    j["eps"] = sol.eps;
    j["grid"] = sol.r.size();
    j["alpha_plus"] = sol.alpha_plus;
    j["a_hom"] = sol.a_hom;
    j["f_at_eps"] = sol.f.front();
    j["energy"] = ode::energy_integral(sol, a.n);
    j["residual_max"] = sol.residual_max;
    j["steps"] = sol.steps;
    emit(c, dump(j));
    return ok;
}

// --------------------------------------------------------------------- pde

struct PdeArgs {
    std::string ball = "forward";
    std::vector<double> b{0.0};
    double rho = 1.0;
    int N = 161;
    std::vector<double> center{0.0, 0.0};
    std::string summary;
};

int run_pde(const Common& c, const PdeArgs& a)
{
    require(a.b.size() == 1 || a.b.size() == 2, ErrorKind::invalid_argument,
            "--b takes a magnitude along x or two components");
    require(a.center.size() == 2, ErrorKind::invalid_argument, "--center takes two components");
    Vec beta(2);
    beta << a.b[0], a.b.size() == 2 ? a.b[1] : 0.0;
    pde::GridProblem p;
    p.norm = RandersStructure::minkowski_randers(beta);
    p.center << a.center[0], a.center[1];
    p.rho = a.rho;
    p.ball_kind = pde::parse_ball_kind(a.ball);
    p.N = a.N;
    p.validate();
    const auto g = pde::build_domain(p);
    const auto r = pde::solve(p, g);

    Json summary = pde::summary_json(p, g, r);
    bool holds = true;
    if (p.ball_kind == pde::BallKind::backward) {
        holds = summary["errors"]["sandwich_holds"].get<bool>();
    }
    if (!a.summary.empty()) {
        Common side = c;
        side.out = a.summary;
        emit(side, dump(summary));
    }
    emit(c, c.format == "csv" ? pde::to_csv(p, g, r.u) : dump(summary));
    return holds ? ok : checks_failed;
}

// ------------------------------------------------------------------ verify

struct VerifyArgs {
    std::string suite = "all";
    double tol_scale = 1.0;
    int samples = 1000;
};

int run_verify(const Common& c, const VerifyArgs& a)
{
    require(a.tol_scale > 0.0, ErrorKind::invalid_argument, "--tol-scale must be positive");
    require(a.samples >= 1, ErrorKind::invalid_argument, "--samples must be positive");
    checks::SuiteOptions opts;
    opts.seed = c.seed;
    opts.samples = a.samples;
    std::vector<report::CheckReport> all =
        a.suite == "all" ? checks::verify_all(opts, thread_cap()) : checks::run_suite(a.suite, opts);
    if (a.tol_scale != 1.0) {
        report::scale_tolerances(all, a.tol_scale);
    }
    const Json rep = report::report_json(all);
    if (c.format == "csv") {
        std::string out = "id,expected,expected_provenance,computed,tol,pass\n";
        for (const auto& j : rep["checks"]) {
            auto cell = [](const Json& v) {
                return v.is_string() ? v.get<std::string>() : format_double(v.get<double>());
            };
            out += j["id"].get<std::string>() + "," + cell(j["expected"]) + "," +
                   j["expected_provenance"].get<std::string>() + "," + cell(j["computed"]) + "," + cell(j["tol"]) +
                   "," + (j["pass"].get<bool>() ? "true" : "false") + "\n";
        }
        emit(c, out);
    } else {
        emit(c, dump(rep));
    }
    const auto& failed = rep["summary"]["failed_ids"];
    if (!failed.empty()) {
        std::cerr << "failed checks:";
        for (const auto& id : failed) {
            std::cerr << " " << id.get<std::string>();
        }
        std::cerr << "\n";
        return checks_failed;
    }
    return ok;
}

// ---------------------------------------------------------------- poincare

int run_poincare(const Common& c, std::vector<double> radii)
{
    if (radii.empty()) {
        for (int i = 1; i <= 19; ++i) {
            radii.push_back(0.1 * i);
        }
    }
    struct Row {
        double r, d_out, d_in, density, rF, dual_plus, dual_minus;
    };
    std::vector<Row> rows;
    for (double r : radii) {
        require(r > 0.0 && r < 2.0, ErrorKind::domain_error, "disc radii must lie in (0, 2)");
        rows.push_back({r, model::poincare_dist_from_origin(r), model::poincare_dist_to_origin(r),
                        model::poincare_density(r), model::poincare_reversibility(r),
                        model::poincare_dual_along_distance(r, +1).via_dual,
                        model::poincare_dual_along_distance(r, -1).via_dual});
    }
    if (c.format == "csv") {
        std::string out = "r,dist_from_origin,dist_to_origin,density,reversibility,dual_plus,dual_minus\n";
        for (const auto& w : rows) {
            out += format_double(w.r) + "," + format_double(w.d_out) + "," + format_double(w.d_in) + "," +
                   format_double(w.density) + "," + format_double(w.rF) + "," + format_double(w.dual_plus) + "," +
                   format_double(w.dual_minus) + "\n";
        }
        emit(c, out);
        return ok;
    }
    Json j;
    j["schema"] = "1";
    Json arr = Json::array();
    for (const auto& w : rows) {
        arr.push_back(Json{{"r", w.r},
                           {"dist_from_origin", w.d_out},
                           {"dist_to_origin", w.d_in},
                           {"density", w.density},
                           {"reversibility", w.rF},
                           {"dual_plus", w.dual_plus},
                           {"dual_minus", w.dual_minus}});
    }
    j["points"] = std::move(arr);
    emit(c, dump(j));
    return ok;
}

void add_common(CLI::App* sub, Common& c)
{
    sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", c.out, "Output file (default: stdout)");
    sub->add_option("--seed", c.seed, "Seed for every random sample");
    sub->add_option("--config", c.config, "JSON file of option values; overrides flags");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Finsler-Poisson toolkit: Randers metrics, radial profiles, grid solver and checks"};
    app.require_subcommand(1);

    Common common;
    MetricArgs ma;
    OdeArgs oa;
    PdeArgs pa;
    VerifyArgs va;
    std::vector<double> radii;

    auto* metric = app.add_subcommand("metric", "Evaluate a Randers structure at a point");
    add_common(metric, common);
    metric->add_option("--kind", ma.kind)->check(CLI::IsMember({"euclidean", "minkowski_randers", "poincare_disc"}));
    metric->add_option("--b", ma.b, "Constant one-form components")->delimiter(',');
    metric->add_option("--x", ma.x, "Base point")->delimiter(',');
    metric->add_option("--y", ma.y, "Tangent vector")->delimiter(',');
    metric->add_option("--alpha", ma.alpha, "Covector")->delimiter(',');

    auto* ode_cmd = app.add_subcommand("ode", "Solve the radial problem on (0, rho]");
    add_common(ode_cmd, common);
    ode_cmd->add_option("--n", oa.n);
    ode_cmd->add_option("--mu", oa.mu);
    ode_cmd->add_option("--c", oa.c);
    ode_cmd->add_option("--rho", oa.rho);
    ode_cmd->add_option("--grid", oa.grid);
    ode_cmd->add_option("--eps", oa.eps, "Startup radius (default 1e-6 rho)");
    ode_cmd->add_option("--rk-tol", oa.rk_tol);
    ode_cmd->add_option("--source", oa.source);

    auto* pde_cmd = app.add_subcommand("pde", "Solve Delta(-u) = 1 on a Minkowski-Randers ball");
    add_common(pde_cmd, common);
    pde_cmd->add_option("--ball", pa.ball)->check(CLI::IsMember({"forward", "backward"}));
    pde_cmd->add_option("--b", pa.b, "Magnitude along x, or two components")->delimiter(',');
    pde_cmd->add_option("--rho", pa.rho);
    pde_cmd->add_option("--N", pa.N);
    pde_cmd->add_option("--center", pa.center)->delimiter(',');
    pde_cmd->add_option("--summary", pa.summary, "Also write the JSON summary here");

    auto* verify = app.add_subcommand("verify", "Run verification suites");
    add_common(verify, common);
    std::vector<std::string> suites = checks::suite_names();
    suites.push_back("all");
    verify->add_option("--suite", va.suite)->check(CLI::IsMember(suites));
    verify->add_option("--tol-scale", va.tol_scale, "Multiply every tolerance");
    verify->add_option("--samples", va.samples, "Random samples per structure");

    auto* poincare = app.add_subcommand("poincare", "Closed-form quantities on the Finsler-Poincare disc");
    add_common(poincare, common);
    poincare->add_option("--r", radii, "Radii in (0, 2)")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : bad_input;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        if (!common.config.empty()) {
            apply_config(sub, common.config);
        }
        if (sub == metric) {
            return run_metric(common, ma);
        }
        if (sub == ode_cmd) {
            return run_ode(common, oa);
        }
        if (sub == pde_cmd) {
            return run_pde(common, pa);
        }
        if (sub == verify) {
            return run_verify(common, va);
        }
        return run_poincare(common, radii);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return bad_input;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return numerical;
    }
}
