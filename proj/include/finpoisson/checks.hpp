#pragma once

// Verification suites. Each returns a list of CheckReport records with ids
// namespaced by suite ("poincare.I_plus", "hardy.n3.intercept", ...).

#include "finpoisson/randers.hpp"
#include "finpoisson/report.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace finpoisson::checks {

using report::CheckReport;

struct SuiteOptions {
    std::uint64_t seed = 20240607;
    /// Random samples per structure in the sampled suites.
    int samples = 1000;
};

/// Integrals of u = -exp(-d_F(0, x) / 4) on the Finsler-Poincare disc.
std::vector<CheckReport> poincare_sharpness_suite();

struct HardyConfig {
    int n = 3;
    double r_cut = 0.5;
    double R_cut = 1.0;
    std::vector<double> eps;
};

/// Rayleigh quotients of the cut-off family max(eps, |x|)^{-(n-2)/2} on R^n
/// and the fit quotient = gamma^2 + C / log(r_cut / eps).
std::vector<CheckReport> hardy_quotient_suite(const HardyConfig& cfg);
/// n = 3 and n = 4 with the default eps ladder.
std::vector<CheckReport> hardy_quotient_suite();

struct NamedStructure {
    std::string name;
    RandersStructure structure;
};

/// Pointwise dual sandwich between F*, F_s* at random base points and
/// covectors, plus the disc-model norm comparison.
std::vector<CheckReport> norm_equivalence_suite(const std::vector<NamedStructure>& structures,
                                                const SuiteOptions& opts);
std::vector<CheckReport> norm_equivalence_suite(const SuiteOptions& opts = {});

std::vector<CheckReport> volume_identity_suite();

/// Curvature / radius ordering of sigma and the identity sigma_{0,rho,c} = w_c(rho) - w_c(r).
std::vector<CheckReport> sandwich_and_wc_suite();

/// Randers invariants: l_F r_F^2 = 1, dual sandwich, Legendre identities,
/// closed-form dual vs numeric supremum, homogeneity, triangle inequality.
std::vector<CheckReport> metric_invariant_suite(const SuiteOptions& opts = {});

/// Radial solver invariants and agreement with the c = 0 and c < 0, mu = 0
/// closed forms.
std::vector<CheckReport> radial_ode_invariant_suite();

/// c = -1, n = 3 Bessel/3F4 form against the radial solver, with a
/// grid/tolerance convergence study of the solver itself.
std::vector<CheckReport> bessel_form_study();

/// Suite names accepted by run_suite, in execution order.
const std::vector<std::string>& suite_names();
/// Throws invalid_argument for an unknown name.
std::vector<CheckReport> run_suite(const std::string& name, const SuiteOptions& opts = {});
/// Every suite, run on up to `threads` worker threads; merged by id.
std::vector<CheckReport> verify_all(const SuiteOptions& opts = {}, int threads = 1);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares y = slope * x + intercept.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

/// Reference closed-form expression for ||u||^2_{F_s} on the disc.
double fs_norm_closed_form();

} // namespace finpoisson::checks
