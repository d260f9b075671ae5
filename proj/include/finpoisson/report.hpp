#pragma once

// Check records, deterministic number formatting and the JSON report layout.

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace finpoisson::report {

using Json = nlohmann::ordered_json;

enum class Provenance { paper, trivial, derived };
std::string to_string(Provenance p);

struct CheckReport {
    std::string id;
    double expected = 0.0;
    /// When set, `expected` is ignored and the check is a divergence-fit.
    bool divergent = false;
    Provenance provenance = Provenance::derived;
    double computed = 0.0;
    double tol = 0.0;
    bool pass = false;
    std::string notes;
};

/// pass = |computed - expected| <= tol (false for non-finite values).
CheckReport value_check(std::string id, double expected, Provenance prov, double computed, double tol,
                        std::string notes = {});
/// A boolean property: expected 1, computed 1 or 0, pass = ok. `measure`
/// (e.g. a worst-case margin) goes into the notes.
CheckReport property_check(std::string id, Provenance prov, bool ok, std::string notes = {});
/// Divergence reported via a fit criterion; computed carries the fit statistic.
CheckReport divergence_check(std::string id, Provenance prov, double statistic, double threshold,
                             std::string notes = {});

/// Shortest text with 17 significant digits, '.' decimal, locale independent.
std::string format_double(double v);

Json to_json(const CheckReport& c);
/// {"schema": "1", "checks": [...], "summary": {...}}; checks sorted by id.
Json report_json(std::vector<CheckReport> checks);

bool all_pass(const std::vector<CheckReport>& checks);
/// Scales every tolerance (not the divergence thresholds) and recomputes pass.
void scale_tolerances(std::vector<CheckReport>& checks, double factor);

} // namespace finpoisson::report
