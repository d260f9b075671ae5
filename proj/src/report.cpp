#include "finpoisson/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace finpoisson::report {

std::string to_string(Provenance p)
{
    switch (p) {
    case Provenance::paper:
        return "PAPER";
    case Provenance::trivial:
        return "TRIVIAL";
    case Provenance::derived:
        return "DERIVED";
    }
    return "DERIVED";
}

CheckReport value_check(std::string id, double expected, Provenance prov, double computed, double tol,
                        std::string notes)
{
    CheckReport c;
    c.id = std::move(id);
    c.expected = expected;
    c.provenance = prov;
    c.computed = computed;
    c.tol = tol;
    c.pass = std::isfinite(computed) && std::abs(computed - expected) <= tol;
    c.notes = std::move(notes);
    return c;
}

CheckReport property_check(std::string id, Provenance prov, bool ok, std::string notes)
{
    CheckReport c;
    c.id = std::move(id);
    c.expected = 1.0;
    c.provenance = prov;
    c.computed = ok ? 1.0 : 0.0;
    c.tol = 0.0;
    c.pass = ok;
    c.notes = std::move(notes);
    return c;
}

CheckReport divergence_check(std::string id, Provenance prov, double statistic, double threshold,
                             std::string notes)
{
    CheckReport c;
    c.id = std::move(id);
    c.divergent = true;
    c.expected = threshold;
    c.provenance = prov;
    c.computed = statistic;
    c.tol = 0.0;
    c.pass = std::isfinite(statistic) && statistic > threshold;
    c.notes = std::move(notes);
    return c;
}

std::string format_double(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

Json number(double v)
{
    if (std::isfinite(v)) {
        return v;
    }
    return format_double(v);
}

} // namespace

Json to_json(const CheckReport& c)
{
    Json j;
    j["id"] = c.id;
    if (c.divergent) {
        j["expected"] = "divergent";
    } else {
        j["expected"] = number(c.expected);
    }
    j["expected_provenance"] = to_string(c.provenance);
    j["computed"] = number(c.computed);
    j["tol"] = number(c.tol);
    j["pass"] = c.pass;
    j["notes"] = c.notes;
    return j;
}

Json report_json(std::vector<CheckReport> checks)
{
    std::stable_sort(checks.begin(), checks.end(),
                     [](const CheckReport& a, const CheckReport& b) { return a.id < b.id; });
    Json out;
    out["schema"] = "1";
    Json arr = Json::array();
    int failed = 0;
    int failed_paper = 0;
    Json failed_ids = Json::array();
    for (const auto& c : checks) {
        arr.push_back(to_json(c));
        if (!c.pass) {
            ++failed;
            failed_ids.push_back(c.id);
            if (c.provenance == Provenance::paper) {
                ++failed_paper;
            }
        }
    }
    out["checks"] = std::move(arr);
    Json summary;
    summary["total"] = checks.size();
    summary["failed"] = failed;
    summary["failed_paper"] = failed_paper;
    summary["failed_ids"] = std::move(failed_ids);
    summary["pass"] = failed == 0;
    out["summary"] = std::move(summary);
    return out;
}

bool all_pass(const std::vector<CheckReport>& checks)
{
    return std::all_of(checks.begin(), checks.end(), [](const CheckReport& c) { return c.pass; });
}

void scale_tolerances(std::vector<CheckReport>& checks, double factor)
{
    for (auto& c : checks) {
        if (c.divergent || c.tol == 0.0) {
            continue;
        }
        c.tol *= factor;
        c.pass = std::isfinite(c.computed) && std::abs(c.computed - c.expected) <= c.tol;
    }
}

} // namespace finpoisson::report
