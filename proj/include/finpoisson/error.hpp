#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace finpoisson {

enum class ErrorKind {
    invalid_argument,
    invalid_structure,
    degenerate_norm,
    undefined_direction,
    domain_error,
    accuracy_failure,
    pole_error,
    unsupported_case,
    degenerate_bvp,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::invalid_structure: return "invalid-structure";
    case ErrorKind::degenerate_norm: return "degenerate-norm";
    case ErrorKind::undefined_direction: return "undefined-direction";
    case ErrorKind::domain_error: return "domain-error";
    case ErrorKind::accuracy_failure: return "accuracy-failure";
    case ErrorKind::pole_error: return "pole-error";
    case ErrorKind::unsupported_case: return "unsupported-case";
    case ErrorKind::degenerate_bvp: return "degenerate-bvp";
    }
    return "unknown";
}

/// Every failure raised by the library carries one of the ErrorKind tags so
/// callers (the CLI in particular) can map it onto an exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what)
        , kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what)
{
    throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what)
{
    if (!cond) {
        fail(kind, what);
    }
}

} // namespace finpoisson
