#pragma once

#include <stdexcept>
#include <string>

namespace hermlab {

// Precondition or parameter-range violation (CLI exit code 2).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct UnsupportedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Requested work exceeds a configured enumeration/memory cap.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Integrand mass lost to a finite domain exceeds tolerance.
struct TruncationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failure that should not happen for valid input.
struct InternalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const std::string& msg)
{
    if (!cond) throw DomainError(msg);
}

} // namespace detail
} // namespace hermlab
