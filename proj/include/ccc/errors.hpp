#pragma once

#include <stdexcept>
#include <string>

namespace ccc {

// ============================================================================
// Error taxonomy
// ============================================================================
//
// Three families, matching the process exit codes of the CLI:
//   - input errors (bad expression text, bad spec file)      -> exit 2
//   - numerical breakdown (domain violation, singular data)  -> exit 3
//   - a check that ran and failed is NOT an exception; it is a verdict.

/// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed expression text. Carries the byte offset into the source string
/// at which the problem was detected (0-based).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " (at offset " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Structurally invalid manifold description: schema violations, dimension
/// mismatches, unknown coordinates, missing required fields.
class SpecError : public Error {
public:
    using Error::Error;
};

/// A function was evaluated outside its domain (ln of a non-positive value,
/// division by zero, fractional power of a non-positive base, ...).
/// Always thrown; evaluation never manufactures NaNs or infinities.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Numerical breakdown in linear algebra: a metric that is singular or so
/// ill-conditioned at a point that derived quantities would be garbage.
class SingularError : public Error {
public:
    using Error::Error;
};

/// The scalar-curvature gradient vanishes (or nearly so) at a point, so the
/// distinguished direction field is undefined there. Pipelines catch this
/// per point and report the point as excluded rather than aborting.
class DegenerateFieldError : public Error {
public:
    using Error::Error;
};

}  // namespace ccc
