#pragma once

#include <stdexcept>
#include <string>

namespace mpgame {

// Base class for everything thrown by this library. The CLI maps subclasses
// to exit codes, so new error kinds should extend one of the classes below
// rather than this one directly.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid mathematical input: negative base to a real power, a point outside
// the map's domain, a degenerate interval, precision below the floor.
struct DomainError : Error {
    using Error::Error;
};

// Root solver called with a target outside [g(lo), g(hi)].
struct BracketError : DomainError {
    using DomainError::DomainError;
};

// A comparison or branch classification could not be resolved even after
// escalating precision to the configured cap.
struct PrecisionError : Error {
    using Error::Error;
};

// A point sits on a branch boundary at working resolution; callers retry at
// higher precision or treat the query as a tie.
struct BranchBoundaryError : PrecisionError {
    using PrecisionError::PrecisionError;
};

// Configured budget exceeded (tree-descent depth, cylinder count, iteration
// caps). Distinct from PrecisionError: raising precision will not help.
struct ResourceError : Error {
    using Error::Error;
};

// A move rejected by the referee. `offender` names the player whose move
// broke a rule, `round` is the 1-based round of the offending move.
struct RuleViolation : Error {
    std::string offender;
    int round;
    RuleViolation(const std::string& msg, std::string who, int r)
        : Error(msg), offender(std::move(who)), round(r) {}
};

// An empirically fitted constant turned out too small mid-run (the lift's
// distortion allowance, for instance). Carries the factor by which the
// caller should enlarge it before replaying.
struct ConstantUnderestimate : Error {
    double suggested_factor;
    ConstantUnderestimate(const std::string& msg, double factor)
        : Error(msg), suggested_factor(factor) {}
};

}  // namespace mpgame
