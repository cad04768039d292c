#pragma once

#include <stdexcept>
#include <string>

namespace qrcsl {

/// Thrown when an adaptive routine cannot reach its requested tolerance.
/// Carries the best estimate so callers can still report a value alongside
/// the failure (the CLI maps this to exit code 2).
class accuracy_error : public std::runtime_error {
public:
    accuracy_error(const std::string& msg, double best, double err)
        : std::runtime_error(msg), best_estimate(best), error_estimate(err) {}

    double best_estimate;
    double error_estimate;
};

/// Invalid physical or numerical configuration (bad grid, bad parameters,
/// malformed config text).  The CLI maps this to exit code 1.
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace qrcsl
