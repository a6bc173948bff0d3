#pragma once

#include <stdexcept>
#include <string>

namespace shingledate {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent caller input: manifests, configs, queries for
// unknown ids, contract violations on supplied data. The CLI maps this to
// exit code 2.
struct InvalidInput : Error {
    using Error::Error;
};

// An iterative fit ran out of iterations before reaching tolerance.
// Carries the last iterate so callers can still inspect it.
struct ConvergenceError : Error {
    ConvergenceError(const std::string& msg, double last)
        : Error(msg), last_estimate(last) {}

    double last_estimate;
};

}  // namespace shingledate
