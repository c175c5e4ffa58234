#pragma once

#include <stdexcept>
#include <string>

namespace lvpp {

// Argument outside the domain of a map (ln of a nonpositive number, lnit at 0, ...).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Iterative method ran out of iterations or produced non-finite values.
struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user configuration: unknown problem, malformed schedule string, ...
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct LinearSolveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace lvpp
