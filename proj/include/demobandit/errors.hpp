#pragma once

#include <stdexcept>
#include <string>

namespace demobandit {

// Invalid configuration or precondition violation (bad dimensions, ranges,
// missing data). CLI maps this to exit code 1.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Numerical failure at runtime (Cholesky breakdown, non-finite loss,
// degenerate posterior). CLI maps this to exit code 2.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input file; message carries "path:line:".
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace demobandit
