#pragma once

#include <stdexcept>
#include <string>

namespace sovrisk {

// User-facing data/config problem (CLI exit code 1).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failure: non-convergence, singular system (CLI exit code 2).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace sovrisk
