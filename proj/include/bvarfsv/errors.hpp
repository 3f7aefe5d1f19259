#pragma once

#include <stdexcept>
#include <string>

namespace bvarfsv {

// bad user input: config files, CLI flags, malformed panels
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// bad data content: missing values, zero variance, nonpositive under log transforms
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// numerical breakdown: failed factorizations, non-finite state
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace bvarfsv
