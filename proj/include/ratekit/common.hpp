#pragma once

#include <stdexcept>
#include <string>

namespace ratekit {

// Error categories; the CLI maps these onto process exit codes
// (config -> 2, data -> 3, numeric -> 4).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Misuse of an object's lifecycle (e.g. backward without a train-mode forward).
struct StateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace ratekit
