#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace cdii {

using Vec2 = std::array<double, 2>;

/// Bad or inconsistent user input (config files, CLI arguments, schemas).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure: degenerate PDE, solver non-convergence, non-finite
/// values reaching the tape or the optimizer.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem/serialization failure, always carries the offending path.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace cdii
