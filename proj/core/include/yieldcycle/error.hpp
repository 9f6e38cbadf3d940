#pragma once

#include <stdexcept>
#include <string>

namespace yieldcycle {

/// Bad or inconsistent input data: malformed files, failed validation,
/// degenerate statistics. The CLI maps this to exit code 1.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace yieldcycle
