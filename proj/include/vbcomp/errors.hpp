#pragma once

#include <stdexcept>
#include <string>

namespace vbcomp {

// Numerical failure (singular matrix, non-convergence, invalid log-det
// argument). CLI maps this to exit code 3, or 4 when only part of a
// candidate set fails.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace vbcomp
