#pragma once

#include <stdexcept>
#include <string>

namespace codedbatch {

// Thrown when an iterative solver or integrator cannot reach its tolerance
// (as opposed to invalid_argument, which covers bad inputs).
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace codedbatch
