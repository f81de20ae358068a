#pragma once

#include <stdexcept>
#include <string>

namespace force {

// Thrown when an iterative routine produces a non-finite value or otherwise
// loses numerical validity. Structural misuse (shape mismatches, bad
// parameters) throws std::invalid_argument instead.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace force
