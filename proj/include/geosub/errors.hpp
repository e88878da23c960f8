#pragma once

#include <stdexcept>
#include <string>

namespace geosub {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid input data or violated construction invariant (bad mask sums,
// non-unit sphere coordinates, mismatched manifold kinds, ...).
struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error(what) {}
};

// Runtime numeric or domain failure (geodesic leaving the admissible chart,
// eigensolver non-convergence, root finder stagnation, ...).
struct NumericError : Error {
    explicit NumericError(const std::string& what) : Error(what) {}
};

}  // namespace geosub
