#pragma once

#include <stdexcept>
#include <string>

namespace thetaforge {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Requested truncation window cannot hold the term (order <= exponent).
struct truncation_error : error {
    using error::error;
};

// Comparison requested beyond the truncation order of an operand.
struct precision_error : error {
    using error::error;
};

// Series is not a unit times a power of q (lowest coefficient not +-1).
struct not_invertible_error : error {
    using error::error;
};

// A coefficient sits on an exponent not divisible by the requested stride.
struct misaligned_error : error {
    using error::error;
};

// Theta sum or lattice sum does not converge as a formal series.
struct divergence_error : error {
    using error::error;
};

// Quadratic part is not diagonal where a diagonal form is required.
struct not_diagonal_error : error {
    using error::error;
};

// Coset system is not an exact cover, or matrix is singular.
struct ecs_error : error {
    using error::error;
};

struct parse_error : error {
    parse_error(const std::string& what, std::size_t pos)
        : error(what + " (at position " + std::to_string(pos) + ")"), position(pos) {}
    std::size_t position;
};

// Malformed data file / CLI argument text.
struct format_error : error {
    using error::error;
};

} // namespace thetaforge
