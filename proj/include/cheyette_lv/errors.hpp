#pragma once

#include <stdexcept>
#include <string>

namespace cheyette {

/// Classifies library failures. The CLI maps these onto its exit codes.
enum class ErrorKind {
    input,                  // malformed or missing input data
    domain,                 // argument outside the mathematical domain
    below_intrinsic,        // option price at or below intrinsic value
    insufficient_data,      // too few quotes to build an interpolant
    invalid_grid,           // grid violates ordering or positivity
    degenerate_denominator, // butterfly density ratio below the floor
    degenerate_annuity,     // swap annuity non-positive
    inversion,              // swap rate not invertible at a strike
    range_too_small,        // quadrature range misses density mass
    simulation_blowup,      // non-finite Monte Carlo state
    calibration             // calibration did not converge
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

inline void require(bool condition, ErrorKind kind, const char* what) {
    if (!condition)
        throw Error(kind, what);
}

} // namespace cheyette
