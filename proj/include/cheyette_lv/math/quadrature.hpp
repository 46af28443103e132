#pragma once

#include <functional>
#include <span>

namespace cheyette::math {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

/// Globally adaptive 15-point Gauss-Kronrod on [a, b]; either limit may be
/// infinite. Refines until the summed error estimate is below
/// max(abs_tol, rel_tol * |value|) or `max_pieces` subintervals are in use.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol = 1e-12, double rel_tol = 1e-13,
                                    int max_pieces = 2000);

/// Composite 8-point Gauss-Legendre with the given number of equal panels.
double integrate_gauss_legendre(const std::function<double(double)>& f, double a, double b,
                                int panels);

/// Composite Gauss-Legendre over [a, b], split at `breakpoints`, starting from
/// `nodes_per_unit` nodes per unit length and doubling the panel count until
/// successive estimates differ by less than `rel_tol` (relative) / `abs_tol`.
double integrate_gauss_legendre_refined(const std::function<double(double)>& f, double a,
                                        double b, std::span<const double> breakpoints = {},
                                        double nodes_per_unit = 32.0, double rel_tol = 1e-10,
                                        double abs_tol = 1e-300);

} // namespace cheyette::math
