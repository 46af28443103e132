#pragma once

#include <span>
#include <vector>

#include "cheyette_lv/math/jet.hpp"

namespace cheyette::math {

/// Natural cubic spline on strictly increasing knots. Outside the knot range
/// the spline is held flat at the end value (zero derivatives).
class NaturalCubicSpline {
public:
    NaturalCubicSpline() = default;
    NaturalCubicSpline(std::vector<double> x, std::vector<double> y);

    /// Value, first and second derivative at `x`.
    Jet2 eval(double x) const;
    double operator()(double x) const { return eval(x).v; }

    const std::vector<double>& knots() const { return x_; }
    const std::vector<double>& values() const { return y_; }
    double front() const { return x_.front(); }
    double back() const { return x_.back(); }

private:
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> m_; // second derivatives at the knots
};

/// Shape-preserving piecewise cubic Hermite interpolation (Fritsch-Butland
/// slopes) of jet-valued data on strictly increasing knots. Beyond the last
/// knot the interpolant is extended linearly with its end slope; it is not
/// defined before the first knot.
struct MonotoneHermiteResult {
    Jet2 value;      // interpolant, carrying the data's derivative direction
    double slope;    // derivative of the interpolant in the knot variable
};

MonotoneHermiteResult monotone_hermite(std::span<const double> knots, std::span<const Jet2> data,
                                       double at);

} // namespace cheyette::math
