#include "cheyette_lv/math/spline.hpp"

#include <algorithm>
#include <cmath>

#include "cheyette_lv/errors.hpp"

namespace cheyette::math {

NaturalCubicSpline::NaturalCubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    require(n == y_.size(), ErrorKind::input, "spline knots and values differ in length");
    require(n >= 2, ErrorKind::insufficient_data, "spline needs at least two knots");
    for (std::size_t i = 1; i < n; ++i)
        require(x_[i] > x_[i - 1], ErrorKind::invalid_grid, "spline knots must increase strictly");

    m_.assign(n, 0.0);
    if (n == 2)
        return;
    // Thomas algorithm on the interior second derivatives.
    std::vector<double> c(n, 0.0), r(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = x_[i] - x_[i - 1];
        const double h1 = x_[i + 1] - x_[i];
        const double diag = 2.0 * (h0 + h1);
        const double rhs = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
        const double denom = diag - h0 * c[i - 1];
        c[i] = h1 / denom;
        r[i] = (rhs - h0 * r[i - 1]) / denom;
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
        m_[i] = r[i] - c[i] * m_[i + 1];
        if (i == 1)
            break;
    }
}

Jet2 NaturalCubicSpline::eval(double x) const {
    if (x <= x_.front())
        return {y_.front(), 0.0, 0.0};
    if (x >= x_.back())
        return {y_.back(), 0.0, 0.0};
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - x) / h;
    const double b = (x - x_[i]) / h;
    const double value = a * y_[i] + b * y_[i + 1] +
                         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
    const double d1 = (y_[i + 1] - y_[i]) / h -
                      (3.0 * a * a - 1.0) * h * m_[i] / 6.0 + (3.0 * b * b - 1.0) * h * m_[i + 1] / 6.0;
    const double d2 = a * m_[i] + b * m_[i + 1];
    return {value, d1, d2};
}

namespace {

// Fritsch-Butland weighted harmonic mean of adjacent secants; zero at extrema.
Jet2 interior_slope(double h0, double h1, Jet2 s0, Jet2 s1) {
    if (s0.v * s1.v <= 0.0)
        return Jet2{};
    const double w0 = 2.0 * h1 + h0;
    const double w1 = h1 + 2.0 * h0;
    return (w0 + w1) * reciprocal(w0 * reciprocal(s0) + w1 * reciprocal(s1));
}

// Three-point end formula, limited to keep monotonicity.
Jet2 end_slope(double h0, double h1, Jet2 s0, Jet2 s1) {
    Jet2 d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if (d.v * s0.v <= 0.0)
        return Jet2{};
    if (s0.v * s1.v <= 0.0 && std::abs(d.v) > std::abs(3.0 * s0.v))
        return 3.0 * s0;
    return d;
}

} // namespace

MonotoneHermiteResult monotone_hermite(std::span<const double> knots, std::span<const Jet2> data,
                                       double at) {
    const std::size_t n = knots.size();
    require(n >= 2 && data.size() == n, ErrorKind::insufficient_data,
            "monotone interpolation needs at least two knots");
    require(at >= knots.front(), ErrorKind::domain, "monotone interpolation below first knot");

    auto secant = [&](std::size_t i) { return (data[i + 1] - data[i]) / (knots[i + 1] - knots[i]); };
    auto slope_at = [&](std::size_t i) -> Jet2 {
        if (n == 2)
            return secant(0);
        if (i == 0)
            return end_slope(knots[1] - knots[0], knots[2] - knots[1], secant(0), secant(1));
        if (i == n - 1)
            return end_slope(knots[n - 1] - knots[n - 2], knots[n - 2] - knots[n - 3],
                             secant(n - 2), secant(n - 3));
        return interior_slope(knots[i] - knots[i - 1], knots[i + 1] - knots[i], secant(i - 1),
                              secant(i));
    };

    if (at >= knots.back()) {
        const Jet2 d = slope_at(n - 1);
        return {data[n - 1] + (at - knots.back()) * d, d.v};
    }
    const auto it = std::upper_bound(knots.begin(), knots.end(), at);
    const std::size_t i = static_cast<std::size_t>(it - knots.begin()) - 1;
    const double h = knots[i + 1] - knots[i];
    const double t = (at - knots[i]) / h;
    if (t == 0.0)
        return {data[i], slope_at(i).v};

    const Jet2 d0 = slope_at(i);
    const Jet2 d1 = slope_at(i + 1);
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    const Jet2 value = h00 * data[i] + (h10 * h) * d0 + h01 * data[i + 1] + (h11 * h) * d1;

    const double g00 = (6.0 * t2 - 6.0 * t) / h;
    const double g10 = 3.0 * t2 - 4.0 * t + 1.0;
    const double g01 = (-6.0 * t2 + 6.0 * t) / h;
    const double g11 = 3.0 * t2 - 2.0 * t;
    const double slope = g00 * data[i].v + g10 * d0.v + g01 * data[i + 1].v + g11 * d1.v;
    return {value, slope};
}

} // namespace cheyette::math
