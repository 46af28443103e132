#pragma once

#include <cmath>
#include <numbers>

namespace cheyette::math {

inline constexpr double inv_sqrt_2pi = 0.3989422804014326779399460599343818684758586311649;

inline double norm_pdf(double x) {
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

inline double norm_cdf(double x) {
    return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0);
}

/// Continued fraction 1/(d + 2/(d + 3/(d + ...))), evaluated by modified Lentz.
/// Accurate for d >= 2.
inline double mills_tail_fraction(double d) {
    constexpr double tiny = 1e-300;
    double f = d;
    double c = d;
    double dd = 0.0;
    for (int n = 2; n < 500; ++n) {
        const double an = n;
        dd = d + an * dd;
        if (std::abs(dd) < tiny) dd = tiny;
        c = d + an / c;
        if (std::abs(c) < tiny) c = tiny;
        dd = 1.0 / dd;
        const double delta = c * dd;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return 1.0 / f;
}

/// Mills ratio (1 - Phi(d)) / phi(d) for d >= 0.
inline double mills_ratio(double d) {
    if (d < 4.0)
        return norm_cdf(-d) / norm_pdf(d);
    const double r = mills_tail_fraction(d);
    return 1.0 / (d + r);
}

/// Phi(z) * exp(z^2 / 2), finite for arbitrarily negative z.
inline double scaled_norm_cdf(double z) {
    if (z > -4.0)
        return norm_cdf(z) * std::exp(0.5 * z * z);
    return inv_sqrt_2pi * mills_ratio(-z);
}

/// phi(d) - d * Phi(-d) for d >= 0: the undiscounted out-of-the-money Bachelier
/// value per unit standard deviation.
inline double otm_unit_value(double d) {
    if (d < 8.0)
        return norm_pdf(d) - d * norm_cdf(-d);
    // 1 - d*M(d) = R/(d+R), R the Lentz tail, avoids the cancellation.
    const double r = mills_tail_fraction(d);
    return norm_pdf(d) * r / (d + r);
}

} // namespace cheyette::math
