#pragma once

namespace cheyette::math {

/// Second-order forward-mode jet: value with first and second derivative in
/// one scalar direction.
struct Jet2 {
    double v = 0.0;
    double d = 0.0;
    double dd = 0.0;

    constexpr Jet2() = default;
    constexpr Jet2(double value) : v(value) {}
    constexpr Jet2(double value, double d1, double d2) : v(value), d(d1), dd(d2) {}
};

constexpr Jet2 operator+(Jet2 a, Jet2 b) { return {a.v + b.v, a.d + b.d, a.dd + b.dd}; }
constexpr Jet2 operator-(Jet2 a, Jet2 b) { return {a.v - b.v, a.d - b.d, a.dd - b.dd}; }
constexpr Jet2 operator-(Jet2 a) { return {-a.v, -a.d, -a.dd}; }
constexpr Jet2 operator*(Jet2 a, Jet2 b) {
    return {a.v * b.v, a.d * b.v + a.v * b.d, a.dd * b.v + 2.0 * a.d * b.d + a.v * b.dd};
}
constexpr Jet2 operator*(double s, Jet2 a) { return {s * a.v, s * a.d, s * a.dd}; }
constexpr Jet2 operator*(Jet2 a, double s) { return s * a; }
constexpr Jet2 operator/(Jet2 a, double s) { return {a.v / s, a.d / s, a.dd / s}; }
constexpr Jet2 reciprocal(Jet2 a) {
    const double r = 1.0 / a.v;
    return {r, -a.d * r * r, (2.0 * a.d * a.d * r - a.dd) * r * r};
}
constexpr Jet2 operator/(Jet2 a, Jet2 b) { return a * reciprocal(b); }

} // namespace cheyette::math
