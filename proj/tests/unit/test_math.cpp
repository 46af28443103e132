#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "cheyette_lv/math/jet.hpp"
#include "cheyette_lv/math/normal.hpp"
#include "cheyette_lv/math/philox.hpp"
#include "cheyette_lv/math/quadrature.hpp"
#include "cheyette_lv/math/spline.hpp"
#include "support.hpp"

using namespace cheyette::math;
using testing::rel_err;

TEST_SUITE("math") {

TEST_CASE("philox known-answer vectors") {
    const Philox4x32 zero(0);
    const auto a = zero({0, 0, 0, 0});
    CHECK(a[0] == 0x6627e8d5u);
    CHECK(a[1] == 0xe169c58du);
    CHECK(a[2] == 0xbc57ac4cu);
    CHECK(a[3] == 0x9b00dbd8u);

    const Philox4x32 ones(0xffffffffffffffffull);
    const auto b = ones({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu});
    CHECK(b[0] == 0x408f276du);
    CHECK(b[1] == 0x41c83b0eu);
    CHECK(b[2] == 0xa20bc7c6u);
    CHECK(b[3] == 0x6d5451fdu);
}

TEST_CASE("open unit interval and normal pairs") {
    CHECK(to_open_unit(0, 0) > 0.0);
    CHECK(to_open_unit(0xffffffffu, 0xffffffffu) < 1.0);
    CHECK(to_open_unit(0xffffffffu, 0xfffff800u) < 1.0);

    const Philox4x32 gen(7);
    double s1 = 0, s2 = 0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
        const auto z = normal_pair(gen, 3, static_cast<std::uint32_t>(i));
        s1 += z[0] + z[1];
        s2 += z[0] * z[0] + z[1] * z[1];
    }
    const double mean = s1 / (2.0 * n);
    const double var = s2 / (2.0 * n) - mean * mean;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(2.0 * n));
    CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / (2.0 * n)));
    // Same counter, same numbers.
    CHECK(normal_pair(gen, 3, 11)[0] == normal_pair(gen, 3, 11)[0]);
    CHECK(normal_pair(gen, 3, 11)[0] != normal_pair(gen, 4, 11)[0]);
}

TEST_CASE("normal helpers") {
    CHECK(rel_err(norm_cdf(-10.0), 7.6198530241604983e-24) < 1e-12);
    for (double d : {0.5, 3.0, 5.0, 9.0, 30.0}) {
        CHECK(rel_err(mills_ratio(d) * norm_pdf(d), norm_cdf(-d)) < 1e-13);
        const double direct = norm_pdf(d) - d * norm_cdf(-d);
        if (d < 8.0) CHECK(rel_err(otm_unit_value(d), direct) < 1e-10);
    }
    // Asymptotic tail: phi(d)/d^2 (1 - 3/d^2 + 15/d^4 ...)
    const double d = 40.0;
    const double series = norm_pdf(d) / (d * d) * (1 - 3 / (d * d) + 15 / std::pow(d, 4) - 105 / std::pow(d, 6));
    CHECK(rel_err(otm_unit_value(d), series) < 1e-8);
}

TEST_CASE("jet arithmetic follows the chain rule") {
    const Jet2 x{0.3, 1.0, 0.0};
    const Jet2 f = x * x * x / (Jet2(1.0) + x);
    // f = x^3/(1+x)
    const double v = 0.3;
    CHECK(rel_err(f.v, v * v * v / (1 + v)) < 1e-15);
    CHECK(rel_err(f.d, (3 * v * v * (1 + v) - v * v * v) / ((1 + v) * (1 + v))) < 1e-14);
    const double num = 2 * v * v * v + 6 * v * v + 6 * v;
    CHECK(rel_err(f.dd, num / std::pow(1 + v, 3)) < 1e-14);
}

TEST_CASE("natural cubic spline") {
    SUBCASE("reproduces knots and lines") {
        const std::vector<double> x{-1.0, 0.0, 0.5, 2.0};
        const std::vector<double> y{-1.0, 1.0, 2.0, 5.0};
        const NaturalCubicSpline s(x, y);
        for (std::size_t i = 0; i < x.size(); ++i)
            CHECK(s(x[i]) == doctest::Approx(y[i]).epsilon(1e-15));
        const NaturalCubicSpline line({0.0, 1.0, 3.0}, {1.0, 3.0, 7.0});
        CHECK(line.eval(2.2).d == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(std::abs(line.eval(2.2).dd) < 1e-13);
    }
    SUBCASE("flat beyond the knots") {
        const NaturalCubicSpline s({0.0, 1.0, 2.0}, {1.0, 4.0, 2.0});
        CHECK(s(-5.0) == 1.0);
        CHECK(s(9.0) == 2.0);
        CHECK(s.eval(9.0).d == 0.0);
        CHECK(s.eval(-5.0).dd == 0.0);
    }
    SUBCASE("derivatives match finite differences") {
        std::vector<double> x, y;
        for (int i = 0; i <= 20; ++i) {
            x.push_back(-1.0 + 0.1 * i);
            y.push_back(std::sin(2.0 * x.back()));
        }
        const NaturalCubicSpline s(x, y);
        for (double t : {-0.73, 0.11, 0.58}) {
            const auto j = s.eval(t);
            CHECK(std::abs(j.d - testing::central_diff(s, t, 1e-6)) < 1e-7);
            CHECK(std::abs(j.dd - testing::central_diff2(s, t, 1e-4)) < 1e-5);
            CHECK(std::abs(j.v - std::sin(2.0 * t)) < 1e-3);
        }
    }
}

TEST_CASE("monotone hermite preserves monotone data") {
    const std::vector<double> t{0.5, 1.0, 2.0, 5.0, 10.0};
    std::vector<Jet2> data;
    for (double v : {1.0, 1.1, 3.0, 3.05, 8.0}) data.push_back(Jet2(v));
    double prev = -1.0;
    for (double at = 0.5; at <= 12.0; at += 0.01) {
        const auto r = monotone_hermite(t, data, at);
        CHECK(r.value.v >= prev - 1e-14);
        CHECK(r.slope >= -1e-14);
        prev = r.value.v;
    }
    for (std::size_t i = 0; i < t.size(); ++i)
        CHECK(monotone_hermite(t, data, t[i]).value.v == doctest::Approx(data[i].v).epsilon(1e-15));
}

TEST_CASE("adaptive quadrature") {
    const auto r = integrate_adaptive([](double x) { return std::exp(-x * x); }, -INFINITY, INFINITY);
    CHECK(rel_err(r.value, std::sqrt(std::numbers::pi)) < 1e-13);
    const auto kink = integrate_adaptive([](double x) { return std::abs(x - 0.3); }, -1.0, 1.0);
    CHECK(rel_err(kink.value, 0.5 * (1.3 * 1.3 + 0.7 * 0.7)) < 1e-12);
    const auto tail = integrate_adaptive([](double x) { return 1.0 / (x * x); }, 1.0, INFINITY);
    CHECK(rel_err(tail.value, 1.0) < 1e-12);
}

TEST_CASE("gauss-legendre rules") {
    const auto f = [](double x) { return std::cos(x) * std::exp(0.3 * x); };
    const double exact = (std::exp(0.6) * (0.3 * std::cos(2.0) + std::sin(2.0)) - 0.3) / 1.09;
    CHECK(rel_err(integrate_gauss_legendre(f, 0.0, 2.0, 4), exact) < 1e-13);
    const std::vector<double> bp{0.7};
    CHECK(rel_err(integrate_gauss_legendre_refined(f, 0.0, 2.0, bp), exact) < 1e-12);
    // A degree-15 polynomial is exact on one 8-point panel.
    const auto p = [](double x) { return std::pow(x, 15); };
    CHECK(rel_err(integrate_gauss_legendre(p, 0.0, 1.0, 1), 1.0 / 16.0) < 1e-14);
}

}
