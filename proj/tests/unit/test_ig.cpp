#include <doctest.h>

#include <cmath>
#include <limits>

#include "cheyette_lv/errors.hpp"
#include "cheyette_lv/ig_analytics.hpp"
#include "cheyette_lv/math/quadrature.hpp"
#include "support.hpp"

using namespace cheyette;
using testing::rel_err;

namespace {

double quad_moment(int power, double x, const IGParams& p) {
    const auto f = [&](double u) { return std::pow(u, power) * ig_pdf(u, p); };
    return math::integrate_adaptive(f, x, std::numeric_limits<double>::infinity(), 1e-300, 1e-13, 4000).value;
}

} // namespace

TEST_SUITE("ig_analytics") {

TEST_CASE("density basics") {
    const IGParams p{1.0, 0.1};
    CHECK(p.shape() == doctest::Approx(100.0).epsilon(1e-14));
    CHECK(std::abs(quad_moment(0, 1e-12, p) - 1.0) < 1e-12);
    CHECK(rel_err(quad_moment(1, 1e-12, p), 1.0) < 1e-12);
    CHECK(rel_err(quad_moment(2, 1e-12, p), 1.0 + 1.0 * 0.01) < 1e-12);
    CHECK_THROWS_AS(ig_pdf(0.0, p), Error);
    CHECK_THROWS_AS(ig_pdf(1.0, IGParams{1.0, 0.0}), Error);
}

TEST_CASE("truncated moment limits") {
    for (double b : {0.1, -0.2}) {
        const IGParams p{1.5, b};
        CHECK(rel_err(ig_trunc_m1(1e-9, p), 1.5) < 1e-12);
        CHECK(rel_err(ig_trunc_m2(1e-9, p), 1.5 * 1.5 + 1.5 * b * b) < 1e-12);
        CHECK(ig_trunc_m1(1e3, p) < 1e-300);
        CHECK(ig_trunc_m2(1e3, p) < 1e-300);
        CHECK(rel_err(ig_survival(1e-9, p), 1.0) < 1e-14);
    }
}

TEST_CASE("truncated moment reference values") {
    const IGParams p{1.0, 0.1};
    CHECK(rel_err(ig_trunc_m1(1.05, p), 0.33045180398800552371) < 1e-12);
    CHECK(rel_err(ig_trunc_m2(1.05, p), 0.37102062343534281241) < 1e-12);
}

TEST_CASE("closed forms agree with quadrature on the grid") {
    for (double a : {0.25, 1.0, 4.0})
        for (double b : {0.05, 0.1, 0.2})
            for (double r : {0.5, 1.0, 1.5, 3.0}) {
                const IGParams p{a, b};
                const double x = r * a;
                const double q0 = quad_moment(0, x, p);
                const double q1 = quad_moment(1, x, p);
                const double q2 = quad_moment(2, x, p);
                // Far tails underflow to zero in both computations.
                if (q1 == 0.0) {
                    CHECK(ig_trunc_m1(x, p) == doctest::Approx(0.0));
                    continue;
                }
                CHECK(rel_err(ig_survival(x, p), q0) < 1e-8);
                CHECK(rel_err(ig_trunc_m1(x, p), q1) < 1e-8);
                CHECK(rel_err(ig_trunc_m2(x, p), q2) < 1e-8);
            }
}

TEST_CASE("exact A for a linear smile") {
    CHECK(rel_err(a_exact_linear(0.5, {1.0, 0.1}), 0.018320373355747279737) < 1e-9);
    // Vanishes as the smile flattens.
    CHECK(std::abs(a_exact_linear(0.5, {1.0, 1e-7})) < 1e-7);
    CHECK(rel_err(linear_smile_adjustment({1.0, 0.3}), 0.045) < 1e-15);
    try {
        a_exact_linear(-20.0, {1.0, 0.1});
        FAIL("expected domain error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::domain);
    }
}

TEST_CASE("falling smile reference value") {
    CHECK(rel_err(a_exact_linear(0.5, {1.0, -0.1}), -0.017221937980306689109) < 1e-9);
}

TEST_CASE("expansion accuracy") {
    // Nearly flat smiles: the O(b^4) error is below rounding noise.
    CHECK(expansion_error(0.5, {1.0, 1e-3}) < 1e-12);
    const auto rows = expansion_order_table(1.0, 0.5, {0.2, 0.1, 0.05}, ExpansionForm::cubic);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].ratio == 0.0);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].error < rows[i - 1].error);
        CHECK(rows[i].ratio == doctest::Approx(rows[i - 1].error / rows[i].error));
    }
    // The strike-weighted variant differs from the cubic form by (1/2) b^3 (1 - k).
    const IGParams p{1.0, 0.1};
    const double gap = expansion_value(0.5, p, ExpansionForm::cubic) -
                       expansion_value(0.5, p, ExpansionForm::strike_weighted_cubic);
    CHECK(rel_err(gap, 0.5 * 1e-3 * 0.5) < 1e-12);
    CHECK(expansion_value(1.0, p, ExpansionForm::cubic) ==
          doctest::Approx(expansion_value(1.0, p, ExpansionForm::strike_weighted_cubic)).epsilon(1e-14));
}

}
