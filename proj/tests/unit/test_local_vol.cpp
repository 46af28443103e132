#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cheyette_lv/errors.hpp"
#include "cheyette_lv/ig_analytics.hpp"
#include "cheyette_lv/local_vol.hpp"
#include "cheyette_lv/two_factor.hpp"
#include "support.hpp"

using namespace cheyette;
using testing::rel_err;

TEST_SUITE("local_vol") {

TEST_CASE("flat smile reduces to the time derivative") {
    const double s0 = 0.012;
    const VarianceSurface flat = proportional_from_slice(
        [=](double) { return math::Jet2{s0 * s0 * 3.0, 0.0, 0.0}; }, 3.0, "flat");
    for (double T : {0.5, 3.0, 12.0})
        CHECK(rel_err(local_var_main(flat, 0.0, T, 0.004).value, s0 * s0) < 1e-14);
}

TEST_CASE("gaussian flat surface gives a constant local vol") {
    for (double mu : {0.0, 0.03, 0.5}) {
        const VarianceSurface s = synthetic_flat(0.01, mu);
        for (double T : {0.5, 1.0, 5.0, 10.0, 20.0})
            for (int j = -10; j <= 10; ++j) {
                const double k = 0.005 * j;
                CHECK(std::abs(local_var_main(s, mu, T, k).value - 1e-4) < 1e-10 * 1e-4);
                CHECK(local_var_first_order(s, mu, T, k).value == local_var_main(s, mu, T, k).value);
            }
    }
}

TEST_CASE("linear smile reference value") {
    const VarianceSurface s = synthetic_linear(4e-4, 2e-3, 1.0);
    const LocalVariance lv = local_var_main(s, 0.03, 1.0, 0.01);
    CHECK_FALSE(lv.floored);
    CHECK(rel_err(lv.value, 0.00046861258015267175573) < 1e-13);
    const double diff = lv.value - local_var_first_order(s, 0.03, 1.0, 0.01).value;
    CHECK(std::abs(diff - 8e-9) < 1e-14 * lv.value);
}

TEST_CASE("quadratic smile first-order reference value") {
    const double a = 5e-4, b = 4e-3, c = 0.05;
    const VarianceSurface s = proportional_from_slice(
        [=](double k) { return math::Jet2{a + b * k + c * k * k, b + 2 * c * k, 2 * c}; }, 2.0,
        "quadratic");
    CHECK(rel_err(local_var_first_order(s, 0.1, 1.5, -0.012).value, 0.00027211495558856568027) < 1e-13);
    for (double k : {-0.02, 0.0, 0.015}) {
        const double dk = s.eval(1.5, k).dw_dk;
        const double gap = local_var_main(s, 0.1, 1.5, k).value - local_var_first_order(s, 0.1, 1.5, k).value;
        CHECK(std::abs(gap - dk * dk * dk) <= 1e-14 * std::abs(local_var_main(s, 0.1, 1.5, k).value));
    }
}

TEST_CASE("numerator is linear in mu at the money") {
    const VarianceSurface s = synthetic_skew(0.01, 0.2);
    const double T = 4.0;
    const SmilePoint p = s.eval(T, 0.0);
    const double ratio = density_ratio(p);
    const double v1 = local_var_first_order(s, 0.01, T, 0.0).value;
    const double v2 = local_var_first_order(s, 0.21, T, 0.0).value;
    CHECK(rel_err((v2 - v1) * ratio / 0.2, 2.0 * p.w) < 1e-12);
}

TEST_CASE("multifactor form") {
    const VarianceSurface s = synthetic_skew(0.01, 0.2);
    const auto constant = [](double) { return 0.07; };
    CHECK(local_var_multifactor(s, constant, 6.0, 0.013).value == local_var_main(s, 0.07, 6.0, 0.013).value);

    // Equal factor mean reversions collapse to the one-factor formula.
    const auto p_eq = CheyetteParams2F::from_alpha_rho(0.7, 0.5, 0.05, 0.05);
    const auto ts = AtmTermStructure::from_surface(s);
    const auto eq = [&](double T) { return mu_eff(p_eq, ts, T); };
    CHECK(rel_err(local_var_multifactor(s, eq, 6.0, 0.013).value, local_var_main(s, 0.05, 6.0, 0.013).value) < 1e-11);

    // Reference: two-factor parameters with a Gaussian one-percent ATM term structure.
    const auto p = CheyetteParams2F::from_alpha_rho(0.7, 0.5, 0.0005, 0.5);
    const auto gts = AtmTermStructure::gaussian_model(p, {10.0}, {0.01});
    const auto me = [&](double T) { return mu_eff(p, gts, T); };
    CHECK(rel_err(local_var_multifactor(s, me, 10.0, 0.01).value, 0.00021786662625308858334) < 1e-10);
}

TEST_CASE("A approximations") {
    const VarianceSurface flat = synthetic_flat(0.01, 0.1);
    CHECK(a_first_order(flat, 3.0, 0.01) == 0.0);
    CHECK(a_third_order(flat, 3.0, 0.01) == 0.0);

    const double a = 4e-4, b = 2e-3;
    const VarianceSurface lin = synthetic_linear(a, b, 1.0);
    const double at0 = 0.5 / std::sqrt(2 * std::numbers::pi * a) * a * b;
    CHECK(rel_err(a_first_order(lin, 1.0, 0.0), at0) < 1e-14);

    for (double k : {-0.02, 0.0, 0.01, 0.03}) {
        const double p = gaussian_density_p(k, a + b * k);
        CHECK(rel_err(a_third_order(lin, 1.0, k) - a_first_order(lin, 1.0, k), 0.5 * p * b * b * b) < 1e-9);
        // Exact inverse Gaussian value; the gap is higher order in the slope.
        const double exact = a_exact_linear(k, {a, b});
        CHECK(std::abs(a_third_order(lin, 1.0, k) - exact) < 1e-3 * std::abs(exact));
        const VarianceSurface half = synthetic_linear(a, 0.5 * b, 1.0);
        const double gap_half = std::abs(a_third_order(half, 1.0, k) - a_exact_linear(k, {a, 0.5 * b}));
        CHECK(std::abs(a_third_order(lin, 1.0, k) - exact) > 3.5 * gap_half);
    }
}

TEST_CASE("degenerate denominators and floors") {
    const double w = 1e-4, k0 = 0.01;
    const VarianceSurface bent = proportional_from_slice(
        [=](double) { return math::Jet2{w, 0.0, -4.0 * w / (k0 * k0)}; }, 1.0, "bent");
    try {
        local_var_main(bent, 0.0, 1.0, k0);
        FAIL("expected degenerate denominator");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::degenerate_denominator);
    }

    const VarianceSurface falling(
        [](double T, double k) { return SmilePoint{k, 1e-4 * T, 0.0, 0.0, -1e-3}; },
        SurfaceProvenance::analytic_synthetic, "falling");
    const LocalVariance lv = local_var_main(falling, 0.0, 2.0, 0.0);
    CHECK(lv.floored);
    CHECK(rel_err(lv.value, 0.05 * 0.05 * 1e-4) < 1e-14);
}

TEST_CASE("positivity on an arbitrage-clean surface") {
    const VarianceSurface s = synthetic_skew(0.01, 0.2);
    for (double T : {0.5, 2.0, 10.0})
        for (int j = -20; j <= 20; ++j) {
            const double k = 0.004 * j;
            if (!check_arbitrage(s, T, k, 0.03).all_pass()) continue;
            CHECK(local_var_main(s, 0.03, T, k).value > 0.0);
            CHECK_FALSE(local_var_main(s, 0.03, T, k).floored);
        }
}

TEST_CASE("grid surface") {
    const VarianceSurface flat = synthetic_flat(0.01, 0.03);
    LocalVolGridSpec spec;
    spec.t_max = 5.0;
    spec.n_t = 11;
    spec.n_x = 21;
    const LocalVolSurface lv = build_local_vol(flat, spec, 0.03);
    CHECK(lv.grid() != nullptr);
    CHECK(lv.metadata().node_count == 11u * 21u);
    CHECK(lv.metadata().rejected_count == 0u);
    CHECK(lv.metadata().mean_reversion == "mu=0.029999999999999999");
    for (double t : {0.0, 0.3, 2.25, 5.0, 9.0})
        for (double x : {-1.0, -0.01, 0.0, 0.02, 1.0})
            CHECK(std::abs(lv(t, x) - 1e-4) < 1e-14);

    // Bilinear interpolation reproduces functions linear in x within a row.
    const VarianceSurface skew = synthetic_skew(0.01, 0.2);
    spec.t_max = 10.0;
    const LocalVolSurface g = build_local_vol(skew, spec, 0.03);
    const auto* grid = g.grid();
    const double t = grid->times[4];
    const double x = grid->x_lo[4] + 7.5 * grid->x_step[4];
    const double mid = 0.5 * (local_var_main(skew, 0.03, t, grid->x_lo[4] + 7 * grid->x_step[4]).value +
                              local_var_main(skew, 0.03, t, grid->x_lo[4] + 8 * grid->x_step[4]).value);
    CHECK(rel_err(g(t, x), mid) < 1e-13);
    // Held flat beyond the row edges.
    CHECK(g(t, 10.0) == g(t, grid->x_lo[4] + 20 * grid->x_step[4]));

    const LocalVolSurface det = LocalVolSurface::deterministic([](double s) { return 0.01 + 0.001 * s; });
    CHECK(rel_err(det(2.0, 0.7), 0.012 * 0.012) < 1e-15);
    CHECK(det.grid() == nullptr);
}

TEST_CASE("grid rejects fill from neighbours") {
    // Butterfly fails for |k| below 0.005 only.
    const double w = 1e-4;
    const VarianceSurface notch = proportional_from_slice(
        [=](double k) {
            return std::abs(k) < 0.005 ? math::Jet2{w, 0.0, -4.0 * w / 1e-4}
                                       : math::Jet2{w, 0.0, 0.0};
        },
        1.0, "notch");
    LocalVolGridSpec spec;
    spec.t_max = 1.0;
    spec.n_t = 3;
    spec.n_x = 41;
    const LocalVolSurface lv = build_local_vol(notch, spec, 0.0);
    CHECK(lv.metadata().rejected_count > 0u);
    CHECK(std::abs(lv(1.0, 0.0) - 1e-4) < 1e-15);
}

}
