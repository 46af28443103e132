#include "cheyette_lv/variance_surface.hpp"

#include <algorithm>
#include <cmath>

#include "cheyette_lv/errors.hpp"
#include "cheyette_lv/math/spline.hpp"

namespace cheyette {

void SurfaceGrid::validate() const {
    require(!maturities.empty(), ErrorKind::insufficient_data, "surface grid has no maturities");
    require(strikes.size() == maturities.size() && vols.size() == maturities.size(),
            ErrorKind::input, "surface grid rows do not match maturities");
    for (std::size_t i = 0; i < maturities.size(); ++i) {
        require(maturities[i] > 0.0, ErrorKind::invalid_grid, "maturities must be positive");
        if (i > 0)
            require(maturities[i] > maturities[i - 1], ErrorKind::invalid_grid,
                    "maturities must increase strictly");
        require(strikes[i].size() == vols[i].size(), ErrorKind::input,
                "strike and vol rows differ in length");
        require(strikes[i].size() >= 3, ErrorKind::insufficient_data,
                "need at least three strikes per maturity");
        for (std::size_t j = 0; j < strikes[i].size(); ++j) {
            if (j > 0)
                require(strikes[i][j] > strikes[i][j - 1], ErrorKind::invalid_grid,
                        "strikes must increase strictly");
            require(std::isfinite(vols[i][j]) && vols[i][j] > 0.0, ErrorKind::invalid_grid,
                    "implied vols must be positive");
        }
    }
}

VarianceSurface::VarianceSurface(Evaluator evaluator, SurfaceProvenance provenance,
                                 std::string description)
    : evaluator_(std::make_shared<const Evaluator>(std::move(evaluator))),
      provenance_(provenance), description_(std::move(description)) {}

SmilePoint VarianceSurface::eval(double T, double k) const {
    require(std::isfinite(T) && std::isfinite(k), ErrorKind::domain, "surface eval: non-finite input");
    require(T > 0.0, ErrorKind::domain, "surface eval: maturity must be positive");
    return (*evaluator_)(T, k);
}

namespace {

struct GridSurfaceData {
    std::vector<double> knots; // 0 followed by the quoted maturities
    std::vector<math::NaturalCubicSpline> slices;
};

} // namespace

VarianceSurface build_surface(const SurfaceGrid& grid, InterpolationScheme scheme) {
    grid.validate();
    require(scheme == InterpolationScheme::spline_k_monotone_t, ErrorKind::input,
            "unknown interpolation scheme");

    auto data = std::make_shared<GridSurfaceData>();
    data->knots.push_back(0.0);
    for (std::size_t i = 0; i < grid.maturities.size(); ++i) {
        const double T = grid.maturities[i];
        std::vector<double> w(grid.vols[i].size());
        for (std::size_t j = 0; j < w.size(); ++j)
            w[j] = T * grid.vols[i][j] * grid.vols[i][j];
        data->knots.push_back(T);
        data->slices.emplace_back(grid.strikes[i], std::move(w));
    }

    auto evaluator = [data](double T, double k) {
        std::vector<math::Jet2> values;
        values.reserve(data->knots.size());
        values.emplace_back(0.0);
        for (const auto& slice : data->slices)
            values.push_back(slice.eval(k));
        const auto r = math::monotone_hermite(data->knots, values, T);
        return SmilePoint{k, r.value.v, r.value.d, r.value.dd, r.slope};
    };
    return VarianceSurface(std::move(evaluator), SurfaceProvenance::grid_interpolated,
                           "grid(" + std::to_string(grid.maturities.size()) + " maturities)");
}

VarianceSurface synthetic_flat(double sigma0, double mu) {
    require(sigma0 > 0.0, ErrorKind::domain, "synthetic_flat: sigma0 must be positive");
    require(mu >= 0.0, ErrorKind::domain, "synthetic_flat: mu must be non-negative");
    const double s2 = sigma0 * sigma0;
    auto evaluator = [s2, mu](double T, double k) {
        const double decay = std::exp(-2.0 * mu * T);
        // (1 - e^{-2 mu T}) / (2 mu) without cancellation for small mu T.
        const double w = mu > 0.0 ? -s2 * std::expm1(-2.0 * mu * T) / (2.0 * mu) : s2 * T;
        return SmilePoint{k, w, 0.0, 0.0, s2 * decay};
    };
    return VarianceSurface(std::move(evaluator), SurfaceProvenance::analytic_synthetic, "flat");
}

VarianceSurface proportional_from_slice(std::function<math::Jet2(double)> slice, double T_ref,
                                        std::string description) {
    require(T_ref > 0.0, ErrorKind::domain, "slice maturity must be positive");
    auto evaluator = [slice = std::move(slice), T_ref](double T, double k) {
        const math::Jet2 s = slice(k);
        const double scale = T / T_ref;
        return SmilePoint{k, scale * s.v, scale * s.d, scale * s.dd, s.v / T_ref};
    };
    return VarianceSurface(std::move(evaluator), SurfaceProvenance::analytic_synthetic,
                           std::move(description));
}

VarianceSurface synthetic_linear(double a, double b, double T) {
    require(a > 0.0, ErrorKind::domain, "synthetic_linear: a must be positive");
    auto slice = [a, b](double k) {
        const double w = a + b * k;
        require(w > 0.0, ErrorKind::domain, "synthetic_linear: a + b k must be positive");
        return math::Jet2{w, b, 0.0};
    };
    return proportional_from_slice(slice, T, "linear");
}

VarianceSurface synthetic_skew(double sigma0, double skew, double clamp_sd) {
    require(sigma0 > 0.0, ErrorKind::domain, "synthetic_skew: sigma0 must be positive");
    require(clamp_sd > 0.0, ErrorKind::domain, "synthetic_skew: clamp must be positive");
    require(std::abs(skew) * clamp_sd < 1.0, ErrorKind::domain,
            "synthetic_skew: variance would vanish inside the clamp");
    auto evaluator = [=](double T, double k) {
        const double sd = sigma0 * std::sqrt(T);
        const double slope = skew * sd;
        const double bound = clamp_sd * sd;
        const double kc = std::clamp(k, -bound, bound);
        const bool inside = k > -bound && k < bound;
        // d/dT of sd is sd / (2T); the clamp bound moves with it.
        const double dbound = k >= bound ? bound / (2.0 * T) : (k <= -bound ? -bound / (2.0 * T) : 0.0);
        const double w = sd * sd + slope * kc;
        const double dw_dT = sigma0 * sigma0 + (slope / (2.0 * T)) * kc + slope * dbound;
        return SmilePoint{k, w, inside ? slope : 0.0, 0.0, dw_dT};
    };
    return VarianceSurface(std::move(evaluator), SurfaceProvenance::analytic_synthetic, "skew");
}

ArbitrageDiagnostic check_arbitrage(const VarianceSurface& surface, double T, double k, double mu) {
    ArbitrageDiagnostic d;
    const SmilePoint pt = surface.eval(T, k);
    d.w = pt.w;
    d.w_positive = pt.w > 0.0;
    if (!d.w_positive)
        return d;
    d.density_ratio = density_ratio(pt);
    d.butterfly = d.density_ratio > 0.0;
    d.numerator = pt.dw_dT + mu * (2.0 * pt.w - k * pt.dw_dk) + pt.w * pt.dw_dk;
    d.calendar = d.numerator > 0.0;
    return d;
}

} // namespace cheyette
