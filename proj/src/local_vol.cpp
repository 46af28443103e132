#include "cheyette_lv/local_vol.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cheyette_lv/errors.hpp"

namespace cheyette {

void CheyetteParams1F::validate() const {
    require(std::isfinite(mu) && mu >= 0.0, ErrorKind::domain, "mean reversion must be non-negative");
}

LocalVariance local_variance_at(const SmilePoint& pt, double T, double mu, LocalVolOrder order) {
    require(pt.w > 0.0, ErrorKind::domain, "local variance: w must be positive");
    const double ratio = density_ratio(pt);
    if (!(ratio > density_ratio_floor)) {
        std::ostringstream msg;
        msg << "local variance: density ratio " << ratio << " at T=" << T << ", k=" << pt.k;
        fail(ErrorKind::degenerate_denominator, msg.str());
    }
    const double numerator =
        pt.dw_dT + mu * (2.0 * pt.w - pt.k * pt.dw_dk) + pt.w * pt.dw_dk;
    double value = numerator / ratio;
    if (order == LocalVolOrder::third)
        value += pt.dw_dk * pt.dw_dk * pt.dw_dk;
    if (value > 0.0)
        return {value, false};
    const double floor_vol = vol_floor_fraction * std::sqrt(pt.w / T);
    return {floor_vol * floor_vol, true};
}

LocalVariance local_var_main(const VarianceSurface& surface, double mu, double T, double k) {
    return local_variance_at(surface.eval(T, k), T, mu, LocalVolOrder::third);
}

LocalVariance local_var_first_order(const VarianceSurface& surface, double mu, double T, double k) {
    return local_variance_at(surface.eval(T, k), T, mu, LocalVolOrder::first);
}

LocalVariance local_var_multifactor(const VarianceSurface& surface,
                                    const std::function<double(double)>& mu_eff, double T, double k) {
    return local_variance_at(surface.eval(T, k), T, mu_eff(T), LocalVolOrder::third);
}

double a_first_order(const VarianceSurface& surface, double T, double k) {
    const SmilePoint pt = surface.eval(T, k);
    return 0.5 * gaussian_density_p(k, pt.w) * pt.w * pt.dw_dk;
}

double a_third_order(const VarianceSurface& surface, double T, double k) {
    const SmilePoint pt = surface.eval(T, k);
    const double b = pt.dw_dk;
    return gaussian_density_p(k, pt.w) * (0.5 * pt.w * b + 0.5 * b * b * b);
}

LocalVolSurface LocalVolSurface::from_grid(Grid grid, LocalVolMetadata meta) {
    require(!grid.times.empty() && grid.n_x >= 2, ErrorKind::insufficient_data,
            "local vol grid is empty");
    require(grid.variance.size() == grid.times.size() * grid.n_x, ErrorKind::input,
            "local vol grid size mismatch");
    LocalVolSurface s;
    s.grid_ = std::make_shared<const Grid>(std::move(grid));
    s.meta_ = std::move(meta);
    return s;
}

LocalVolSurface LocalVolSurface::from_function(std::function<double(double, double)> variance,
                                               LocalVolMetadata meta) {
    LocalVolSurface s;
    s.fn_ = std::make_shared<const std::function<double(double, double)>>(std::move(variance));
    s.meta_ = std::move(meta);
    return s;
}

LocalVolSurface LocalVolSurface::deterministic(std::function<double(double)> sigma) {
    return from_function(
        [sigma = std::move(sigma)](double t, double) {
            const double s = sigma(t);
            return s * s;
        },
        LocalVolMetadata{"deterministic", "", LocalVolOrder::third, 0, 0, 0});
}

LocalVolSurface LocalVolSurface::constant(double sigma) {
    require(sigma >= 0.0, ErrorKind::domain, "constant local vol must be non-negative");
    return deterministic([sigma](double) { return sigma; });
}

double LocalVolSurface::grid_row(std::size_t row, double x) const {
    const Grid& g = *grid_;
    const double pos = (x - g.x_lo[row]) / g.x_step[row];
    const double* v = g.variance.data() + row * g.n_x;
    if (!(pos > 0.0))
        return v[0];
    const double last = static_cast<double>(g.n_x - 1);
    if (pos >= last)
        return v[g.n_x - 1];
    const auto j = static_cast<std::size_t>(pos);
    const double f = pos - static_cast<double>(j);
    return v[j] + f * (v[j + 1] - v[j]);
}

double LocalVolSurface::variance(double t, double x) const {
    if (fn_)
        return (*fn_)(t, x);
    const auto& times = grid_->times;
    if (t <= times.front())
        return grid_row(0, x);
    if (t >= times.back())
        return grid_row(times.size() - 1, x);
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
    const double f = (t - times[i]) / (times[i + 1] - times[i]);
    const double lo = grid_row(i, x);
    const double hi = grid_row(i + 1, x);
    return lo + f * (hi - lo);
}

namespace {

LocalVolSurface build_grid(const VarianceSurface& surface, const LocalVolGridSpec& spec,
                           const std::function<double(double)>& mu_of_t, LocalVolOrder order,
                           std::string mean_reversion) {
    require(spec.t_max > 0.0 && spec.n_t >= 2 && spec.n_x >= 3 && spec.width_sd > 0.0,
            ErrorKind::domain, "invalid local vol grid spec");
    LocalVolSurface::Grid g;
    g.n_x = static_cast<std::size_t>(spec.n_x);
    const double dt = spec.t_max / (spec.n_t - 1);
    LocalVolMetadata meta{surface.description(), std::move(mean_reversion), order, 0, 0, 0};

    std::vector<double> row(g.n_x);
    std::vector<bool> ok(g.n_x);
    for (int i = 0; i < spec.n_t; ++i) {
        // w vanishes at t = 0; the first row sits a tenth of a step in.
        const double t = i == 0 ? 0.1 * dt : i * dt;
        const double half_width = spec.width_sd * std::sqrt(surface.eval(t, 0.0).w);
        const double x_lo = -half_width;
        const double step = 2.0 * half_width / (spec.n_x - 1);
        const double mu = mu_of_t(t);
        for (std::size_t j = 0; j < g.n_x; ++j) {
            const double x = x_lo + step * static_cast<double>(j);
            try {
                const auto lv = local_variance_at(surface.eval(t, x), t, mu, order);
                row[j] = lv.value;
                ok[j] = true;
                meta.floored_count += lv.floored ? 1 : 0;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::degenerate_denominator && e.kind() != ErrorKind::domain)
                    throw;
                ok[j] = false;
                ++meta.rejected_count;
            }
        }
        // Rejected nodes take the nearest accepted value in the same row.
        for (std::size_t j = 0; j < g.n_x; ++j) {
            if (ok[j])
                continue;
            bool filled = false;
            for (std::size_t d = 1; d < g.n_x && !filled; ++d) {
                if (j >= d && ok[j - d]) {
                    row[j] = row[j - d];
                    filled = true;
                } else if (j + d < g.n_x && ok[j + d]) {
                    row[j] = row[j + d];
                    filled = true;
                }
            }
            if (!filled)
                fail(ErrorKind::degenerate_denominator, "local vol grid: every node rejected at t=" +
                                                            std::to_string(t));
        }
        g.times.push_back(t);
        g.x_lo.push_back(x_lo);
        g.x_step.push_back(step);
        g.variance.insert(g.variance.end(), row.begin(), row.end());
    }
    meta.node_count = g.variance.size();
    return LocalVolSurface::from_grid(std::move(g), std::move(meta));
}

} // namespace

LocalVolSurface build_local_vol(const VarianceSurface& surface, const LocalVolGridSpec& spec,
                                double mu, LocalVolOrder order) {
    require(mu >= 0.0, ErrorKind::domain, "mean reversion must be non-negative");
    std::ostringstream label;
    label.precision(17);
    label << "mu=" << mu;
    return build_grid(surface, spec, [mu](double) { return mu; }, order, label.str());
}

LocalVolSurface build_local_vol(const VarianceSurface& surface, const LocalVolGridSpec& spec,
                                const std::function<double(double)>& mu_eff, LocalVolOrder order) {
    return build_grid(surface, spec, mu_eff, order, "mu_eff(T)");
}

ImplicitResidual implicit_residual(const LocalVolSurface& lv, const AEstimate& mc_terms,
                                   const VarianceSurface& surface, double mu, double T, double k) {
    const SmilePoint pt = surface.eval(T, k);
    const double dkk = dkk_price(pt);
    if (!(dkk > 0.0))
        fail(ErrorKind::degenerate_denominator, "implicit residual: non-positive implied density");
    const double numerator = dT_price(pt) + mu * c_minus_k_dkc(pt) + mc_terms.a;
    ImplicitResidual r;
    r.local_variance = lv.variance(T, k);
    r.implied_variance = 2.0 * numerator / dkk;
    r.residual = r.local_variance - r.implied_variance;
    r.std_error = 2.0 * mc_terms.se_a / dkk;
    return r;
}

} // namespace cheyette
