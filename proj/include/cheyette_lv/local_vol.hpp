#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cheyette_lv/variance_surface.hpp"

namespace cheyette {

/// One-factor Cheyette parameters. The forward curve f0(T) only shifts strikes;
/// all formulas work with k = K - f0(T).
struct CheyetteParams1F {
    double mu = 0.0;
    std::function<double(double)> forward_curve = [](double) { return 0.0; };

    void validate() const;
};

/// `first` drops the (dw/dk)^3 correction; `third` is the full formula.
enum class LocalVolOrder { first, third };

/// Butterfly ratios at or below this reject the point instead of flooring it.
inline constexpr double density_ratio_floor = 1e-4;
/// Negative local variances are floored at (fraction * sqrt(w/T))^2.
inline constexpr double vol_floor_fraction = 0.05;

struct LocalVariance {
    double value = 0.0;
    bool floored = false;
};

/// Local variance from a smile point with mean reversion mu.
/// Throws ErrorKind::degenerate_denominator when the density ratio is below the floor.
LocalVariance local_variance_at(const SmilePoint& pt, double T, double mu, LocalVolOrder order);

LocalVariance local_var_main(const VarianceSurface& surface, double mu, double T, double k);
LocalVariance local_var_first_order(const VarianceSurface& surface, double mu, double T, double k);
LocalVariance local_var_multifactor(const VarianceSurface& surface,
                                    const std::function<double(double)>& mu_eff, double T, double k);

/// E[x(x-k)+] - E[y theta(x-k)] approximated as (1/2) p w dw/dk.
double a_first_order(const VarianceSurface& surface, double T, double k);
/// ... and with the cubic correction, p ((1/2) w dw/dk + (1/2) (dw/dk)^3).
double a_third_order(const VarianceSurface& surface, double T, double k);

struct LocalVolGridSpec {
    double t_max = 10.0;
    int n_t = 121;
    int n_x = 201;
    double width_sd = 6.0; // rows span +-width_sd * sqrt(w(t, 0))
};

struct LocalVolMetadata {
    std::string source;
    std::string mean_reversion; // "mu=<value>" or "mu_eff(T)"
    LocalVolOrder order = LocalVolOrder::third;
    std::size_t node_count = 0;
    std::size_t floored_count = 0;
    std::size_t rejected_count = 0;
};

/// Local variance sigma^2(t, x). Grid-backed surfaces interpolate bilinearly
/// (uniform x per time row) and hold values flat beyond the grid edges.
class LocalVolSurface {
public:
    struct Grid {
        std::vector<double> times;
        std::vector<double> x_lo;
        std::vector<double> x_step;
        std::size_t n_x = 0;
        std::vector<double> variance; // row-major, times.size() x n_x
    };

    static LocalVolSurface from_grid(Grid grid, LocalVolMetadata meta);
    static LocalVolSurface from_function(std::function<double(double, double)> variance,
                                         LocalVolMetadata meta);
    /// Deterministic volatility sigma(t), independent of x.
    static LocalVolSurface deterministic(std::function<double(double)> sigma);
    static LocalVolSurface constant(double sigma);

    double variance(double t, double x) const;
    double operator()(double t, double x) const { return variance(t, x); }

    const LocalVolMetadata& metadata() const { return meta_; }
    /// Null for function-backed surfaces.
    const Grid* grid() const { return grid_.get(); }

private:
    double grid_row(std::size_t row, double x) const;

    std::shared_ptr<const Grid> grid_;
    std::shared_ptr<const std::function<double(double, double)>> fn_;
    LocalVolMetadata meta_;
};

LocalVolSurface build_local_vol(const VarianceSurface& surface, const LocalVolGridSpec& spec,
                                double mu, LocalVolOrder order = LocalVolOrder::third);
LocalVolSurface build_local_vol(const VarianceSurface& surface, const LocalVolGridSpec& spec,
                                const std::function<double(double)>& mu_eff,
                                LocalVolOrder order = LocalVolOrder::third);

/// Monte Carlo estimates of the two model-dependent expectations in the
/// implicit local-vol identity, with standard errors.
struct AEstimate {
    double e_x_call = 0.0;  // E[x (x-k)+]
    double e_y_theta = 0.0; // E[y theta(x-k)]
    double a = 0.0;         // difference of the two
    double se_x_call = 0.0;
    double se_y_theta = 0.0;
    double se_a = 0.0;
};

struct ImplicitResidual {
    double residual = 0.0;
    double std_error = 0.0;
    double local_variance = 0.0;   // lv(T, k)
    double implied_variance = 0.0; // value the implicit identity assigns
};

/// lv(T,k) minus the implicit identity evaluated with surface derivatives and
/// the Monte Carlo expectations.
ImplicitResidual implicit_residual(const LocalVolSurface& lv, const AEstimate& mc_terms,
                                   const VarianceSurface& surface, double mu, double T, double k);

} // namespace cheyette
