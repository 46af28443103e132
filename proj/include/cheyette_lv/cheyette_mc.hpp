#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cheyette_lv/local_vol.hpp"
#include "cheyette_lv/two_factor.hpp"

namespace cheyette {

struct MCConfig {
    std::size_t n_paths = 200000;
    int steps_per_year = 96;
    std::uint64_t seed = 20240611;
    bool antithetic = true;
    unsigned workers = 0; // 0 = hardware concurrency; results do not depend on it

    void validate() const;
};

/// Terminal samples under the T-forward measure. With antithetic sampling,
/// entries 2i and 2i+1 form a pair and are averaged before standard errors.
struct PathEnsemble1F {
    std::vector<double> x;
    std::vector<double> y;
    double maturity = 0.0;
    bool antithetic = false;
    std::string measure = "T-forward";

    std::size_t size() const { return x.size(); }
};

struct PathEnsemble2F {
    std::vector<double> x1;
    std::vector<double> x2;
    std::vector<double> y11;
    std::vector<double> y22;
    std::vector<double> y12;
    double maturity = 0.0;
    bool antithetic = false;

    /// Short-rate view: x = x1 + x2, y = y11 + 2 y12 + y22.
    PathEnsemble1F short_rate() const;
};

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Euler for x, exact exponential step for y, drift -sigma^2 G(t,T) from the
/// bond numeraire. Throws ErrorKind::simulation_blowup on a non-finite state.
PathEnsemble1F simulate_1f(const CheyetteParams1F& params, const LocalVolSurface& lv, double T,
                           const MCConfig& config);

/// sigma evaluated at x1 + x2; loadings V from params.
PathEnsemble2F simulate_2f(const CheyetteParams2F& params, const LocalVolSurface& lv, double T,
                           const MCConfig& config);

/// Mean of per-sample values with the standard error over independent units
/// (antithetic pairs when the ensemble is antithetic).
Estimate sample_mean(std::span<const double> values, bool paired);

Estimate price_short_rate_option(const PathEnsemble1F& ensemble, double k);
Estimate price_short_rate_put(const PathEnsemble1F& ensemble, double k);

struct SmileEstimate {
    double k = 0.0;
    double vol = 0.0;
    double band = 0.0; // one standard error in vol units
    bool valid = false; // false when the price fell at or below intrinsic
};

/// Out-of-the-money prices (puts for k < 0, via parity with E[x_T] = 0)
/// inverted to Bachelier vols.
std::vector<SmileEstimate> mc_implied_smile(const PathEnsemble1F& ensemble,
                                            std::span<const double> strikes);

/// E[x (x-k)+], E[y theta(x-k)] and their difference, with standard errors
/// from the per-unit differences.
AEstimate estimate_A(const PathEnsemble1F& ensemble, double k);

} // namespace cheyette
