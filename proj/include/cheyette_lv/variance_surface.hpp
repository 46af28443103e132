#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cheyette_lv/bachelier.hpp"
#include "cheyette_lv/math/jet.hpp"

namespace cheyette {

enum class SurfaceProvenance { grid_interpolated, analytic_synthetic };

/// Natural cubic spline in k on w per maturity; monotone Hermite in T at fixed k.
enum class InterpolationScheme { spline_k_monotone_t };

/// Quoted Bachelier implied vols on shifted strikes, one strike row per maturity.
struct SurfaceGrid {
    std::vector<double> maturities;
    std::vector<std::vector<double>> strikes;
    std::vector<std::vector<double>> vols;

    void validate() const;
};

/// Total implied variance w(T,k) with its strike and maturity derivatives.
/// Immutable; copies share the evaluator.
class VarianceSurface {
public:
    using Evaluator = std::function<SmilePoint(double T, double k)>;

    VarianceSurface(Evaluator evaluator, SurfaceProvenance provenance, std::string description);

    /// Throws ErrorKind::domain for T <= 0.
    SmilePoint eval(double T, double k) const;

    SurfaceProvenance provenance() const { return provenance_; }
    const std::string& description() const { return description_; }

private:
    std::shared_ptr<const Evaluator> evaluator_;
    SurfaceProvenance provenance_;
    std::string description_;
};

inline SmilePoint eval(const VarianceSurface& surface, double T, double k) {
    return surface.eval(T, k);
}

VarianceSurface build_surface(const SurfaceGrid& grid,
                              InterpolationScheme scheme = InterpolationScheme::spline_k_monotone_t);

/// Smile of the Gaussian model with constant vol sigma0 and mean reversion mu:
/// w(T) = sigma0^2 (1 - e^{-2 mu T}) / (2 mu), flat in k.
VarianceSurface synthetic_flat(double sigma0, double mu);

/// w = a + b k at maturity T, extended to other maturities at constant implied
/// vol per strike (w scales linearly in T). Evaluating where a + b k <= 0 throws.
VarianceSurface synthetic_linear(double a, double b, double T);

/// Skewed surface w(T,k) = sigma0^2 T + skew * sigma0 sqrt(T) * k, linear in k
/// within +-clamp_sd standard deviations sqrt(sigma0^2 T) and held flat beyond.
/// skew = 0.2 gives roughly +-20% vol skew over +-2 standard deviations.
VarianceSurface synthetic_skew(double sigma0, double skew, double clamp_sd = 4.0);

/// Term structure built from a single smile slice at T_ref by scaling w
/// linearly in T (constant implied vol per strike). The slice returns w and its
/// first two strike derivatives.
VarianceSurface proportional_from_slice(std::function<math::Jet2(double)> slice, double T_ref,
                                        std::string description);

struct ArbitrageDiagnostic {
    double w = 0.0;
    double density_ratio = 0.0;
    double numerator = 0.0;
    bool w_positive = false;
    bool butterfly = false; // density ratio > 0
    bool calendar = false;  // local-variance numerator > 0

    bool all_pass() const { return w_positive && butterfly && calendar; }
};

/// Pointwise diagnostics; never throws for T > 0.
ArbitrageDiagnostic check_arbitrage(const VarianceSurface& surface, double T, double k,
                                    double mu = 0.0);

} // namespace cheyette
