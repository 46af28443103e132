#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cheyette_lv/math/jet.hpp"
#include "cheyette_lv/math/spline.hpp"
#include "cheyette_lv/variance_surface.hpp"

namespace cheyette {

class DiscountCurve {
public:
    explicit DiscountCurve(std::function<double(double)> p0);
    static DiscountCurve flat(double rate);

    double operator()(double T) const { return (*p0_)(T); }

private:
    std::shared_ptr<const std::function<double(double)>> p0_;
};

/// Fixing T0 and payment times T1..Tn; accrual i runs from T_{i-1} to T_i.
struct SwapInstrument {
    double fixing = 0.0;
    std::vector<double> payments;
    std::vector<double> accruals;

    static SwapInstrument annual(double fixing, int tenor_years);
    void validate() const;
};

/// Total variance slice w(x) of the short rate at one maturity, with strike
/// derivatives.
struct VarianceSlice {
    double maturity = 0.0;
    std::function<math::Jet2(double)> eval;
    std::vector<double> breakpoints; // where eval is less smooth, e.g. spline knots

    static VarianceSlice from_surface(const VarianceSurface& surface, double T);
    static VarianceSlice from_spline(double T, math::NaturalCubicSpline spline);
};

/// Quoted swaption smile: Bachelier vols on absolute swap-rate strikes,
/// interpolated as a natural cubic spline in z = T vol^2, flat beyond the quotes.
class SwaptionSmile {
public:
    SwaptionSmile(double maturity, std::vector<double> strikes, std::vector<double> vols);

    double maturity() const { return maturity_; }
    const std::vector<double>& strikes() const { return strikes_; }
    const std::vector<double>& vols() const { return vols_; }
    /// z, dz/dK, d2z/dK2.
    math::Jet2 z(double strike) const { return spline_.eval(strike); }
    double vol(double strike) const { return std::sqrt(z(strike).v / maturity_); }

private:
    double maturity_;
    std::vector<double> strikes_;
    std::vector<double> vols_;
    math::NaturalCubicSpline spline_;
};

double g_factor(double mu, double t, double T);

/// P_t(T) reconstructed from the one-factor state.
double bond_from_state(const DiscountCurve& curve, double mu, double t, double T, double x,
                       double y);

/// w + (dw/dk)^2 / 2 at k = x.
double y_from_w(const VarianceSurface& surface, double T, double x);
double y_from_w(const VarianceSlice& slice, double x);

struct SwapValues {
    double annuity = 0.0;
    double swap_rate = 0.0;
    double d_annuity = 0.0;
    double d_swap_rate = 0.0;
};

struct SwaptionPricingSpec {
    double width_sd = 10.0;          // x integration range in standard deviations of w(0)
    double normalization_tol = 1e-6; // |integral of p_x - 1| allowed
};

/// Annuity and par swap rate at fixing as functions of the short-rate state x,
/// with y = y_from_w(slice, x). Derivatives include the dy/dx term.
/// Construction also integrates the implied short-rate density over the
/// pricing range for its mass, the annuity-measure mass and the model forward.
///
/// The annuity-measure density is (P0(T0)/A0) A(x) p_x(x) / annuity_mass().
/// The mass is 1 when y is the model's exact conditional variance (Gaussian
/// case); under y_from_w it misses 1 slightly, and dividing by it keeps the
/// measure a probability so that put-call parity around model_forward() holds.
class SwapFunctions {
public:
    SwapFunctions(DiscountCurve curve, SwapInstrument swap, VarianceSlice slice, double mu,
                  SwaptionPricingSpec spec = {});

    /// Throws ErrorKind::degenerate_annuity when A(x) <= 0.
    SwapValues operator()(double x) const;
    /// Same quantities for an explicitly given y (no y_from_w closure).
    SwapValues at_state(double x, double y) const;

    double annuity0() const { return annuity0_; }
    /// Curve forward (P0(T0) - P0(Tn)) / A0.
    double forward0() const { return forward0_; }
    /// E^A[S_T] under the slice's density; equals forward0() up to the y_from_w
    /// approximation.
    double model_forward() const { return model_forward_; }
    double density_mass() const { return density_mass_; }
    /// (P0(T0)/A0) times the integral of A(x) p_x(x).
    double annuity_mass() const { return annuity_mass_; }
    /// Weight turning A(x) p_x(x) into the annuity-measure density.
    double measure_scale() const { return p_fix_ / annuity0_ / annuity_mass_; }
    double x_lo() const { return x_lo_; }
    double x_hi() const { return x_hi_; }
    const SwaptionPricingSpec& spec() const { return spec_; }
    double discount_fixing() const { return p_fix_; }
    const SwapInstrument& swap() const { return swap_; }
    const VarianceSlice& slice() const { return slice_; }

private:
    SwapValues evaluate(double x, double y, double dy) const;

    DiscountCurve curve_;
    SwapInstrument swap_;
    VarianceSlice slice_;
    double mu_;
    double p_fix_;
    double annuity0_;
    double forward0_;
    SwaptionPricingSpec spec_;
    double x_lo_ = 0.0;
    double x_hi_ = 0.0;
    double density_mass_ = 0.0;
    double annuity_mass_ = 1.0;
    double model_forward_ = 0.0;
    std::vector<double> g_;
    std::vector<double> p_ratio_;
};

/// Short-rate density p_x(x) implied by the slice (d2C/dk2 at k = x).
double short_rate_density(const VarianceSlice& slice, double x);

/// E^A[(S_T - k)+], undiscounted, under the normalized annuity measure. The
/// out-of-the-money side relative to the model forward is integrated and the
/// other side follows by parity. Throws
/// ErrorKind::range_too_small when the density mass misses 1 by more than the
/// spec tolerance.
double price_swaption_from_w(const SwapFunctions& fns, double k);

/// Out-of-the-money price relative to the model forward: receiver for
/// k < forward, payer otherwise.
struct OtmPrice {
    double value = 0.0;
    bool receiver = false;
};
OtmPrice price_swaption_otm(const SwapFunctions& fns, double k);

/// Bachelier total variance of a payer price around the model forward.
double swaption_implied_variance(const SwapFunctions& fns, double call_price, double k);
/// Model implied total variance at k, inverted from the out-of-the-money price.
double swaption_model_variance(const SwapFunctions& fns, double k);

/// x with S(x) = k by bisection. Throws ErrorKind::inversion if not bracketed.
double invert_swap_rate(const SwapFunctions& fns, double k);

struct DensityResidual {
    double swaption_density = 0.0; // from the quoted smile
    double mapped_density = 0.0;   // Jacobian factor times short-rate density
    double residual = 0.0;
    double x_k = 0.0;
};

DensityResidual swaption_density_residual(const SwapFunctions& fns, const SwaptionSmile& smile,
                                          double k);

struct CalibrationOptions {
    int n_nodes = 41;
    double width_sd = 6.0;
    double damping = 1.0;
    int max_iterations = 200;
    double step_tol = 1e-10;        // max |change of log w| between iterations
    double vol_tol = 0.5e-4;        // 0.5 bp repricing tolerance
    double density_tol = 1e-3;      // max interior density residual relative to peak density
    // Quotes at each end left out of the density test. The natural end
    // condition sets the quoted curvature there, not the data.
    int density_edge_quotes = 3;
    SwaptionPricingSpec pricing{};
};

struct CalibrationReport {
    bool converged = false;
    int iterations = 0;
    std::vector<double> x_nodes;
    std::vector<double> w_nodes;
    std::vector<double> step_trace;     // max |d log w| per iteration
    std::vector<double> residual_trace; // max interior relative density residual per iteration
    std::vector<double> strikes;
    std::vector<double> vol_errors;        // model minus market, per quoted strike
    std::vector<double> density_residuals; // relative, per quoted strike
    double max_vol_error = 0.0;
    double max_density_residual = 0.0;          // over all quotes
    double max_interior_density_residual = 0.0; // over quotes used by the convergence test
    std::string message;

    VarianceSlice slice(double maturity) const;
};

/// Damped fixed point on log w at the x-nodes, each node driven by the
/// mismatch of swaption implied variance at K = S(x_node). Throws
/// ErrorKind::calibration (message carries the residual trace) when the
/// tolerances are not met within max_iterations.
CalibrationReport calibrate_w_from_swaptions(const DiscountCurve& curve, const SwapInstrument& swap,
                                             double mu, const SwaptionSmile& smile,
                                             const VarianceSlice& init,
                                             const CalibrationOptions& options = {});

/// Same, returning the report even on failure instead of throwing.
CalibrationReport try_calibrate_w_from_swaptions(const DiscountCurve& curve,
                                                 const SwapInstrument& swap, double mu,
                                                 const SwaptionSmile& smile,
                                                 const VarianceSlice& init,
                                                 const CalibrationOptions& options = {});

} // namespace cheyette
