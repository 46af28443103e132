#include "cheyette_lv/swaption_calib.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cheyette_lv/bachelier.hpp"
#include "cheyette_lv/errors.hpp"
#include "cheyette_lv/math/quadrature.hpp"

namespace cheyette {

DiscountCurve::DiscountCurve(std::function<double(double)> p0)
    : p0_(std::make_shared<const std::function<double(double)>>(std::move(p0))) {
    require(std::abs((*p0_)(0.0) - 1.0) < 1e-14, ErrorKind::input, "discount curve must have P(0) = 1");
}

DiscountCurve DiscountCurve::flat(double rate) {
    return DiscountCurve([rate](double T) { return std::exp(-rate * T); });
}

SwapInstrument SwapInstrument::annual(double fixing, int tenor_years) {
    SwapInstrument s;
    s.fixing = fixing;
    for (int i = 1; i <= tenor_years; ++i) {
        s.payments.push_back(fixing + i);
        s.accruals.push_back(1.0);
    }
    s.validate();
    return s;
}

void SwapInstrument::validate() const {
    require(fixing > 0.0, ErrorKind::input, "swap fixing must be positive");
    require(!payments.empty(), ErrorKind::input, "swap needs at least one payment");
    require(accruals.size() == payments.size(), ErrorKind::input,
            "swap needs one accrual per payment");
    double prev = fixing;
    for (std::size_t i = 0; i < payments.size(); ++i) {
        require(payments[i] > prev, ErrorKind::input, "swap payment times must increase");
        require(accruals[i] > 0.0, ErrorKind::input, "swap accruals must be positive");
        require(std::abs(accruals[i] - (payments[i] - prev)) < 1e-9, ErrorKind::input,
                "swap accrual does not match its payment period");
        prev = payments[i];
    }
}

VarianceSlice VarianceSlice::from_surface(const VarianceSurface& surface, double T) {
    return {T, [surface, T](double x) {
                const SmilePoint p = surface.eval(T, x);
                return math::Jet2{p.w, p.dw_dk, p.d2w_dk2};
            },
            {}};
}

VarianceSlice VarianceSlice::from_spline(double T, math::NaturalCubicSpline spline) {
    std::vector<double> knots = spline.knots();
    return {T, [spline = std::move(spline)](double x) { return spline.eval(x); }, std::move(knots)};
}

SwaptionSmile::SwaptionSmile(double maturity, std::vector<double> strikes, std::vector<double> vols)
    : maturity_(maturity), strikes_(std::move(strikes)), vols_(std::move(vols)) {
    require(maturity_ > 0.0, ErrorKind::input, "swaption smile maturity must be positive");
    require(strikes_.size() == vols_.size(), ErrorKind::input, "smile strike/vol count mismatch");
    require(strikes_.size() >= 3, ErrorKind::insufficient_data, "swaption smile needs 3 strikes");
    std::vector<double> z(vols_.size());
    for (std::size_t i = 0; i < vols_.size(); ++i) {
        require(vols_[i] > 0.0, ErrorKind::invalid_grid, "swaption vols must be positive");
        require(i == 0 || strikes_[i] > strikes_[i - 1], ErrorKind::invalid_grid,
                "swaption strikes must increase");
        z[i] = maturity_ * vols_[i] * vols_[i];
    }
    spline_ = math::NaturalCubicSpline(strikes_, std::move(z));
}

namespace {

double integrate_split(const std::function<double(double)>& f, double a, double b,
                       const std::vector<double>& breakpoints) {
    if (!(b > a))
        return 0.0;
    std::vector<double> cuts{a};
    for (double c : breakpoints)
        if (c > a && c < b)
            cuts.push_back(c);
    cuts.push_back(b);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += math::integrate_adaptive(f, cuts[i], cuts[i + 1], 1e-22, 1e-12).value;
    return total;
}

} // namespace

double g_factor(double mu, double t, double T) {
    const double tau = T - t;
    return mu == 0.0 ? tau : -std::expm1(-mu * tau) / mu;
}

double bond_from_state(const DiscountCurve& curve, double mu, double t, double T, double x,
                       double y) {
    require(t >= 0.0 && t <= T, ErrorKind::domain, "bond_from_state needs 0 <= t <= T");
    const double g = g_factor(mu, t, T);
    return curve(T) / curve(t) * std::exp(-g * x - 0.5 * g * g * y);
}

double y_from_w(const VarianceSurface& surface, double T, double x) {
    const SmilePoint p = surface.eval(T, x);
    require(p.w > 0.0, ErrorKind::domain, "y_from_w: w must be positive");
    return p.w + 0.5 * p.dw_dk * p.dw_dk;
}

double y_from_w(const VarianceSlice& slice, double x) {
    const math::Jet2 w = slice.eval(x);
    require(w.v > 0.0, ErrorKind::domain, "y_from_w: w must be positive");
    return w.v + 0.5 * w.d * w.d;
}

SwapFunctions::SwapFunctions(DiscountCurve curve, SwapInstrument swap, VarianceSlice slice, double mu,
                             SwaptionPricingSpec spec)
    : curve_(std::move(curve)), swap_(std::move(swap)), slice_(std::move(slice)), mu_(mu),
      spec_(spec) {
    swap_.validate();
    require(std::abs(slice_.maturity - swap_.fixing) < 1e-12, ErrorKind::input,
            "variance slice maturity must equal the swap fixing");
    p_fix_ = curve_(swap_.fixing);
    annuity0_ = 0.0;
    for (std::size_t i = 0; i < swap_.payments.size(); ++i) {
        const double p = curve_(swap_.payments[i]);
        annuity0_ += p * swap_.accruals[i];
        g_.push_back(g_factor(mu_, swap_.fixing, swap_.payments[i]));
        p_ratio_.push_back(p / p_fix_);
    }
    require(annuity0_ > 0.0, ErrorKind::degenerate_annuity, "initial annuity is not positive");
    forward0_ = (p_fix_ - curve_(swap_.payments.back())) / annuity0_;

    const double w0 = slice_.eval(0.0).v;
    require(w0 > 0.0, ErrorKind::domain, "swap functions: w(0) must be positive");
    x_hi_ = spec_.width_sd * std::sqrt(w0);
    x_lo_ = -x_hi_;
    density_mass_ = integrate_split([this](double x) { return short_rate_density(slice_, x); },
                                    x_lo_, x_hi_, slice_.breakpoints);
    const double scale = p_fix_ / annuity0_;
    annuity_mass_ = integrate_split(
        [this, scale](double x) {
            return scale * (*this)(x).annuity * short_rate_density(slice_, x);
        },
        x_lo_, x_hi_, slice_.breakpoints);
    model_forward_ = integrate_split(
                         [this, scale](double x) {
                             const SwapValues v = (*this)(x);
                             return scale * v.annuity * v.swap_rate * short_rate_density(slice_, x);
                         },
                         x_lo_, x_hi_, slice_.breakpoints) /
                     annuity_mass_;
}

SwapValues SwapFunctions::evaluate(double x, double y, double dy) const {
    SwapValues v;
    double p_last = 0.0;
    double dp_last = 0.0;
    for (std::size_t i = 0; i < g_.size(); ++i) {
        const double g = g_[i];
        const double p = p_ratio_[i] * std::exp(-g * x - 0.5 * g * g * y);
        const double dp = -p * (g + 0.5 * g * g * dy);
        v.annuity += p * swap_.accruals[i];
        v.d_annuity += dp * swap_.accruals[i];
        p_last = p;
        dp_last = dp;
    }
    if (!(v.annuity > 0.0))
        fail(ErrorKind::degenerate_annuity, "annuity is not positive");
    v.swap_rate = (1.0 - p_last) / v.annuity;
    v.d_swap_rate = -(v.swap_rate * v.d_annuity + dp_last) / v.annuity;
    return v;
}

SwapValues SwapFunctions::operator()(double x) const {
    const math::Jet2 w = slice_.eval(x);
    require(w.v > 0.0, ErrorKind::domain, "swap functions: w must be positive");
    // y = w + w'^2 / 2, dy/dx = w' + w' w''
    return evaluate(x, w.v + 0.5 * w.d * w.d, w.d + w.d * w.dd);
}

SwapValues SwapFunctions::at_state(double x, double y) const {
    return evaluate(x, y, 0.0);
}

double short_rate_density(const VarianceSlice& slice, double x) {
    const math::Jet2 w = slice.eval(x);
    const SmilePoint pt{x, w.v, w.d, w.dd, 0.0};
    return gaussian_density_p(x, w.v) * density_ratio(pt);
}

namespace {

void check_normalization(const SwapFunctions& fns) {
    if (std::abs(fns.density_mass() - 1.0) > fns.spec().normalization_tol) {
        std::ostringstream msg;
        msg << "short-rate density integrates to " << fns.density_mass() << " over ["
            << fns.x_lo() << ", " << fns.x_hi() << "]";
        fail(ErrorKind::range_too_small, msg.str());
    }
}

} // namespace

double invert_swap_rate(const SwapFunctions& fns, double k) {
    double lo = fns.x_lo();
    double hi = fns.x_hi();
    const double s_lo = fns(lo).swap_rate;
    const double s_hi = fns(hi).swap_rate;
    if (!(s_lo < s_hi) || k < s_lo || k > s_hi) {
        std::ostringstream msg;
        msg << "swap rate " << k << " not bracketed by S on [" << lo << ", " << hi << "]";
        fail(ErrorKind::inversion, msg.str());
    }
    for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (fns(mid).swap_rate < k)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

OtmPrice price_swaption_otm(const SwapFunctions& fns, double k) {
    check_normalization(fns);
    const double scale = fns.measure_scale();
    const VarianceSlice& slice = fns.slice();
    if (k >= fns.model_forward()) {
        if (k >= fns(fns.x_hi()).swap_rate)
            return {0.0, false};
        const double xk = invert_swap_rate(fns, k);
        auto payoff = [&](double x) {
            const SwapValues v = fns(x);
            return v.annuity * std::max(v.swap_rate - k, 0.0) * short_rate_density(slice, x);
        };
        return {scale * integrate_split(payoff, xk, fns.x_hi(), slice.breakpoints), false};
    }
    if (k <= fns(fns.x_lo()).swap_rate)
        return {0.0, true};
    const double xk = invert_swap_rate(fns, k);
    auto payoff = [&](double x) {
        const SwapValues v = fns(x);
        return v.annuity * std::max(k - v.swap_rate, 0.0) * short_rate_density(slice, x);
    };
    return {scale * integrate_split(payoff, fns.x_lo(), xk, slice.breakpoints), true};
}

double price_swaption_from_w(const SwapFunctions& fns, double k) {
    const OtmPrice otm = price_swaption_otm(fns, k);
    return otm.receiver ? otm.value + fns.model_forward() - k : otm.value;
}

double swaption_implied_variance(const SwapFunctions& fns, double call_price, double k) {
    return implied_total_variance(call_price, k - fns.model_forward());
}

double swaption_model_variance(const SwapFunctions& fns, double k) {
    return implied_total_variance_otm(price_swaption_otm(fns, k).value, k - fns.model_forward());
}

DensityResidual swaption_density_residual(const SwapFunctions& fns, const SwaptionSmile& smile,
                                          double k) {
    DensityResidual out;
    const math::Jet2 z = smile.z(k);
    const SmilePoint zp{k - fns.model_forward(), z.v, z.d, z.dd, 0.0};
    out.swaption_density = gaussian_density_p(zp.k, z.v) * density_ratio(zp);
    out.x_k = invert_swap_rate(fns, k);
    const SwapValues v = fns(out.x_k);
    out.mapped_density = fns.measure_scale() * v.annuity / v.d_swap_rate *
                         short_rate_density(fns.slice(), out.x_k);
    out.residual = out.swaption_density - out.mapped_density;
    return out;
}

VarianceSlice CalibrationReport::slice(double maturity) const {
    return VarianceSlice::from_spline(maturity, math::NaturalCubicSpline(x_nodes, w_nodes));
}

namespace {

struct Diagnostics {
    std::vector<double> vol_errors;
    std::vector<double> density_residuals;
    double max_vol = 0.0;
    double max_density = 0.0;
    double max_interior_density = 0.0;
};

Diagnostics diagnose(const SwapFunctions& fns, const SwaptionSmile& smile, int edge) {
    Diagnostics d;
    const double T = smile.maturity();
    // Peak density of the quoted smile, for relative residuals.
    double peak = 0.0;
    std::vector<DensityResidual> res;
    for (double k : smile.strikes()) {
        const double z_model = swaption_model_variance(fns, k);
        const double err = std::sqrt(z_model / T) - smile.vol(k);
        d.vol_errors.push_back(err);
        d.max_vol = std::max(d.max_vol, std::abs(err));
        res.push_back(swaption_density_residual(fns, smile, k));
        peak = std::max(peak, res.back().swaption_density);
    }
    const auto n = static_cast<int>(res.size());
    for (int i = 0; i < n; ++i) {
        const double rel = std::abs(res[i].residual / peak);
        d.density_residuals.push_back(res[i].residual / peak);
        d.max_density = std::max(d.max_density, rel);
        if (i >= edge && i < n - edge)
            d.max_interior_density = std::max(d.max_interior_density, rel);
    }
    return d;
}

double max_density_residual(const SwapFunctions& fns, const SwaptionSmile& smile, int edge) {
    double peak = 0.0;
    double worst = 0.0;
    const auto& ks = smile.strikes();
    const auto n = static_cast<int>(ks.size());
    for (int i = 0; i < n; ++i) {
        const DensityResidual r = swaption_density_residual(fns, smile, ks[i]);
        peak = std::max(peak, r.swaption_density);
        if (i >= edge && i < n - edge)
            worst = std::max(worst, std::abs(r.residual));
    }
    return worst / peak;
}

std::string trace_text(const CalibrationReport& r) {
    std::ostringstream msg;
    msg << "swaption calibration did not converge after " << r.iterations
        << " iterations; max vol error " << r.max_vol_error << ", max density residual "
        << r.max_density_residual << " (interior " << r.max_interior_density_residual
        << "); interior density residual trace:";
    for (double s : r.residual_trace)
        msg << ' ' << s;
    return msg.str();
}

} // namespace

CalibrationReport try_calibrate_w_from_swaptions(const DiscountCurve& curve,
                                                 const SwapInstrument& swap, double mu,
                                                 const SwaptionSmile& smile,
                                                 const VarianceSlice& init,
                                                 const CalibrationOptions& options) {
    require(options.n_nodes >= 3, ErrorKind::input, "calibration needs at least 3 nodes");
    require(options.density_edge_quotes >= 0, ErrorKind::input,
            "density edge quote count must be non-negative");
    require(options.damping > 0.0 && options.damping <= 1.0, ErrorKind::input,
            "calibration damping must lie in (0, 1]");
    require(std::abs(smile.maturity() - swap.fixing) < 1e-12, ErrorKind::input,
            "smile maturity must equal the swap fixing");
    const double T = swap.fixing;
    const double w_atm = init.eval(0.0).v;
    require(w_atm > 0.0, ErrorKind::domain, "initial w must be positive at x = 0");

    CalibrationReport rep;
    const int n = options.n_nodes;
    const double half = options.width_sd * std::sqrt(w_atm);
    std::vector<double> log_w(n);
    for (int j = 0; j < n; ++j) {
        rep.x_nodes.push_back(-half + 2.0 * half * j / (n - 1));
        const double w0 = init.eval(rep.x_nodes[j]).v;
        require(w0 > 0.0, ErrorKind::domain, "initial w must be positive on the node grid");
        log_w[j] = std::log(w0);
    }
    auto make_fns = [&](const std::vector<double>& lw) {
        std::vector<double> w(lw.size());
        std::transform(lw.begin(), lw.end(), w.begin(), [](double v) { return std::exp(v); });
        return SwapFunctions(curve, swap,
                             VarianceSlice::from_spline(T, math::NaturalCubicSpline(rep.x_nodes, w)),
                             mu, options.pricing);
    };

    bool stalled = false;
    for (int it = 0; it < options.max_iterations; ++it) {
        const SwapFunctions fns = make_fns(log_w);
        rep.residual_trace.push_back(max_density_residual(fns, smile, options.density_edge_quotes));
        double max_step = 0.0;
        std::vector<double> next = log_w;
        for (int j = 0; j < n; ++j) {
            const double K = fns(rep.x_nodes[j]).swap_rate;
            const double z_model =
                swaption_model_variance(fns, K);
            const double step = options.damping * (std::log(smile.z(K).v) - std::log(z_model));
            next[j] += step;
            max_step = std::max(max_step, std::abs(step));
        }
        log_w = std::move(next);
        rep.iterations = it + 1;
        rep.step_trace.push_back(max_step);
        if (max_step < options.step_tol) {
            stalled = true;
            break;
        }
    }

    const SwapFunctions fns = make_fns(log_w);
    rep.w_nodes.resize(n);
    std::transform(log_w.begin(), log_w.end(), rep.w_nodes.begin(),
                   [](double v) { return std::exp(v); });
    const Diagnostics d = diagnose(fns, smile, options.density_edge_quotes);
    rep.strikes = smile.strikes();
    rep.vol_errors = d.vol_errors;
    rep.density_residuals = d.density_residuals;
    rep.max_vol_error = d.max_vol;
    rep.max_density_residual = d.max_density;
    rep.max_interior_density_residual = d.max_interior_density;
    rep.converged =
        stalled && d.max_vol < options.vol_tol && d.max_interior_density < options.density_tol;
    rep.message = rep.converged ? "converged" : trace_text(rep);
    return rep;
}

CalibrationReport calibrate_w_from_swaptions(const DiscountCurve& curve, const SwapInstrument& swap,
                                             double mu, const SwaptionSmile& smile,
                                             const VarianceSlice& init,
                                             const CalibrationOptions& options) {
    CalibrationReport rep = try_calibrate_w_from_swaptions(curve, swap, mu, smile, init, options);
    if (!rep.converged)
        fail(ErrorKind::calibration, rep.message);
    return rep;
}

} // namespace cheyette
