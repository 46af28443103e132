#include "cheyette_lv/bachelier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cheyette_lv/errors.hpp"
#include "cheyette_lv/math/normal.hpp"

namespace cheyette {

void OptionQuote::validate() const {
    require(std::isfinite(forward) && std::isfinite(strike) && std::isfinite(maturity) &&
                std::isfinite(price),
            ErrorKind::domain, "option quote has non-finite fields");
    require(maturity > 0.0, ErrorKind::domain, "option maturity must be positive");
    require(price >= std::max(forward - strike, 0.0), ErrorKind::below_intrinsic,
            "option price below intrinsic value");
}

double bh_price(double forward, double strike, double maturity, double vol) {
    require(std::isfinite(forward) && std::isfinite(strike) && std::isfinite(maturity) &&
                std::isfinite(vol),
            ErrorKind::domain, "bh_price: non-finite input");
    require(maturity > 0.0, ErrorKind::domain, "bh_price: maturity must be positive");
    require(vol >= 0.0, ErrorKind::domain, "bh_price: negative volatility");
    return bh_price_from_variance(strike - forward, vol * vol * maturity);
}

double bh_price_from_variance(double k, double w) {
    require(std::isfinite(k) && std::isfinite(w), ErrorKind::domain,
            "bh_price_from_variance: non-finite input");
    require(w >= 0.0, ErrorKind::domain, "bh_price_from_variance: negative variance");
    const double intrinsic = std::max(-k, 0.0);
    if (w == 0.0)
        return intrinsic;
    const double s = std::sqrt(w);
    // Call = intrinsic + out-of-the-money value of the reflected strike.
    return intrinsic + s * math::otm_unit_value(std::abs(k) / s);
}

double implied_total_variance(double price, double k) {
    require(std::isfinite(price) && std::isfinite(k), ErrorKind::domain,
            "implied_total_variance: non-finite input");
    const double intrinsic = std::max(-k, 0.0);
    const double time_value = price - intrinsic;
    if (!(time_value > 0.0))
        fail(ErrorKind::below_intrinsic, "implied_total_variance: price not above intrinsic");
    const double ak = std::abs(k);

    auto model_tv = [&](double w) { return std::sqrt(w) * math::otm_unit_value(ak / std::sqrt(w)); };

    // Bracket ln w around the at-the-money guess w = 2 pi tv^2.
    const double guess = 2.0 * std::numbers::pi * time_value * time_value;
    double lo = std::log(guess);
    double hi = lo;
    while (model_tv(std::exp(hi)) < time_value) {
        hi += std::log(4.0);
        if (hi > 700.0)
            fail(ErrorKind::domain, "implied_total_variance: no finite root");
    }
    while (model_tv(std::exp(lo)) > time_value) {
        lo -= std::log(4.0);
        if (lo < -700.0)
            fail(ErrorKind::domain, "implied_total_variance: no positive root");
    }

    // Newton on ln(tv) as a function of ln w, safeguarded by the bracket.
    const double target = std::log(time_value);
    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double w = std::exp(x);
        const double s = std::sqrt(w);
        const double tv = model_tv(w);
        const double f = std::log(tv) - target;
        if (f == 0.0)
            return w;
        if (f > 0.0)
            hi = x;
        else
            lo = x;
        // d tv / d w = phi(d) / (2 sqrt w), so d ln tv / d ln w = w phi / (2 s tv).
        const double elasticity = s * math::norm_pdf(ak / s) / (2.0 * tv);
        double next = x - f / elasticity;
        if (!(elasticity > 0.0) || !(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        if (std::abs(next - x) < 1e-15 || hi - lo < 1e-15) {
            x = next;
            break;
        }
        x = next;
    }
    return std::exp(x);
}

double implied_total_variance_otm(double otm_price, double k) {
    return implied_total_variance(otm_price, std::abs(k));
}

double gaussian_density_p(double k, double w) {
    require(w > 0.0, ErrorKind::domain, "gaussian_density_p: variance must be positive");
    return math::inv_sqrt_2pi / std::sqrt(w) * std::exp(-0.5 * k * k / w);
}

double density_ratio(const SmilePoint& pt) {
    require(pt.w > 0.0, ErrorKind::domain, "density_ratio: variance must be positive");
    const double skew = 1.0 - pt.k * pt.dw_dk / (2.0 * pt.w);
    return skew * skew + 0.5 * (pt.d2w_dk2 - pt.dw_dk * pt.dw_dk / (2.0 * pt.w));
}

double c_minus_k_dkc(const SmilePoint& pt) {
    return gaussian_density_p(pt.k, pt.w) * (pt.w - 0.5 * pt.k * pt.dw_dk);
}

double dT_price(const SmilePoint& pt) {
    return 0.5 * gaussian_density_p(pt.k, pt.w) * pt.dw_dT;
}

double dk_price(const SmilePoint& pt) {
    const double p = gaussian_density_p(pt.k, pt.w);
    return -math::norm_cdf(-pt.k / std::sqrt(pt.w)) + 0.5 * p * pt.dw_dk;
}

double dkk_price(const SmilePoint& pt) {
    return gaussian_density_p(pt.k, pt.w) * density_ratio(pt);
}

} // namespace cheyette
