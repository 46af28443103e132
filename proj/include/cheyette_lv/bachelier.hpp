#pragma once

// Bachelier (normal-model) pricing in total-variance form and the strike /
// maturity calculus of the undiscounted call price C(T,k) = BH(k, w(T,k)).
//
// Strikes are shifted by the forward (k = K - f0(T)); all prices are
// undiscounted.

namespace cheyette {

struct OptionQuote {
    double forward = 0.0;
    double strike = 0.0;
    double maturity = 0.0;
    double price = 0.0;

    /// Throws on maturity <= 0 or price below (forward - strike)+.
    void validate() const;
};

/// A point of the total-variance smile w(T,k) together with its derivatives.
struct SmilePoint {
    double k = 0.0;
    double w = 0.0;
    double dw_dk = 0.0;
    double d2w_dk2 = 0.0;
    double dw_dT = 0.0;
};

double bh_price(double forward, double strike, double maturity, double vol);

/// BH(k, w): undiscounted call on a zero-mean normal with variance w.
double bh_price_from_variance(double k, double w);

/// Inverse of bh_price_from_variance in w. Requires price > (-k)+.
double implied_total_variance(double price, double k);

/// Inverse from the out-of-the-money price: a call for k >= 0, a put for k < 0.
/// Puts are inverted through the symmetry put(k) = call(-k), which keeps the
/// time value exact where an in-the-money call price would round it away.
double implied_total_variance_otm(double otm_price, double k);

/// Normal(0, w) density at k.
double gaussian_density_p(double k, double w);

/// d2C/dk2 divided by gaussian_density_p along the smile.
double density_ratio(const SmilePoint& point);

/// C - k dC/dk along the smile.
double c_minus_k_dkc(const SmilePoint& point);

/// dC/dT along the smile: (1/2) p dw/dT.
double dT_price(const SmilePoint& point);

/// dC/dk along the smile: -Phi(-k/sqrt(w)) + (1/2) p dw/dk.
double dk_price(const SmilePoint& point);

/// d2C/dk2 along the smile (the implied density of the underlying).
double dkk_price(const SmilePoint& point);

} // namespace cheyette
