#pragma once

#include <functional>
#include <vector>

#include "cheyette_lv/variance_surface.hpp"

namespace cheyette {

/// Two-factor loading V = [[alpha, 0], [rho beta, sqrt(1-rho^2) beta]] with
/// beta fixed by the normalization alpha^2 + 2 rho alpha beta + beta^2 = 1.
struct CheyetteParams2F {
    double mu1 = 0.0;
    double mu2 = 0.0;
    double alpha = 1.0;
    double beta = 0.0;
    double rho = 0.0;

    /// Solves the normalization for beta > 0; throws if no positive root exists.
    static CheyetteParams2F from_alpha_rho(double alpha, double rho, double mu1, double mu2);

    /// Throws unless rho in [-1, 1], alpha > 0, beta >= 0, mus >= 0 and the
    /// normalization holds to 1e-12.
    void validate() const;

    /// Covariance loading V V^T as (c11, c22, c12).
    double c11() const { return alpha * alpha; }
    double c22() const { return beta * beta; }
    double c12() const { return rho * alpha * beta; }
};

struct TwoFactorConstants {
    double gamma = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double a_const = 0.0;
    double b_const = 0.0;
};

/// ATM total variance w(t) and its derivative. Kinks or jumps of dw/dt should
/// be listed in `breakpoints` so quadratures split there.
struct AtmTermStructure {
    std::function<double(double)> w;
    std::function<double(double)> dw_dt;
    std::vector<double> breakpoints;

    static AtmTermStructure from_surface(const VarianceSurface& surface);
    static AtmTermStructure flat_vol(double sigma);
    /// Exact ATM variance of the Gaussian two-factor model with piecewise
    /// constant sigma(t): sigma = vols[i] on [times[i-1], times[i]), times[-1]=0,
    /// last value extended beyond the final time.
    static AtmTermStructure gaussian_model(const CheyetteParams2F& params,
                                           std::vector<double> times, std::vector<double> vols);
};

double u_func(const AtmTermStructure& ts, double mu1, double mu2, double t);

TwoFactorConstants constants(const CheyetteParams2F& params);

struct YState2F {
    double y1 = 0.0; // y11
    double y2 = 0.0; // y22
    double y3 = 0.0; // y12
};

/// Explicit y1, y2 from the exponential-kernel integrals of u(t); y3 from
/// w = y1 + 2 y3 + y2.
YState2F y_closed_form(const CheyetteParams2F& params, const AtmTermStructure& ts, double T);

/// Effective mean reversion from the kernel integral of u(t).
double mu_eff(const CheyetteParams2F& params, const AtmTermStructure& ts, double T);

/// (mu1 + mu2)/2 + (mu1 - mu2)(y1 - y2)/(2 w) from y_closed_form.
double mu_eff_from_y(const CheyetteParams2F& params, const AtmTermStructure& ts, double T);

} // namespace cheyette
