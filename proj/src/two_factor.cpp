#include "cheyette_lv/two_factor.hpp"

#include <algorithm>
#include <cmath>

#include "cheyette_lv/errors.hpp"
#include "cheyette_lv/math/quadrature.hpp"

namespace cheyette {

CheyetteParams2F CheyetteParams2F::from_alpha_rho(double alpha, double rho, double mu1, double mu2) {
    require(alpha > 0.0, ErrorKind::domain, "alpha must be positive");
    require(rho >= -1.0 && rho <= 1.0, ErrorKind::domain, "rho must lie in [-1, 1]");
    // beta^2 + 2 rho alpha beta + alpha^2 - 1 = 0, larger root.
    const double disc = rho * rho * alpha * alpha - alpha * alpha + 1.0;
    require(disc >= 0.0, ErrorKind::domain, "normalization has no real beta");
    const double beta = -rho * alpha + std::sqrt(disc);
    require(beta >= 0.0, ErrorKind::domain, "normalization has no non-negative beta");
    CheyetteParams2F p{mu1, mu2, alpha, beta, rho};
    p.validate();
    return p;
}

void CheyetteParams2F::validate() const {
    require(rho >= -1.0 && rho <= 1.0, ErrorKind::domain, "rho must lie in [-1, 1]");
    require(alpha > 0.0 && beta >= 0.0, ErrorKind::domain, "alpha must be positive, beta non-negative");
    require(mu1 >= 0.0 && mu2 >= 0.0, ErrorKind::domain, "mean reversions must be non-negative");
    const double norm = alpha * alpha + 2.0 * rho * alpha * beta + beta * beta;
    require(std::abs(norm - 1.0) <= 1e-12, ErrorKind::domain,
            "loadings violate alpha^2 + 2 rho alpha beta + beta^2 = 1");
}

AtmTermStructure AtmTermStructure::from_surface(const VarianceSurface& surface) {
    return {[surface](double t) { return t > 0.0 ? surface.eval(t, 0.0).w : 0.0; },
            [surface](double t) { return surface.eval(std::max(t, 1e-12), 0.0).dw_dT; },
            {}};
}

AtmTermStructure AtmTermStructure::flat_vol(double sigma) {
    const double s2 = sigma * sigma;
    return {[s2](double t) { return s2 * t; }, [s2](double) { return s2; }, {}};
}

namespace {

// (1 - e^{-r t}) / r, continuous at r = 0.
double decay_integral(double r, double t) {
    return r == 0.0 ? t : -std::expm1(-r * t) / r;
}

// (e^h - 1) / h, continuous at h = 0.
double exprel(double h) {
    return std::abs(h) < 1e-8 ? 1.0 + 0.5 * h : std::expm1(h) / h;
}

} // namespace

AtmTermStructure AtmTermStructure::gaussian_model(const CheyetteParams2F& params,
                                                  std::vector<double> times,
                                                  std::vector<double> vols) {
    params.validate();
    require(!vols.empty() && vols.size() == times.size(), ErrorKind::input,
            "piecewise vol needs one value per breakpoint");
    for (std::size_t i = 0; i < times.size(); ++i)
        require(times[i] > 0.0 && (i == 0 || times[i] > times[i - 1]), ErrorKind::invalid_grid,
                "vol breakpoints must be positive and increasing");

    // Exact y propagation over constant-vol pieces.
    auto state = [params, times, vols](double t) {
        YState2F y;
        double start = 0.0;
        const double r1 = 2.0 * params.mu1;
        const double r2 = 2.0 * params.mu2;
        const double r3 = params.mu1 + params.mu2;
        for (std::size_t i = 0; i < vols.size() && start < t; ++i) {
            const double end = (i + 1 == vols.size()) ? t : std::min(t, times[i]);
            const double dt = end - start;
            const double s2 = vols[i] * vols[i];
            y.y1 = y.y1 * std::exp(-r1 * dt) + params.c11() * s2 * decay_integral(r1, dt);
            y.y2 = y.y2 * std::exp(-r2 * dt) + params.c22() * s2 * decay_integral(r2, dt);
            y.y3 = y.y3 * std::exp(-r3 * dt) + params.c12() * s2 * decay_integral(r3, dt);
            start = end;
        }
        return y;
    };
    auto sigma2 = [times, vols](double t) {
        for (std::size_t i = 0; i < times.size(); ++i)
            if (t < times[i])
                return vols[i] * vols[i];
        return vols.back() * vols.back();
    };
    auto w = [state](double t) {
        const YState2F y = state(t);
        return y.y1 + 2.0 * y.y3 + y.y2;
    };
    // Summing the three y-equations: dw/dt = sigma^2 - 2 mu1 y1 - 2(mu1+mu2) y3 - 2 mu2 y2.
    auto dw = [state, sigma2, params](double t) {
        const YState2F y = state(t);
        return sigma2(t) - 2.0 * params.mu1 * y.y1 - 2.0 * (params.mu1 + params.mu2) * y.y3 -
               2.0 * params.mu2 * y.y2;
    };
    std::vector<double> cuts(times.begin(), times.end() - 1);
    return {w, dw, cuts};
}

double u_func(const AtmTermStructure& ts, double mu1, double mu2, double t) {
    require(t >= 0.0, ErrorKind::domain, "u_func: time must be non-negative");
    return ts.dw_dt(t) + (mu1 + mu2) * ts.w(t);
}

TwoFactorConstants constants(const CheyetteParams2F& p) {
    p.validate();
    const double ab = p.alpha * p.beta;
    const double radicand = (1.0 + 2.0 * p.rho * ab) * (1.0 + 2.0 * p.rho * ab) - 4.0 * ab * ab;
    if (radicand < -1e-14)
        fail(ErrorKind::domain, "gamma radicand negative: |2 alpha beta| > 1 + 2 rho alpha beta");
    TwoFactorConstants c;
    c.gamma = std::sqrt(std::max(radicand, 0.0));
    const double a2 = p.alpha * p.alpha;
    const double b2 = p.beta * p.beta;
    const double dmu = p.mu1 - p.mu2;
    c.lambda1 = p.mu1 + p.mu2 + (b2 - a2) * dmu / 2.0 + c.gamma * dmu / 2.0;
    c.lambda2 = c.lambda1 - c.gamma * dmu;
    c.a_const = (a2 - b2) * (a2 - b2) - 2.0 * (a2 + b2);
    c.b_const = a2 - b2;
    return c;
}

namespace {

// Kernels at s = t - T <= 0:
//   sum  = e^{lambda1 s} + e^{lambda2 s}
//   diff = (e^{lambda1 s} - e^{lambda2 s}) / gamma
// The difference is written through exprel so gamma -> 0 or mu1 = mu2 stay finite.
struct Kernels {
    double sum;
    double diff;
};

Kernels kernels(const CheyetteParams2F& p, const TwoFactorConstants& c, double s) {
    const double e2 = std::exp(c.lambda2 * s);
    const double h = (c.lambda1 - c.lambda2) * s; // = gamma (mu1 - mu2) s
    const double diff = e2 * (p.mu1 - p.mu2) * s * exprel(h);
    return {std::exp(c.lambda1 * s) + e2, diff};
}

double kernel_integral(const CheyetteParams2F& p, const AtmTermStructure& ts, double T,
                       const std::function<double(const Kernels&)>& combine) {
    const TwoFactorConstants c = constants(p);
    auto integrand = [&](double t) {
        return combine(kernels(p, c, t - T)) * u_func(ts, p.mu1, p.mu2, t);
    };
    return math::integrate_gauss_legendre_refined(integrand, 0.0, T, ts.breakpoints, 32.0, 1e-10,
                                                  1e-300);
}

} // namespace

YState2F y_closed_form(const CheyetteParams2F& p, const AtmTermStructure& ts, double T) {
    require(T > 0.0, ErrorKind::domain, "y_closed_form: maturity must be positive");
    const double a2 = p.alpha * p.alpha;
    const double b2 = p.beta * p.beta;
    // alpha^2/(2 gamma) [e1 (gamma + b2 - a2 + 2) + e2 (gamma - b2 + a2 - 2)]
    //   = alpha^2/2 [sum + (b2 - a2 + 2) diff]
    const double c1 = b2 - a2 + 2.0;
    const double c2 = b2 - a2 - 2.0;
    YState2F y;
    y.y1 = 0.5 * a2 * kernel_integral(p, ts, T, [c1](const Kernels& k) { return k.sum + c1 * k.diff; });
    y.y2 = 0.5 * b2 * kernel_integral(p, ts, T, [c2](const Kernels& k) { return k.sum + c2 * k.diff; });
    y.y3 = 0.5 * (ts.w(T) - y.y1 - y.y2);
    return y;
}

double mu_eff(const CheyetteParams2F& p, const AtmTermStructure& ts, double T) {
    const double w = ts.w(T);
    require(w > 0.0, ErrorKind::domain, "mu_eff: ATM variance must be positive");
    const TwoFactorConstants c = constants(p);
    // (1/(2 gamma)) [e2 (a + gamma b) - e1 (a - gamma b)] = (b/2) sum - (a/2) diff
    const double integral = kernel_integral(p, ts, T, [&c](const Kernels& k) {
        return 0.5 * c.b_const * k.sum - 0.5 * c.a_const * k.diff;
    });
    return 0.5 * (p.mu1 + p.mu2) + (p.mu1 - p.mu2) / (2.0 * w) * integral;
}

double mu_eff_from_y(const CheyetteParams2F& p, const AtmTermStructure& ts, double T) {
    const double w = ts.w(T);
    require(w > 0.0, ErrorKind::domain, "mu_eff: ATM variance must be positive");
    const YState2F y = y_closed_form(p, ts, T);
    return 0.5 * (p.mu1 + p.mu2) + 0.5 * (p.mu1 - p.mu2) * (y.y1 - y.y2) / w;
}

} // namespace cheyette
