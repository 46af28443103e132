#include "cheyette_lv/ig_analytics.hpp"

#include <cmath>

#include "cheyette_lv/bachelier.hpp"
#include "cheyette_lv/errors.hpp"
#include "cheyette_lv/math/normal.hpp"

namespace cheyette {

void IGParams::validate() const {
    require(std::isfinite(a) && a > 0.0, ErrorKind::domain, "IG mean must be positive");
    require(std::isfinite(b) && b != 0.0, ErrorKind::domain, "IG slope must be non-zero");
}

double ig_pdf(double u, const IGParams& params) {
    params.validate();
    require(u > 0.0, ErrorKind::domain, "ig_pdf: argument must be positive");
    const double a = params.a;
    const double b = std::abs(params.b);
    const double z = (u - a) / (b * std::sqrt(u));
    return (a / b) * math::inv_sqrt_2pi / (u * std::sqrt(u)) * std::exp(-0.5 * z * z);
}

namespace {

struct TailTerms {
    double upper; // Phi(-delta1)
    double mirror; // e^{2a/b^2} Phi(delta2), finite for any slope
};

TailTerms tail_terms(double x, const IGParams& p) {
    const double a = p.a;
    const double b = std::abs(p.b);
    const double root = std::sqrt(x);
    const double delta1 = a / (b * root) * (x / a - 1.0);
    const double delta2 = -a / (b * root) * (x / a + 1.0);
    // 2a/b^2 - delta2^2/2 = -delta1^2/2, so the product never overflows.
    const double mirror = std::exp(-0.5 * delta1 * delta1) * math::scaled_norm_cdf(delta2);
    return {math::norm_cdf(-delta1), mirror};
}

} // namespace

double ig_survival(double x, const IGParams& params) {
    params.validate();
    if (x <= 0.0)
        return 1.0;
    const auto t = tail_terms(x, params);
    return t.upper - t.mirror;
}

double ig_trunc_m1(double x, const IGParams& params) {
    params.validate();
    if (x <= 0.0)
        return params.a;
    const auto t = tail_terms(x, params);
    return params.a * (t.upper + t.mirror);
}

double ig_trunc_m2(double x, const IGParams& params) {
    params.validate();
    const double a = params.a;
    const double b2 = params.b * params.b;
    if (x <= 0.0)
        return a * a + a * b2;
    // Integrating d(u^2 g) over (x, inf) and using u^2 g' = g (lambda/2 - 3u/2 - lambda u^2/(2a^2))
    // with lambda = a^2/b^2 gives the recurrence below.
    return b2 * ig_trunc_m1(x, params) + a * a * ig_survival(x, params) +
           2.0 * b2 * x * x * ig_pdf(x, params);
}

double linear_smile_adjustment(const IGParams& params) {
    params.validate();
    return 0.5 * params.b * params.b;
}

double linear_smile_call_moment(double k, const IGParams& params) {
    params.validate();
    const double a = params.a;
    const double b = params.b;
    if (b > 0.0) {
        const double x = a + b * k;
        require(x > 0.0, ErrorKind::domain, "linear smile: a + b k must be positive");
        return 0.5 * ig_trunc_m1(x, params) + ig_trunc_m2(x, params) / (2.0 * a);
    }
    // Negative slope: -x has slope -b. With X = -x, k' = -k,
    // E[x(x-k)+] = E[X^2] - E[X (X-k')+], and E[X^2] = a + b^2/2.
    const IGParams mirrored{a, -b};
    return a + 0.5 * b * b - linear_smile_call_moment(-k, mirrored);
}

double a_exact_linear(double k, const IGParams& params) {
    params.validate();
    const double w = params.a + params.b * k;
    require(w > 0.0, ErrorKind::domain, "a_exact_linear: a + b k must be positive");
    const SmilePoint pt{k, w, params.b, 0.0, 0.0};
    // E[(eps + a + b x) theta(x-k)] = -(eps + a + b k) C_k + b C by parts.
    const double eps = linear_smile_adjustment(params);
    const double call = bh_price_from_variance(k, w);
    const double theta_term = -(eps + w) * dk_price(pt) + params.b * call;
    return linear_smile_call_moment(k, params) - theta_term;
}

double expansion_value(double k, const IGParams& params, ExpansionForm form) {
    const double a = params.a;
    const double b = params.b;
    switch (form) {
    case ExpansionForm::cubic:
        return 0.5 * b * (a + b * k + b * b);
    case ExpansionForm::strike_weighted_cubic:
        return 0.5 * (a + b * k) * b + 0.5 * b * b * b * k;
    }
    return 0.0;
}

double expansion_error(double k, const IGParams& params, ExpansionForm form) {
    if (params.b == 0.0)
        return 0.0;
    const double w = params.a + params.b * k;
    const double p = gaussian_density_p(k, w);
    return std::abs(a_exact_linear(k, params) / p - expansion_value(k, params, form));
}

std::vector<ExpansionOrderRow> expansion_order_table(double a, double k,
                                                     const std::vector<double>& slopes,
                                                     ExpansionForm form) {
    std::vector<ExpansionOrderRow> rows;
    for (double b : slopes) {
        ExpansionOrderRow row{b, expansion_error(k, IGParams{a, b}, form), 0.0};
        if (!rows.empty())
            row.ratio = rows.back().error / row.error;
        rows.push_back(row);
    }
    return rows;
}

} // namespace cheyette
