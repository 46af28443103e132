#pragma once

#include <vector>

// Exact analytics for a linear total-variance smile w(x) = a + b x. The
// substitution u = a + b x turns the implied density into an inverse Gaussian
// law IG(mean a, shape a^2/b^2), whose truncated moments give the model-free
// part of E[x (x-k)+] in closed form.

namespace cheyette {

struct IGParams {
    double a = 1.0; // mean, variance units
    double b = 0.1; // smile slope, variance per unit strike; sign allowed

    double shape() const { return a * a / (b * b); }
    void validate() const;
};

double ig_pdf(double u, const IGParams& params);

/// P(tau > x).
double ig_survival(double x, const IGParams& params);
/// E[tau 1{tau > x}].
double ig_trunc_m1(double x, const IGParams& params);
/// E[tau^2 1{tau > x}].
double ig_trunc_m2(double x, const IGParams& params);

/// E[x (x-k)+] under the linear smile.
double linear_smile_call_moment(double k, const IGParams& params);

/// Exact adjusted A = E[x(x-k)+] - E[(eps + w(x)) theta(x-k)] with eps = b^2/2.
double a_exact_linear(double k, const IGParams& params);

/// E[x^2] - E[w(x)] under the linear smile, by its closed form b^2 / 2.
double linear_smile_adjustment(const IGParams& params);

enum class ExpansionForm {
    cubic,                 // (1/2) b (a + b k + b^2)
    strike_weighted_cubic  // (1/2)(a + b k) b + (1/2) b^3 k
};

double expansion_value(double k, const IGParams& params, ExpansionForm form);

/// |A / p(k) - expansion|.
double expansion_error(double k, const IGParams& params,
                       ExpansionForm form = ExpansionForm::cubic);

struct ExpansionOrderRow {
    double b = 0.0;
    double error = 0.0;
    double ratio = 0.0; // previous error / this error; 0 for the first row
};

/// Errors at successive slopes (typically halving) for the order test.
std::vector<ExpansionOrderRow> expansion_order_table(double a, double k,
                                                     const std::vector<double>& slopes,
                                                     ExpansionForm form);

} // namespace cheyette
