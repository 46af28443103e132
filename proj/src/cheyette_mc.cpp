#include "cheyette_lv/cheyette_mc.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "cheyette_lv/bachelier.hpp"
#include "cheyette_lv/errors.hpp"
#include "cheyette_lv/math/philox.hpp"

namespace cheyette {

void MCConfig::validate() const {
    require(n_paths >= 2, ErrorKind::input, "MC: n_paths must be at least 2");
    require(steps_per_year >= 12, ErrorKind::input, "MC: steps_per_year must be at least 12");
    require(!antithetic || n_paths % 2 == 0, ErrorKind::input,
            "MC: antithetic sampling needs an even path count");
}

PathEnsemble1F PathEnsemble2F::short_rate() const {
    PathEnsemble1F e;
    e.maturity = maturity;
    e.antithetic = antithetic;
    e.x.resize(x1.size());
    e.y.resize(x1.size());
    for (std::size_t i = 0; i < x1.size(); ++i) {
        e.x[i] = x1[i] + x2[i];
        e.y[i] = y11[i] + 2.0 * y12[i] + y22[i];
    }
    return e;
}

namespace {

double decay_fraction(double rate, double dt) {
    return rate == 0.0 ? dt : -std::expm1(-rate * dt) / rate;
}

double g_factor(double mu, double tau) {
    return mu == 0.0 ? tau : -std::expm1(-mu * tau) / mu;
}

struct StepGrid {
    int n_steps;
    double dt;
};

StepGrid make_steps(double T, int steps_per_year) {
    const int n = std::max(1, static_cast<int>(std::ceil(T * steps_per_year - 1e-9)));
    return {n, T / n};
}

[[noreturn]] void blowup(std::size_t path, int step, double t) {
    std::ostringstream msg;
    msg << "MC: non-finite state on path " << path << " at step " << step << " (t=" << t << ")";
    fail(ErrorKind::simulation_blowup, msg.str());
}

// Runs body(unit) for unit in [0, n_units) over contiguous chunks. Each unit
// writes only its own output slots, so the result is independent of the split.
// The error reported is the one from the lowest failing unit.
template <class Body>
void parallel_units(std::size_t n_units, unsigned workers, Body body) {
    if (workers == 0)
        workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n_units, 1)));
    std::vector<std::exception_ptr> errors(workers);
    auto run_chunk = [&](unsigned w) {
        const std::size_t lo = n_units * w / workers;
        const std::size_t hi = n_units * (w + 1) / workers;
        try {
            for (std::size_t u = lo; u < hi; ++u)
                body(u);
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    if (workers == 1) {
        run_chunk(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(run_chunk, w);
        for (auto& th : pool)
            th.join();
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace

PathEnsemble1F simulate_1f(const CheyetteParams1F& params, const LocalVolSurface& lv, double T,
                           const MCConfig& config) {
    params.validate();
    config.validate();
    require(T > 0.0, ErrorKind::domain, "MC: maturity must be positive");
    const StepGrid grid = make_steps(T, config.steps_per_year);
    const double mu = params.mu;
    const double dt = grid.dt;
    const double sqrt_dt = std::sqrt(dt);
    const double y_keep = std::exp(-2.0 * mu * dt);
    const double y_gain = decay_fraction(2.0 * mu, dt);

    PathEnsemble1F out;
    out.maturity = T;
    out.antithetic = config.antithetic;
    out.x.assign(config.n_paths, 0.0);
    out.y.assign(config.n_paths, 0.0);

    const math::Philox4x32 gen(config.seed);
    const int copies = config.antithetic ? 2 : 1;
    const std::size_t n_units = config.n_paths / copies;

    parallel_units(n_units, config.workers, [&](std::size_t unit) {
        double x[2] = {0.0, 0.0};
        double y[2] = {0.0, 0.0};
        std::array<double, 2> z{};
        for (int j = 0; j < grid.n_steps; ++j) {
            if (j % 2 == 0)
                z = math::normal_pair(gen, unit, static_cast<std::uint32_t>(j / 2));
            const double dw = z[j % 2] * sqrt_dt;
            const double t = j * dt;
            const double g = g_factor(mu, T - t);
            for (int c = 0; c < copies; ++c) {
                const double s2 = lv.variance(t, x[c]);
                const double sign = c == 0 ? 1.0 : -1.0;
                x[c] += (y[c] - mu * x[c] - s2 * g) * dt + std::sqrt(s2) * sign * dw;
                y[c] = y[c] * y_keep + s2 * y_gain;
                if (!std::isfinite(x[c]) || !std::isfinite(y[c]))
                    blowup(unit * copies + c, j + 1, t + dt);
            }
        }
        for (int c = 0; c < copies; ++c) {
            out.x[unit * copies + c] = x[c];
            out.y[unit * copies + c] = y[c];
        }
    });
    return out;
}

PathEnsemble2F simulate_2f(const CheyetteParams2F& params, const LocalVolSurface& lv, double T,
                           const MCConfig& config) {
    params.validate();
    config.validate();
    require(T > 0.0, ErrorKind::domain, "MC: maturity must be positive");
    const StepGrid grid = make_steps(T, config.steps_per_year);
    const double dt = grid.dt;
    const double sqrt_dt = std::sqrt(dt);
    const double mu1 = params.mu1;
    const double mu2 = params.mu2;
    const double keep11 = std::exp(-2.0 * mu1 * dt), gain11 = decay_fraction(2.0 * mu1, dt);
    const double keep22 = std::exp(-2.0 * mu2 * dt), gain22 = decay_fraction(2.0 * mu2, dt);
    const double keep12 = std::exp(-(mu1 + mu2) * dt), gain12 = decay_fraction(mu1 + mu2, dt);
    const double c11 = params.c11(), c22 = params.c22(), c12 = params.c12();
    // V = [[alpha, 0], [rho beta, sqrt(1 - rho^2) beta]]
    const double v21 = params.rho * params.beta;
    const double v22 = std::sqrt(std::max(0.0, 1.0 - params.rho * params.rho)) * params.beta;

    PathEnsemble2F out;
    out.maturity = T;
    out.antithetic = config.antithetic;
    for (auto* v : {&out.x1, &out.x2, &out.y11, &out.y22, &out.y12})
        v->assign(config.n_paths, 0.0);

    const math::Philox4x32 gen(config.seed);
    const int copies = config.antithetic ? 2 : 1;
    const std::size_t n_units = config.n_paths / copies;

    parallel_units(n_units, config.workers, [&](std::size_t unit) {
        double x1[2] = {0, 0}, x2[2] = {0, 0};
        double y11[2] = {0, 0}, y22[2] = {0, 0}, y12[2] = {0, 0};
        for (int j = 0; j < grid.n_steps; ++j) {
            const auto z = math::normal_pair(gen, unit, static_cast<std::uint32_t>(j));
            const double t = j * dt;
            const double g1 = g_factor(mu1, T - t);
            const double g2 = g_factor(mu2, T - t);
            for (int c = 0; c < copies; ++c) {
                const double sign = c == 0 ? 1.0 : -1.0;
                const double s2 = lv.variance(t, x1[c] + x2[c]);
                const double s = std::sqrt(s2);
                const double dw1 = sign * z[0] * sqrt_dt;
                const double dw2 = sign * z[1] * sqrt_dt;
                const double drift1 = y11[c] + y12[c] - mu1 * x1[c] - s2 * (c11 * g1 + c12 * g2);
                const double drift2 = y12[c] + y22[c] - mu2 * x2[c] - s2 * (c12 * g1 + c22 * g2);
                x1[c] += drift1 * dt + s * params.alpha * dw1;
                x2[c] += drift2 * dt + s * (v21 * dw1 + v22 * dw2);
                y11[c] = y11[c] * keep11 + c11 * s2 * gain11;
                y22[c] = y22[c] * keep22 + c22 * s2 * gain22;
                y12[c] = y12[c] * keep12 + c12 * s2 * gain12;
                if (!std::isfinite(x1[c]) || !std::isfinite(x2[c]) || !std::isfinite(y11[c]) ||
                    !std::isfinite(y22[c]) || !std::isfinite(y12[c]))
                    blowup(unit * copies + c, j + 1, t + dt);
            }
        }
        for (int c = 0; c < copies; ++c) {
            const std::size_t i = unit * copies + c;
            out.x1[i] = x1[c];
            out.x2[i] = x2[c];
            out.y11[i] = y11[c];
            out.y22[i] = y22[c];
            out.y12[i] = y12[c];
        }
    });
    return out;
}

namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace

Estimate sample_mean(std::span<const double> values, bool paired) {
    require(!values.empty(), ErrorKind::input, "sample mean of an empty ensemble");
    const std::size_t step = paired ? 2 : 1;
    require(values.size() % step == 0, ErrorKind::input, "paired samples need an even count");
    const std::size_t n = values.size() / step;
    auto unit = [&](std::size_t u) {
        return paired ? 0.5 * (values[2 * u] + values[2 * u + 1]) : values[u];
    };
    CompensatedSum sum;
    for (std::size_t u = 0; u < n; ++u)
        sum.add(unit(u));
    const double mean = sum.value() / static_cast<double>(n);
    CompensatedSum sq;
    for (std::size_t u = 0; u < n; ++u) {
        const double d = unit(u) - mean;
        sq.add(d * d);
    }
    const double var = n > 1 ? sq.value() / static_cast<double>(n - 1) : 0.0;
    return {mean, std::sqrt(var / static_cast<double>(n))};
}

namespace {

template <class F>
Estimate mean_of(const PathEnsemble1F& e, F f) {
    require(e.size() > 0, ErrorKind::input, "empty ensemble");
    std::vector<double> v(e.size());
    for (std::size_t i = 0; i < e.size(); ++i)
        v[i] = f(e.x[i], e.y[i]);
    return sample_mean(v, e.antithetic);
}

} // namespace

Estimate price_short_rate_option(const PathEnsemble1F& ensemble, double k) {
    return mean_of(ensemble, [k](double x, double) { return std::max(x - k, 0.0); });
}

Estimate price_short_rate_put(const PathEnsemble1F& ensemble, double k) {
    return mean_of(ensemble, [k](double x, double) { return std::max(k - x, 0.0); });
}

std::vector<SmileEstimate> mc_implied_smile(const PathEnsemble1F& ensemble,
                                            std::span<const double> strikes) {
    std::vector<SmileEstimate> out;
    out.reserve(strikes.size());
    const double T = ensemble.maturity;
    for (double k : strikes) {
        SmileEstimate s;
        s.k = k;
        const Estimate otm =
            k >= 0.0 ? price_short_rate_option(ensemble, k) : price_short_rate_put(ensemble, k);
        if (otm.value > 0.0) {
            try {
                const double w = implied_total_variance_otm(otm.value, k);
                s.vol = std::sqrt(w / T);
                // dC = (1/2) p dw and dw = 2 T vol dvol
                s.band = otm.std_error / (gaussian_density_p(k, w) * T * s.vol);
                s.valid = true;
            } catch (const Error&) {
                s.valid = false;
            }
        }
        out.push_back(s);
    }
    return out;
}

AEstimate estimate_A(const PathEnsemble1F& ensemble, double k) {
    AEstimate r;
    const Estimate xc =
        mean_of(ensemble, [k](double x, double) { return x * std::max(x - k, 0.0); });
    const Estimate yt = mean_of(ensemble, [k](double x, double y) { return x > k ? y : 0.0; });
    const Estimate a = mean_of(ensemble, [k](double x, double y) {
        return x * std::max(x - k, 0.0) - (x > k ? y : 0.0);
    });
    r.e_x_call = xc.value;
    r.se_x_call = xc.std_error;
    r.e_y_theta = yt.value;
    r.se_y_theta = yt.std_error;
    r.a = a.value;
    r.se_a = a.std_error;
    return r;
}

} // namespace cheyette
