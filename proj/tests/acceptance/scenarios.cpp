#include "scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cheyette_lv/bachelier.hpp"
#include "cheyette_lv/cheyette_mc.hpp"
#include "cheyette_lv/io.hpp"
#include "cheyette_lv/local_vol.hpp"
#include "cheyette_lv/swaption_calib.hpp"
#include "cheyette_lv/variance_surface.hpp"

using namespace cheyette;

namespace acceptance {

namespace {

std::string num(double v) { return io::format_double(v); }

MCConfig mc_config(unsigned workers) {
    MCConfig c;
    c.n_paths = 200000;
    c.steps_per_year = 96;
    c.seed = 20240611;
    c.antithetic = true;
    c.workers = workers;
    return c;
}

} // namespace

Outcome gaussian_benchmark(unsigned workers) {
    const double sigma0 = 0.01;
    const double mu = 0.5;
    const double T = 10.0;
    const double w = sigma0 * sigma0 * (1.0 - std::exp(-2.0 * mu * T)) / (2.0 * mu);
    const PathEnsemble1F ens =
        simulate_1f({mu}, LocalVolSurface::constant(sigma0), T, mc_config(workers));

    Outcome out;
    out.pass = true;
    std::ostringstream art;
    art << "k,mc_price,se,bachelier\n";
    double worst = 0.0;
    for (int j = -4; j <= 4; ++j) {
        const double k = 0.5 * j * std::sqrt(w);
        const Estimate e = price_short_rate_option(ens, k);
        const double exact = bh_price_from_variance(k, w);
        const double z = std::abs(e.value - exact) / e.std_error;
        worst = std::max(worst, z);
        out.pass = out.pass && z <= 4.0;
        art << num(k) << ',' << num(e.value) << ',' << num(e.std_error) << ',' << num(exact) << '\n';
    }
    std::ostringstream d;
    d << "max |mc - exact| = " << worst << " s.e. over 9 strikes (bound 4)";
    out.detail = d.str();
    out.artifact = art.str();
    return out;
}

RoundTrip smile_round_trip(unsigned workers) {
    const double sigma0 = 0.01;
    const double mu = 0.03;
    const double T = 10.0;
    const VarianceSurface surface = synthetic_skew(sigma0, 0.2);
    LocalVolGridSpec spec;
    spec.t_max = T;
    const LocalVolSurface lv3 = build_local_vol(surface, spec, mu, LocalVolOrder::third);
    const LocalVolSurface lv1 = build_local_vol(surface, spec, mu, LocalVolOrder::first);
    const MCConfig cfg = mc_config(workers);
    const PathEnsemble1F e3 = simulate_1f({mu}, lv3, T, cfg);
    const PathEnsemble1F e1 = simulate_1f({mu}, lv1, T, cfg);

    const double sd = std::sqrt(surface.eval(T, 0.0).w);
    std::vector<double> strikes;
    for (int j = -8; j <= 8; ++j)
        strikes.push_back(0.25 * j * sd);
    const auto s3 = mc_implied_smile(e3, strikes);
    const auto s1 = mc_implied_smile(e1, strikes);

    RoundTrip rt;
    std::ostringstream art;
    art << "k,vol_in,vol_mc_first_order,vol_mc_third_order,se\n";
    double dev1 = 0.0, dev3 = 0.0, worst_excess = 0.0;
    bool all_valid = true;
    for (std::size_t i = 0; i < strikes.size(); ++i) {
        const double k = strikes[i];
        const double vin = std::sqrt(surface.eval(T, k).w / T);
        all_valid = all_valid && s1[i].valid && s3[i].valid;
        const double d3 = std::abs(s3[i].vol - vin);
        const double d1 = std::abs(s1[i].vol - vin);
        dev3 = std::max(dev3, d3);
        dev1 = std::max(dev1, d1);
        worst_excess = std::max(worst_excess, d3 - std::max(1.5e-4, 3.0 * s3[i].band));
        art << num(k) << ',' << num(vin) << ',' << num(s1[i].vol) << ',' << num(s3[i].vol) << ','
            << num(s3[i].band) << '\n';
    }
    rt.smile.pass = all_valid && worst_excess <= 0.0 && dev1 >= dev3;
    std::ostringstream d;
    d << "third-order max deviation " << dev3 * 1e4 << " bp, first-order " << dev1 * 1e4
      << " bp over " << strikes.size() << " strikes in +-2 sd (bound max(1.5 bp, 3 s.e.); first >= third)";
    rt.smile.detail = d.str();
    rt.smile.artifact = art.str();

    rt.identity.pass = true;
    std::ostringstream di;
    for (double k : {-sd, 0.0, sd}) {
        const AEstimate a = estimate_A(e3, k);
        const ImplicitResidual r = implicit_residual(lv3, a, surface, mu, T, k);
        const double z = std::abs(r.residual) / r.std_error;
        rt.identity.pass = rt.identity.pass && z <= 3.0;
        di << "k=" << k << ": residual " << r.residual << " (" << z << " s.e.); ";
    }
    di << "bound 3 s.e.";
    rt.identity.detail = di.str();
    return rt;
}

namespace {

// Smooth skewed smile of the short rate at the swaption expiry.
math::Jet2 reference_slice(double x, double w0) {
    const double L = 2.0 * std::sqrt(w0);
    const double u = x / L;
    const double t = std::tanh(u);
    const double q = 1.0 + u * u;
    const math::Jet2 th{t, (1.0 - t * t) / L, -2.0 * t * (1.0 - t * t) / (L * L)};
    const math::Jet2 bump{u * u / q, 2.0 * u / (q * q) / L, (2.0 - 6.0 * u * u) / (q * q * q) / (L * L)};
    return w0 * (math::Jet2{1.0} + 0.25 * th + 0.1 * bump);
}

} // namespace

Outcome swaption_round_trip(unsigned workers) {
    const double T = 5.0;
    const double mu = 0.03;
    const double w0 = 0.01 * 0.01 * T;
    const DiscountCurve curve = DiscountCurve::flat(0.02);
    const SwapInstrument swap = SwapInstrument::annual(T, 5);
    const VarianceSlice truth{T, [w0](double x) { return reference_slice(x, w0); }, {}};
    const SwapFunctions fns_true(curve, swap, truth, mu);

    // Quotes over +-4 sd of the swap rate.
    const double s0 = fns_true.model_forward();
    const double slope = fns_true(0.0).d_swap_rate;
    const double sd_s = slope * std::sqrt(w0);
    std::vector<double> strikes, vols;
    for (int i = -16; i <= 16; ++i) {
        const double k = s0 + 0.25 * i * sd_s;
        const double z = swaption_model_variance(fns_true, k);
        strikes.push_back(k);
        vols.push_back(std::sqrt(z / T));
    }
    const SwaptionSmile smile(T, strikes, vols);

    const double w_guess = smile.z(s0).v / (slope * slope);
    const VarianceSlice init{T, [w_guess](double) { return math::Jet2{w_guess}; }, {}};
    const CalibrationReport rep = try_calibrate_w_from_swaptions(curve, swap, mu, smile, init);
    const VarianceSlice fitted = rep.slice(T);

    double sup_err = 0.0, sup_w = 0.0;
    for (int i = -200; i <= 200; ++i) {
        const double x = 2.0 * std::sqrt(w0) * i / 200.0;
        sup_err = std::max(sup_err, std::abs(fitted.eval(x).v - truth.eval(x).v));
        sup_w = std::max(sup_w, truth.eval(x).v);
    }
    const double rel = sup_err / sup_w;

    // Monte Carlo repricing with the calibrated local vol.
    const VarianceSurface surface = proportional_from_slice(fitted.eval, T, "calibrated swaption slice");
    LocalVolGridSpec spec;
    spec.t_max = T;
    const LocalVolSurface lv = build_local_vol(surface, spec, mu, LocalVolOrder::third);
    const PathEnsemble1F ens = simulate_1f({mu}, lv, T, mc_config(workers));
    const SwapFunctions fns_fit(curve, swap, fitted, mu);
    const double scale = fns_fit.discount_fixing() / fns_fit.annuity0();
    // Simulated paths carry the exact y, so the annuity-measure forward is the curve forward.
    const double mc_fwd = fns_fit.forward0();

    std::ostringstream art;
    art << "k,vol_in,vol_model,vol_mc,se\n";
    double mc_excess = -1.0, mc_dev = 0.0;
    for (std::size_t i = 0; i < strikes.size(); ++i) {
        const double k = strikes[i];
        if (std::abs(k - s0) > 2.0 * sd_s + 1e-15)
            continue;
        std::vector<double> pay(ens.size());
        for (std::size_t p = 0; p < ens.size(); ++p) {
            const SwapValues v = fns_fit.at_state(ens.x[p], ens.y[p]);
            pay[p] = scale * v.annuity * std::max(k >= mc_fwd ? v.swap_rate - k : k - v.swap_rate, 0.0);
        }
        const Estimate e = sample_mean(pay, ens.antithetic);
        const double z = implied_total_variance_otm(e.value, k - mc_fwd);
        const double vol = std::sqrt(z / T);
        const double band = e.std_error / (gaussian_density_p(k - mc_fwd, z) * T * vol);
        mc_dev = std::max(mc_dev, std::abs(vol - vols[i]));
        mc_excess = std::max(mc_excess, std::abs(vol - vols[i]) - std::max(2e-4, 3.0 * band));
        const double model_vol = vols[i] + rep.vol_errors[i];
        art << num(k) << ',' << num(vols[i]) << ',' << num(model_vol) << ',' << num(vol) << ','
            << num(band) << '\n';
    }

    Outcome out;
    out.pass = rep.converged && rel < 1e-3 && rep.max_vol_error < 0.5e-4 && mc_excess <= 0.0;
    std::ostringstream d;
    d << "calibration " << (rep.converged ? "converged" : "failed") << " in " << rep.iterations
      << " iterations; w recovery " << rel << " relative (bound 1e-3); repricing "
      << rep.max_vol_error * 1e4 << " bp (bound 0.5); MC repricing max deviation " << mc_dev * 1e4
      << " bp (bound max(2 bp, 3 s.e.))";
    out.detail = d.str();
    out.artifact = art.str();
    return out;
}

} // namespace acceptance
