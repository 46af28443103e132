#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "cheyette_lv/errors.hpp"
#include "cheyette_lv/ig_analytics.hpp"
#include "cheyette_lv/io.hpp"
#include "cheyette_lv/math/quadrature.hpp"
#include "cheyette_lv/two_factor.hpp"
#include "cheyette_lv/variance_surface.hpp"

using nlohmann::json;
using namespace cheyette;

namespace cli {

int exit_code_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::input:
    case ErrorKind::insufficient_data:
    case ErrorKind::invalid_grid:
        return exit_input;
    case ErrorKind::simulation_blowup:
        return exit_simulation;
    case ErrorKind::calibration:
        return exit_calibration;
    default:
        return exit_domain;
    }
}

namespace {

std::string out_path(const RunConfig& c, const char* name) {
    std::filesystem::create_directories(c.output_dir);
    return (c.output_dir / name).string();
}

VarianceSurface load_surface(const RunConfig& c) {
    if (!c.surface.path.empty())
        return build_surface(io::read_surface(c.surface.path));
    const SurfaceInput& s = c.surface;
    if (s.kind == "flat")
        return synthetic_flat(s.sigma0, c.mu);
    if (s.kind == "skew")
        return synthetic_skew(s.sigma0, s.skew);
    if (s.kind == "linear")
        return synthetic_linear(s.a, s.b, s.T);
    fail(ErrorKind::input, "surface.kind must be 'flat', 'skew' or 'linear'");
}

const char* order_name(LocalVolOrder o) { return o == LocalVolOrder::first ? "first" : "third"; }

} // namespace

int cmd_localvol(const RunConfig& c) {
    const VarianceSurface surface = load_surface(c);
    const LocalVolSurface lv = build_local_vol(surface, c.grid, c.mu, c.order);
    const std::string csv = out_path(c, "localvol.csv");
    io::write_local_vol_csv(csv, lv, c.grid);

    // Arbitrage scan on the same nodes.
    std::size_t w_fail = 0, butterfly_fail = 0, calendar_fail = 0;
    json flagged = json::array();
    const auto* g = lv.grid();
    for (std::size_t i = 0; i < g->times.size(); ++i)
        for (std::size_t j = 0; j < g->n_x; ++j) {
            const double t = g->times[i];
            const double x = g->x_lo[i] + static_cast<double>(j) * g->x_step[i];
            const ArbitrageDiagnostic d = check_arbitrage(surface, t, x, c.mu);
            w_fail += d.w_positive ? 0 : 1;
            butterfly_fail += d.butterfly ? 0 : 1;
            calendar_fail += d.calendar ? 0 : 1;
            if (!d.all_pass() && flagged.size() < 200)
                flagged.push_back({{"t", t}, {"x", x}, {"w_positive", d.w_positive},
                                   {"butterfly", d.butterfly}, {"calendar", d.calendar}});
        }

    const LocalVolMetadata& m = lv.metadata();
    const double rejected_fraction = static_cast<double>(m.rejected_count) / m.node_count;
    const bool rejected = rejected_fraction > c.rejection_threshold;
    json diag{{"source", m.source},
              {"mean_reversion", m.mean_reversion},
              {"order", order_name(m.order)},
              {"node_count", m.node_count},
              {"floored_count", m.floored_count},
              {"rejected_count", m.rejected_count},
              {"rejected_fraction", rejected_fraction},
              {"rejection_threshold", c.rejection_threshold},
              {"arbitrage",
               {{"w_nonpositive", w_fail},
                {"butterfly_failures", butterfly_fail},
                {"calendar_failures", calendar_fail},
                {"flagged_points", flagged}}},
              {"config", c.document}};
    io::write_json(out_path(c, "localvol_diagnostics.json"), diag);
    std::printf("wrote %s (%zu nodes, %zu floored, %zu rejected)\n", csv.c_str(), m.node_count,
                m.floored_count, m.rejected_count);
    if (rejected) {
        std::fprintf(stderr, "error: %.4g of the local vol nodes were rejected (threshold %.4g)\n",
                     rejected_fraction, c.rejection_threshold);
        return exit_domain;
    }
    return exit_ok;
}

int cmd_roundtrip(const RunConfig& c) {
    require(c.roundtrip_strikes >= 1 && c.roundtrip_range_sd >= 0.0, ErrorKind::input,
            "roundtrip needs at least one strike and a non-negative range");
    const double T = c.roundtrip_maturity;
    const VarianceSurface surface = load_surface(c);
    LocalVolGridSpec spec = c.grid;
    spec.t_max = T;
    const LocalVolSurface lv3 = build_local_vol(surface, spec, c.mu, LocalVolOrder::third);
    const LocalVolSurface lv1 = build_local_vol(surface, spec, c.mu, LocalVolOrder::first);
    const PathEnsemble1F e3 = simulate_1f({c.mu}, lv3, T, c.mc);
    const PathEnsemble1F e1 = simulate_1f({c.mu}, lv1, T, c.mc);

    const double sd = std::sqrt(surface.eval(T, 0.0).w);
    std::vector<double> strikes;
    const int n = c.roundtrip_strikes;
    for (int j = 0; j < n; ++j)
        strikes.push_back(n == 1 ? 0.0 : c.roundtrip_range_sd * sd * (2.0 * j / (n - 1) - 1.0));
    const auto s3 = mc_implied_smile(e3, strikes);
    const auto s1 = mc_implied_smile(e1, strikes);

    const std::string csv = out_path(c, "roundtrip.csv");
    io::CsvWriter out(csv, {"k", "vol_in", "vol_mc_first_order", "vol_mc_third_order", "se"});
    double dev1 = 0.0, dev3 = 0.0, worst_se = 0.0;
    int invalid = 0;
    for (std::size_t i = 0; i < strikes.size(); ++i) {
        const double vin = std::sqrt(surface.eval(T, strikes[i]).w / T);
        if (s1[i].valid && s3[i].valid) {
            dev1 = std::max(dev1, std::abs(s1[i].vol - vin));
            dev3 = std::max(dev3, std::abs(s3[i].vol - vin));
            worst_se = std::max(worst_se, s3[i].band);
        } else {
            ++invalid;
        }
        out.row({strikes[i], vin, s1[i].vol, s3[i].vol, s3[i].band});
    }
    out.close();
    json summary{{"maturity", T},
                 {"strikes", strikes.size()},
                 {"invalid_strikes", invalid},
                 {"max_abs_deviation_first_order", dev1},
                 {"max_abs_deviation_third_order", dev3},
                 {"max_standard_error", worst_se},
                 {"config", c.document}};
    io::write_json(out_path(c, "roundtrip_summary.json"), summary);
    std::printf("wrote %s: max deviation third order %.3g bp, first order %.3g bp\n", csv.c_str(),
                dev3 * 1e4, dev1 * 1e4);
    return exit_ok;
}

int cmd_mueff(const RunConfig& c) {
    const TwoFactorInput& in = c.twofactor;
    require(in.n_t >= 1 && in.t_max > 0.0, ErrorKind::input, "mueff needs t_max > 0 and n_t >= 1");
    const CheyetteParams2F p = CheyetteParams2F::from_alpha_rho(in.alpha, in.rho, in.mu1, in.mu2);
    AtmTermStructure ts;
    if (in.atm == "flat_vol")
        ts = AtmTermStructure::flat_vol(in.sigma0);
    else if (in.atm == "gaussian")
        ts = AtmTermStructure::gaussian_model(p, {in.t_max}, {in.sigma0});
    else if (in.atm == "surface")
        ts = AtmTermStructure::from_surface(load_surface(c));
    else
        fail(ErrorKind::input, "twofactor.atm must be 'flat_vol', 'gaussian' or 'surface'");

    std::vector<std::pair<double, double>> rows;
    for (int i = 1; i <= in.n_t; ++i) {
        const double T = in.t_max * i / in.n_t;
        rows.emplace_back(T, mu_eff(p, ts, T));
    }
    const std::string csv = out_path(c, "mu_eff.csv");
    io::write_mu_eff_csv(csv, rows);
    std::printf("wrote %s (%d maturities, beta %.17g)\n", csv.c_str(), in.n_t, p.beta);
    return exit_ok;
}

int cmd_calibrate_swaption(const RunConfig& c) {
    const SwaptionInput& in = c.swaption;
    require(!in.smile.empty(), ErrorKind::input, "swaption.smile must name a smile CSV file");
    const SwapInstrument swap = in.schedule.empty()
                                    ? SwapInstrument::annual(in.fixing, in.tenor_years)
                                    : io::read_swap_schedule_json(in.schedule);
    swap.validate();
    const SwaptionSmile smile = io::read_swaption_smile_csv(in.smile);
    const DiscountCurve curve = DiscountCurve::flat(in.curve_rate);
    const double T = swap.fixing;
    require(std::abs(smile.maturity() - T) < 1e-12, ErrorKind::input,
            "smile maturity must equal the swap fixing");

    // Flat start: the ATM swaption variance divided by the squared slope of S at x = 0.
    const double w_try = smile.z(smile.strikes()[smile.strikes().size() / 2]).v;
    const SwapFunctions probe(curve, swap, {T, [w_try](double) { return math::Jet2{w_try}; }, {}},
                              c.mu);
    const double slope = probe(0.0).d_swap_rate;
    const double w_guess = smile.z(probe.forward0()).v / (slope * slope);
    const VarianceSlice init{T, [w_guess](double) { return math::Jet2{w_guess}; }, {}};
    const CalibrationReport rep =
        try_calibrate_w_from_swaptions(curve, swap, c.mu, smile, init, c.calibration);

    const std::string csv = out_path(c, "calibrated_w.csv");
    io::CsvWriter out(csv, {"x", "w"});
    for (std::size_t i = 0; i < rep.x_nodes.size(); ++i)
        out.row({rep.x_nodes[i], rep.w_nodes[i]});
    out.close();
    json report = io::calibration_report_json(rep);
    report["swap"] = io::swap_schedule_json(swap);
    report["config"] = c.document;
    io::write_json(out_path(c, "calibration_report.json"), report);
    if (!rep.converged) {
        std::fprintf(stderr, "error: %s\n", rep.message.c_str());
        return exit_calibration;
    }
    std::printf("wrote %s: converged in %d iterations, max vol error %.3g bp\n", csv.c_str(),
                rep.iterations, rep.max_vol_error * 1e4);
    return exit_ok;
}

int cmd_ig_check(const RunConfig& c) {
    // Closed-form truncated moments against adaptive quadrature of the density.
    double worst = 0.0;
    json points = json::array();
    for (double a : {0.25, 1.0, 4.0})
        for (double b : {0.05, 0.1, 0.2})
            for (double r : {0.5, 1.0, 1.5, 3.0}) {
                const IGParams p{a, b};
                const double x = r * a;
                const double q1 = math::integrate_adaptive([&](double u) { return u * ig_pdf(u, p); },
                                                           x, INFINITY, 1e-300, 1e-13).value;
                const double q2 = math::integrate_adaptive(
                    [&](double u) { return u * u * ig_pdf(u, p); }, x, INFINITY, 1e-300, 1e-13).value;
                const double c1 = ig_trunc_m1(x, p);
                const double c2 = ig_trunc_m2(x, p);
                auto rel = [](double cf, double q) {
                    return cf == 0.0 && q == 0.0 ? 0.0 : std::abs(cf - q) / std::abs(q);
                };
                const double e = std::max(rel(c1, q1), rel(c2, q2));
                worst = std::max(worst, e);
                points.push_back({{"a", a}, {"b", b}, {"x", x}, {"m1", c1}, {"m2", c2}, {"rel_error", e}});
            }
    const bool moments_ok = worst < 1e-8;
    std::printf("%s truncated moments: max relative error %.3g over %zu points\n",
                moments_ok ? "PASS" : "FAIL", worst, points.size());

    json tables = json::object();
    std::printf("expansion order at a=%g, k=%g\n%-24s %12s %14s %10s\n", c.ig_a, c.ig_k, "form", "b",
                "error", "ratio");
    for (auto [name, form] : {std::pair{"cubic", ExpansionForm::cubic},
                              std::pair{"strike_weighted_cubic", ExpansionForm::strike_weighted_cubic}}) {
        const auto table = expansion_order_table(c.ig_a, c.ig_k, c.ig_slopes, form);
        json rows = json::array();
        for (const auto& row : table) {
            std::printf("%-24s %12.6g %14.6e %10.4f\n", name, row.b, row.error, row.ratio);
            rows.push_back({{"b", row.b}, {"error", row.error}, {"ratio", row.ratio}});
        }
        tables[name] = rows;
    }
    io::write_json(out_path(c, "ig_check.json"),
                   {{"moments_max_rel_error", worst},
                    {"moments_pass", moments_ok},
                    {"moment_points", points},
                    {"expansion_order", tables},
                    {"config", c.document}});
    return moments_ok ? exit_ok : exit_check_failed;
}

} // namespace cli
