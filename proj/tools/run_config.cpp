#include "run_config.hpp"

#include <cstdlib>

#include "cheyette_lv/errors.hpp"
#include "cheyette_lv/io.hpp"

using nlohmann::json;
using cheyette::ErrorKind;

namespace cli {

json default_document() {
    return json::parse(R"({
  "output_dir": "",
  "mu": 0.03,
  "surface": {"path": "", "kind": "skew", "sigma0": 0.01, "skew": 0.2,
              "a": 0.0004, "b": 0.002, "T": 1.0},
  "localvol": {"order": "third", "t_max": 10.0, "n_t": 121, "n_x": 201, "width_sd": 6.0,
               "rejection_threshold": 0.01},
  "mc": {"n_paths": 200000, "steps_per_year": 96, "seed": 20240611, "antithetic": true,
         "workers": 0},
  "roundtrip": {"maturity": 10.0, "range_sd": 2.0, "n_strikes": 17},
  "twofactor": {"alpha": 0.7, "rho": 0.5, "mu1": 0.0005, "mu2": 0.5, "atm": "flat_vol",
                "sigma0": 0.01, "t_max": 10.0, "n_t": 41},
  "swaption": {"smile": "", "schedule": "", "fixing": 5.0, "tenor_years": 5,
               "curve_rate": 0.02},
  "calibration": {"n_nodes": 41, "width_sd": 6.0, "damping": 1.0, "max_iterations": 200,
                  "step_tol": 1e-10, "vol_tol": 5e-5, "density_tol": 0.001,
                  "density_edge_quotes": 3},
  "ig": {"a": 1.0, "k": 0.5, "slopes": [0.2, 0.1, 0.05]}
})");
}

namespace {

void check_known(const json& defaults, const json& doc, const std::string& prefix) {
    for (const auto& [key, value] : doc.items()) {
        const std::string name = prefix.empty() ? key : prefix + "." + key;
        if (!defaults.contains(key))
            cheyette::fail(ErrorKind::input, "unknown configuration key '" + name + "'");
        const json& def = defaults.at(key);
        if (def.is_object()) {
            if (!value.is_object())
                cheyette::fail(ErrorKind::input, "configuration key '" + name + "' must be an object");
            check_known(def, value, name);
        }
    }
}

json::json_pointer pointer_of(const std::string& dotted) {
    std::string p;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = dotted.find('.', start);
        p += "/" + dotted.substr(start, dot - start);
        if (dot == std::string::npos)
            break;
        start = dot + 1;
    }
    return json::json_pointer(p);
}

template <class T>
T get(const json& doc, const std::string& dotted) {
    try {
        return doc.at(pointer_of(dotted)).get<T>();
    } catch (const json::exception&) {
        cheyette::fail(ErrorKind::input, "configuration key '" + dotted + "' has the wrong type");
    }
}

} // namespace

std::vector<std::pair<std::string, json>> parse_overrides(const std::vector<std::string>& args) {
    std::vector<std::pair<std::string, json>> out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a.rfind("--", 0) != 0 || a.size() < 3)
            cheyette::fail(ErrorKind::input, "unexpected argument '" + a + "'");
        std::string key = a.substr(2);
        std::string text;
        if (const auto eq = key.find('='); eq != std::string::npos) {
            text = key.substr(eq + 1);
            key.resize(eq);
        } else {
            if (i + 1 >= args.size())
                cheyette::fail(ErrorKind::input, "override '--" + key + "' needs a value");
            text = args[++i];
        }
        json value = json::parse(text, nullptr, false);
        if (value.is_discarded())
            value = text;
        out.emplace_back(key, std::move(value));
    }
    return out;
}

RunConfig load_run_config(const std::string& command, const std::string& config_path,
                          const std::vector<std::pair<std::string, json>>& overrides) {
    const json defaults = default_document();
    json doc = defaults;
    if (!config_path.empty()) {
        const json user = cheyette::io::read_json(config_path);
        if (!user.is_object())
            cheyette::fail(ErrorKind::input, config_path + ": configuration must be a JSON object");
        check_known(defaults, user, "");
        doc.merge_patch(user);
    }
    for (const auto& [key, value] : overrides) {
        const auto ptr = pointer_of(key);
        if (!defaults.contains(ptr) || defaults.at(ptr).is_object())
            cheyette::fail(ErrorKind::input, "unknown configuration key '" + key + "'");
        doc[ptr] = value;
    }

    RunConfig c;
    c.command = command;
    std::string out = get<std::string>(doc, "output_dir");
    if (out.empty()) {
        const char* env = std::getenv(output_dir_env);
        out = env && *env ? env : ".";
    }
    c.output_dir = out;
    c.mu = get<double>(doc, "mu");

    c.surface.path = get<std::string>(doc, "surface.path");
    c.surface.kind = get<std::string>(doc, "surface.kind");
    c.surface.sigma0 = get<double>(doc, "surface.sigma0");
    c.surface.skew = get<double>(doc, "surface.skew");
    c.surface.a = get<double>(doc, "surface.a");
    c.surface.b = get<double>(doc, "surface.b");
    c.surface.T = get<double>(doc, "surface.T");

    const std::string order = get<std::string>(doc, "localvol.order");
    if (order != "third" && order != "first")
        cheyette::fail(ErrorKind::input, "localvol.order must be 'first' or 'third'");
    c.order = order == "first" ? cheyette::LocalVolOrder::first : cheyette::LocalVolOrder::third;
    c.grid.t_max = get<double>(doc, "localvol.t_max");
    c.grid.n_t = get<int>(doc, "localvol.n_t");
    c.grid.n_x = get<int>(doc, "localvol.n_x");
    c.grid.width_sd = get<double>(doc, "localvol.width_sd");
    c.rejection_threshold = get<double>(doc, "localvol.rejection_threshold");

    const auto n_paths = get<long long>(doc, "mc.n_paths");
    const auto workers = get<int>(doc, "mc.workers");
    if (n_paths <= 0 || workers < 0)
        cheyette::fail(ErrorKind::input, "mc.n_paths must be positive and mc.workers non-negative");
    c.mc.n_paths = static_cast<std::size_t>(n_paths);
    c.mc.steps_per_year = get<int>(doc, "mc.steps_per_year");
    c.mc.seed = get<std::uint64_t>(doc, "mc.seed");
    c.mc.antithetic = get<bool>(doc, "mc.antithetic");
    c.mc.workers = static_cast<unsigned>(workers);

    c.roundtrip_maturity = get<double>(doc, "roundtrip.maturity");
    c.roundtrip_range_sd = get<double>(doc, "roundtrip.range_sd");
    c.roundtrip_strikes = get<int>(doc, "roundtrip.n_strikes");

    c.twofactor.alpha = get<double>(doc, "twofactor.alpha");
    c.twofactor.rho = get<double>(doc, "twofactor.rho");
    c.twofactor.mu1 = get<double>(doc, "twofactor.mu1");
    c.twofactor.mu2 = get<double>(doc, "twofactor.mu2");
    c.twofactor.atm = get<std::string>(doc, "twofactor.atm");
    c.twofactor.sigma0 = get<double>(doc, "twofactor.sigma0");
    c.twofactor.t_max = get<double>(doc, "twofactor.t_max");
    c.twofactor.n_t = get<int>(doc, "twofactor.n_t");

    c.swaption.smile = get<std::string>(doc, "swaption.smile");
    c.swaption.schedule = get<std::string>(doc, "swaption.schedule");
    c.swaption.fixing = get<double>(doc, "swaption.fixing");
    c.swaption.tenor_years = get<int>(doc, "swaption.tenor_years");
    c.swaption.curve_rate = get<double>(doc, "swaption.curve_rate");

    c.calibration.n_nodes = get<int>(doc, "calibration.n_nodes");
    c.calibration.width_sd = get<double>(doc, "calibration.width_sd");
    c.calibration.damping = get<double>(doc, "calibration.damping");
    c.calibration.max_iterations = get<int>(doc, "calibration.max_iterations");
    c.calibration.step_tol = get<double>(doc, "calibration.step_tol");
    c.calibration.vol_tol = get<double>(doc, "calibration.vol_tol");
    c.calibration.density_tol = get<double>(doc, "calibration.density_tol");
    c.calibration.density_edge_quotes = get<int>(doc, "calibration.density_edge_quotes");

    c.ig_a = get<double>(doc, "ig.a");
    c.ig_k = get<double>(doc, "ig.k");
    c.ig_slopes = get<std::vector<double>>(doc, "ig.slopes");

    c.document = std::move(doc);
    return c;
}

} // namespace cli
