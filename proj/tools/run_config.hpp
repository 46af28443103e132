#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cheyette_lv/cheyette_mc.hpp"
#include "cheyette_lv/local_vol.hpp"
#include "cheyette_lv/swaption_calib.hpp"

namespace cli {

inline constexpr const char* output_dir_env = "CHEYETTE_LV_OUTPUT_DIR";

struct SurfaceInput {
    std::string path; // grid file; empty selects the synthetic surface below
    std::string kind; // flat | skew | linear
    double sigma0 = 0.01;
    double skew = 0.2;
    double a = 4e-4;
    double b = 2e-3;
    double T = 1.0;
};

struct TwoFactorInput {
    double alpha = 0.7;
    double rho = 0.5;
    double mu1 = 0.0005;
    double mu2 = 0.5;
    std::string atm; // flat_vol | gaussian | surface
    double sigma0 = 0.01;
    double t_max = 10.0;
    int n_t = 41;
};

struct SwaptionInput {
    std::string smile;
    std::string schedule; // JSON schedule; empty means annual(fixing, tenor_years)
    double fixing = 5.0;
    int tenor_years = 5;
    double curve_rate = 0.02;
};

struct RunConfig {
    std::string command;
    std::filesystem::path output_dir;
    double mu = 0.03;
    SurfaceInput surface;
    cheyette::LocalVolGridSpec grid;
    cheyette::LocalVolOrder order = cheyette::LocalVolOrder::third;
    double rejection_threshold = 0.01;
    cheyette::MCConfig mc;
    double roundtrip_maturity = 10.0;
    double roundtrip_range_sd = 2.0;
    int roundtrip_strikes = 17;
    TwoFactorInput twofactor;
    SwaptionInput swaption;
    cheyette::CalibrationOptions calibration;
    double ig_a = 1.0;
    double ig_k = 0.5;
    std::vector<double> ig_slopes;

    nlohmann::json document; // merged configuration, echoed into reports
};

/// Every key with its default; config files and overrides may only use these.
nlohmann::json default_document();

/// Parses `--dotted.key value` and `--dotted.key=value` pairs. Values that
/// parse as JSON keep their type, anything else is taken as a string.
std::vector<std::pair<std::string, nlohmann::json>> parse_overrides(const std::vector<std::string>& args);

/// Defaults, then the config file (if any), then the overrides. Throws
/// cheyette::Error(ErrorKind::input) on unknown keys or wrongly typed values.
RunConfig load_run_config(const std::string& command, const std::string& config_path,
                          const std::vector<std::pair<std::string, nlohmann::json>>& overrides);

} // namespace cli
