#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cheyette_lv/local_vol.hpp"
#include "cheyette_lv/swaption_calib.hpp"
#include "cheyette_lv/variance_surface.hpp"

namespace cheyette::io {

/// 17 significant digits; round-trips every finite double.
std::string format_double(double v);

/// Rows of a CSV file with the expected header; all fields numeric.
/// Throws ErrorKind::input on a missing file, wrong header or bad number.
std::vector<std::vector<double>> read_numeric_csv(const std::string& path,
                                                  const std::vector<std::string>& header);

class CsvWriter {
public:
    CsvWriter(std::string path, std::vector<std::string> header);
    void row(const std::vector<double>& values);
    /// Writes the file; throws ErrorKind::input when it cannot be opened.
    void close();
    ~CsvWriter();

private:
    std::string path_;
    std::string text_;
    std::size_t columns_;
    bool closed_ = false;
};

/// Surface quotes from CSV `T,k,sigma_imp` or JSON
/// {"maturities": [...], "strikes": [[...]], "vols": [[...]]}, chosen by extension.
SurfaceGrid read_surface(const std::string& path);
SurfaceGrid read_surface_csv(const std::string& path);
SurfaceGrid read_surface_json(const std::string& path);
void write_surface_csv(const std::string& path, const SurfaceGrid& grid);

/// Grid nodes as `t,x,sigma_loc`; function-backed surfaces are sampled on `spec`.
void write_local_vol_csv(const std::string& path, const LocalVolSurface& lv,
                         const LocalVolGridSpec& spec = {});

void write_mu_eff_csv(const std::string& path, const std::vector<std::pair<double, double>>& rows);

/// `T,k,normal_vol` with a single maturity.
SwaptionSmile read_swaption_smile_csv(const std::string& path);
void write_swaption_smile_csv(const std::string& path, const SwaptionSmile& smile);

/// {"fixing": T0, "payments": [...], "accruals": [...]}
SwapInstrument read_swap_schedule_json(const std::string& path);
nlohmann::json swap_schedule_json(const SwapInstrument& swap);

nlohmann::json calibration_report_json(const CalibrationReport& report);

nlohmann::json read_json(const std::string& path);
void write_json(const std::string& path, const nlohmann::json& doc);

} // namespace cheyette::io
