#include "cheyette_lv/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "cheyette_lv/errors.hpp"

namespace cheyette::io {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ','))
        out.push_back(trim(field));
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorKind::input, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spill(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        fail(ErrorKind::input, "cannot write " + path);
    out << text;
    if (!out)
        fail(ErrorKind::input, "write failed for " + path);
}

double parse_number(const std::string& field, const std::string& where) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = first + field.size();
    if (!field.empty() && *first == '+')
        ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v))
        fail(ErrorKind::input, "not a number '" + field + "' in " + where);
    return v;
}

} // namespace

std::vector<std::vector<double>> read_numeric_csv(const std::string& path,
                                                  const std::vector<std::string>& header) {
    std::istringstream in(slurp(path));
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (trim(line).empty() || trim(line)[0] == '#')
            continue;
        const auto fields = split(line);
        if (!have_header) {
            if (fields != header) {
                std::string expected;
                for (const auto& h : header)
                    expected += (expected.empty() ? "" : ",") + h;
                fail(ErrorKind::input, path + ": expected header '" + expected + "'");
            }
            have_header = true;
            continue;
        }
        if (fields.size() != header.size())
            fail(ErrorKind::input, path + ":" + std::to_string(line_no) + ": wrong field count");
        std::vector<double> row;
        for (const auto& f : fields)
            row.push_back(parse_number(f, path + ":" + std::to_string(line_no)));
        rows.push_back(std::move(row));
    }
    if (!have_header)
        fail(ErrorKind::input, path + ": empty file");
    return rows;
}

CsvWriter::CsvWriter(std::string path, std::vector<std::string> header)
    : path_(std::move(path)), columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i)
        text_ += (i ? "," : "") + header[i];
    text_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    require(values.size() == columns_, ErrorKind::input, "CSV row has the wrong column count");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i)
            text_ += ',';
        text_ += format_double(values[i]);
    }
    text_ += '\n';
}

void CsvWriter::close() {
    if (closed_)
        return;
    closed_ = true;
    spill(path_, text_);
}

CsvWriter::~CsvWriter() {
    if (!closed_) {
        try {
            close();
        } catch (...) {
        }
    }
}

SurfaceGrid read_surface(const std::string& path) {
    const bool json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
    return json ? read_surface_json(path) : read_surface_csv(path);
}

SurfaceGrid read_surface_csv(const std::string& path) {
    const auto rows = read_numeric_csv(path, {"T", "k", "sigma_imp"});
    std::map<double, std::vector<std::pair<double, double>>> by_T;
    for (const auto& r : rows)
        by_T[r[0]].emplace_back(r[1], r[2]);
    SurfaceGrid g;
    for (auto& [T, pts] : by_T) {
        std::sort(pts.begin(), pts.end());
        g.maturities.push_back(T);
        g.strikes.emplace_back();
        g.vols.emplace_back();
        for (const auto& [k, v] : pts) {
            g.strikes.back().push_back(k);
            g.vols.back().push_back(v);
        }
    }
    g.validate();
    return g;
}

SurfaceGrid read_surface_json(const std::string& path) {
    const nlohmann::json doc = read_json(path);
    SurfaceGrid g;
    try {
        g.maturities = doc.at("maturities").get<std::vector<double>>();
        g.strikes = doc.at("strikes").get<std::vector<std::vector<double>>>();
        g.vols = doc.at("vols").get<std::vector<std::vector<double>>>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::input, path + ": " + e.what());
    }
    g.validate();
    return g;
}

void write_surface_csv(const std::string& path, const SurfaceGrid& grid) {
    CsvWriter out(path, {"T", "k", "sigma_imp"});
    for (std::size_t i = 0; i < grid.maturities.size(); ++i)
        for (std::size_t j = 0; j < grid.strikes[i].size(); ++j)
            out.row({grid.maturities[i], grid.strikes[i][j], grid.vols[i][j]});
    out.close();
}

void write_local_vol_csv(const std::string& path, const LocalVolSurface& lv,
                         const LocalVolGridSpec& spec) {
    CsvWriter out(path, {"t", "x", "sigma_loc"});
    if (const auto* g = lv.grid()) {
        for (std::size_t i = 0; i < g->times.size(); ++i)
            for (std::size_t j = 0; j < g->n_x; ++j)
                out.row({g->times[i], g->x_lo[i] + j * g->x_step[i],
                         std::sqrt(g->variance[i * g->n_x + j])});
    } else {
        const double dt = spec.t_max / (spec.n_t - 1);
        for (int i = 0; i < spec.n_t; ++i) {
            const double t = i * dt;
            for (int j = 0; j < spec.n_x; ++j) {
                const double x = -0.1 + 0.2 * j / (spec.n_x - 1);
                out.row({t, x, std::sqrt(lv.variance(t, x))});
            }
        }
    }
    out.close();
}

void write_mu_eff_csv(const std::string& path, const std::vector<std::pair<double, double>>& rows) {
    CsvWriter out(path, {"T", "mu_eff"});
    for (const auto& [T, m] : rows)
        out.row({T, m});
    out.close();
}

SwaptionSmile read_swaption_smile_csv(const std::string& path) {
    auto rows = read_numeric_csv(path, {"T", "k", "normal_vol"});
    if (rows.empty())
        fail(ErrorKind::insufficient_data, path + ": no smile quotes");
    const double T = rows.front()[0];
    for (const auto& r : rows)
        if (r[0] != T)
            fail(ErrorKind::input, path + ": smile must have a single maturity");
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a[1] < b[1]; });
    std::vector<double> k, v;
    for (const auto& r : rows) {
        k.push_back(r[1]);
        v.push_back(r[2]);
    }
    return SwaptionSmile(T, std::move(k), std::move(v));
}

void write_swaption_smile_csv(const std::string& path, const SwaptionSmile& smile) {
    CsvWriter out(path, {"T", "k", "normal_vol"});
    for (std::size_t i = 0; i < smile.strikes().size(); ++i)
        out.row({smile.maturity(), smile.strikes()[i], smile.vols()[i]});
    out.close();
}

SwapInstrument read_swap_schedule_json(const std::string& path) {
    const nlohmann::json doc = read_json(path);
    SwapInstrument s;
    try {
        s.fixing = doc.at("fixing").get<double>();
        s.payments = doc.at("payments").get<std::vector<double>>();
        if (doc.contains("accruals")) {
            s.accruals = doc.at("accruals").get<std::vector<double>>();
        } else {
            double prev = s.fixing;
            for (double p : s.payments) {
                s.accruals.push_back(p - prev);
                prev = p;
            }
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::input, path + ": " + e.what());
    }
    try {
        s.validate();
    } catch (const Error& e) {
        fail(ErrorKind::input, path + ": " + e.what());
    }
    return s;
}

nlohmann::json swap_schedule_json(const SwapInstrument& swap) {
    return {{"fixing", swap.fixing}, {"payments", swap.payments}, {"accruals", swap.accruals}};
}

nlohmann::json calibration_report_json(const CalibrationReport& r) {
    return {{"converged", r.converged},
            {"iterations", r.iterations},
            {"message", r.message},
            {"max_vol_error", r.max_vol_error},
            {"max_density_residual", r.max_density_residual},
            {"max_interior_density_residual", r.max_interior_density_residual},
            {"step_trace", r.step_trace},
            {"residual_trace", r.residual_trace},
            {"strikes", r.strikes},
            {"vol_errors", r.vol_errors},
            {"density_residuals", r.density_residuals},
            {"x_nodes", r.x_nodes},
            {"w_nodes", r.w_nodes}};
}

nlohmann::json read_json(const std::string& path) {
    const std::string text = slurp(path);
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::input, path + ": " + e.what());
    }
}

void write_json(const std::string& path, const nlohmann::json& doc) {
    spill(path, doc.dump(2) + "\n");
}

} // namespace cheyette::io
