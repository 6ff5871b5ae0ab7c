#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "westervelt/analysis.hpp"
#include "westervelt/spectrum.hpp"

namespace westervelt {

/// All numbers are emitted with 17 significant digits so that every double
/// round-trips exactly through text.
inline std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline double parse_double(const std::string& s, const char* what) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || end != s.c_str() + s.size())
        throw ConfigError(std::string(what) + ": not a number: '" + s + "'");
    return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cell);
            cell.clear();
        } else if (ch != '\r') {
            cell.push_back(ch);
        }
    }
    out.push_back(cell);
    return out;
}

inline const char* to_string(RunStatus status) {
    return status == RunStatus::completed ? "completed" : "parabolicity_violation";
}

inline RunStatus run_status_from_string(const std::string& s) {
    if (s == "completed") return RunStatus::completed;
    if (s == "parabolicity_violation") return RunStatus::parabolicity_violation;
    throw ConfigError("status: unknown value '" + s + "'");
}

inline const char* to_string(ModeRegime regime) {
    switch (regime) {
        case ModeRegime::complex_pair: return "complex_pair";
        case ModeRegime::real_pair: return "real_pair";
        case ModeRegime::double_root: default: return "double_root";
    }
}

inline ModeRegime mode_regime_from_string(const std::string& s) {
    if (s == "complex_pair") return ModeRegime::complex_pair;
    if (s == "real_pair") return ModeRegime::real_pair;
    if (s == "double_root") return ModeRegime::double_root;
    throw ConfigError("regime: unknown value '" + s + "'");
}

inline const char* to_string(FitMethod method) {
    return method == FitMethod::raw_log ? "raw_log" : "peak_envelope";
}

inline FitMethod fit_method_from_string(const std::string& s) {
    if (s == "raw_log") return FitMethod::raw_log;
    if (s == "peak_envelope") return FitMethod::peak_envelope;
    throw ConfigError("fit.method: unknown value '" + s + "'");
}

inline const char* to_string(Scheme scheme) {
    return scheme == Scheme::semi_implicit_euler ? "semi_implicit_euler" : "imex_trapezoid";
}

inline Scheme scheme_from_string(const std::string& s) {
    if (s == "semi_implicit_euler") return Scheme::semi_implicit_euler;
    if (s == "imex_trapezoid") return Scheme::imex_trapezoid;
    throw ConfigError("scheme.scheme: unknown value '" + s + "'");
}

// ---------------------------------------------------------------------------
// Trajectory CSV: header t,norm_u_W2,norm_ut_trace,max_abs_u,min_coeff_a

inline constexpr const char* kTrajectoryHeader = "t,norm_u_W2,norm_ut_trace,max_abs_u,min_coeff_a";

inline std::string trajectory_to_csv(const Trajectory& traj) {
    std::string out = kTrajectoryHeader;
    out.push_back('\n');
    for (const TrajectorySample& s : traj.samples) {
        out += format_g17(s.t);
        out.push_back(',');
        out += format_g17(s.norm_u_w2);
        out.push_back(',');
        out += format_g17(s.norm_ut_trace);
        out.push_back(',');
        out += format_g17(s.max_abs_u);
        out.push_back(',');
        out += format_g17(s.min_coeff_a);
        out.push_back('\n');
    }
    return out;
}

struct TrajectoryRow {
    double t, norm_u_w2, norm_ut_trace, max_abs_u, min_coeff_a;
};

inline std::vector<TrajectoryRow> trajectory_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) != split_csv_line(kTrajectoryHeader))
        throw ConfigError("trajectory csv: bad header");
    std::vector<TrajectoryRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 5) throw ConfigError("trajectory csv: expected 5 columns");
        rows.push_back({parse_double(cells[0], "t"), parse_double(cells[1], "norm_u_W2"),
                        parse_double(cells[2], "norm_ut_trace"), parse_double(cells[3], "max_abs_u"),
                        parse_double(cells[4], "min_coeff_a")});
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Sweep CSV: header amplitude,status,omega_hat,residual_rms,violation_time
// Missing values are empty cells.

inline constexpr const char* kSweepHeader = "amplitude,status,omega_hat,residual_rms,violation_time";

inline std::string sweep_to_csv(std::span<const SweepRow> rows) {
    auto cell = [](const std::optional<double>& v) { return v ? format_g17(*v) : std::string(); };
    std::string out = kSweepHeader;
    out.push_back('\n');
    for (const SweepRow& row : rows) {
        out += format_g17(row.amplitude);
        out.push_back(',');
        out += to_string(row.status);
        out.push_back(',');
        out += cell(row.omega_hat);
        out.push_back(',');
        out += cell(row.residual_rms);
        out.push_back(',');
        out += cell(row.violation_time);
        out.push_back('\n');
    }
    return out;
}

inline std::vector<SweepRow> sweep_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) != split_csv_line(kSweepHeader))
        throw ConfigError("sweep csv: bad header");
    auto opt_cell = [](const std::string& s, const char* what) -> std::optional<double> {
        if (s.empty()) return std::nullopt;
        return parse_double(s, what);
    };
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 5) throw ConfigError("sweep csv: expected 5 columns");
        SweepRow row;
        row.amplitude = parse_double(cells[0], "amplitude");
        row.status = run_status_from_string(cells[1]);
        row.omega_hat = opt_cell(cells[2], "omega_hat");
        row.residual_rms = opt_cell(cells[3], "residual_rms");
        row.violation_time = opt_cell(cells[4], "violation_time");
        rows.push_back(row);
    }
    return rows;
}

inline std::string sweep_to_json(std::span<const SweepRow> rows) {
    auto value = [](const std::optional<double>& v) {
        return v ? format_g17(*v) : std::string("null");
    };
    std::string out = "{\n  \"rows\": [";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out += (i == 0 ? "\n" : ",\n");
        out += "    {\"amplitude\": " + format_g17(rows[i].amplitude) + ", \"status\": \"" +
               to_string(rows[i].status) + "\", \"omega_hat\": " + value(rows[i].omega_hat) +
               ", \"residual_rms\": " + value(rows[i].residual_rms) +
               ", \"violation_time\": " + value(rows[i].violation_time) + "}";
    }
    out += rows.empty() ? "]" : "\n  ]";
    out += "\n}\n";
    return out;
}

inline std::vector<SweepRow> sweep_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    auto opt = [](const nlohmann::json& v) -> std::optional<double> {
        if (v.is_null()) return std::nullopt;
        return v.get<double>();
    };
    std::vector<SweepRow> rows;
    for (const auto& jr : j.at("rows")) {
        SweepRow row;
        row.amplitude = jr.at("amplitude").get<double>();
        row.status = run_status_from_string(jr.at("status").get<std::string>());
        row.omega_hat = opt(jr.at("omega_hat"));
        row.residual_rms = opt(jr.at("residual_rms"));
        row.violation_time = opt(jr.at("violation_time"));
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Decay fit as a one-row CSV.

inline constexpr const char* kDecayFitHeader =
    "omega_hat,intercept,t_begin,t_end,residual_rms,method,n_points";

inline std::string decay_fit_to_csv(const DecayFit& fit) {
    std::string out = kDecayFitHeader;
    out.push_back('\n');
    out += format_g17(fit.omega_hat) + "," + format_g17(fit.intercept) + "," +
           format_g17(fit.t_begin) + "," + format_g17(fit.t_end) + "," +
           format_g17(fit.residual_rms) + "," + to_string(fit.method) + "," +
           std::to_string(fit.n_points) + "\n";
    return out;
}

inline DecayFit decay_fit_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) != split_csv_line(kDecayFitHeader))
        throw ConfigError("decay csv: bad header");
    if (!std::getline(in, line)) throw ConfigError("decay csv: missing data row");
    const auto cells = split_csv_line(line);
    if (cells.size() != 7) throw ConfigError("decay csv: expected 7 columns");
    DecayFit fit;
    fit.omega_hat = parse_double(cells[0], "omega_hat");
    fit.intercept = parse_double(cells[1], "intercept");
    fit.t_begin = parse_double(cells[2], "t_begin");
    fit.t_end = parse_double(cells[3], "t_end");
    fit.residual_rms = parse_double(cells[4], "residual_rms");
    fit.method = fit_method_from_string(cells[5]);
    fit.n_points = static_cast<int>(parse_double(cells[6], "n_points"));
    return fit;
}

// ---------------------------------------------------------------------------
// Spectral report JSON (emitted by hand to keep the 17-digit contract).

inline std::string spectral_report_to_json(const SpectralReport& report) {
    std::string out = "{\n  \"lambda1_A\": " + format_g17(report.lambda1_A) +
                      ",\n  \"lambda0\": " + format_g17(report.lambda0) + ",\n  \"modes\": [";
    for (std::size_t j = 0; j < report.modes.size(); ++j) {
        const SpectralMode& m = report.modes[j];
        out += (j == 0 ? "\n" : ",\n");
        out += "    {\"a_j\": " + format_g17(m.a_j) + ", \"re_plus\": " + format_g17(m.plus.real()) +
               ", \"im_plus\": " + format_g17(m.plus.imag()) +
               ", \"re_minus\": " + format_g17(m.minus.real()) +
               ", \"im_minus\": " + format_g17(m.minus.imag()) + ", \"regime\": \"" +
               to_string(m.regime) + "\"}";
    }
    out += report.modes.empty() ? "]" : "\n  ]";
    out += ",\n  \"spectral_abscissa\": " + format_g17(report.spectral_abscissa) + "\n}\n";
    return out;
}

inline SpectralReport spectral_report_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    SpectralReport report;
    report.lambda1_A = j.at("lambda1_A").get<double>();
    report.lambda0 = j.at("lambda0").get<double>();
    report.spectral_abscissa = j.at("spectral_abscissa").get<double>();
    for (const auto& jm : j.at("modes")) {
        SpectralMode m;
        m.a_j = jm.at("a_j").get<double>();
        m.plus = Complex(jm.at("re_plus").get<double>(), jm.at("im_plus").get<double>());
        m.minus = Complex(jm.at("re_minus").get<double>(), jm.at("im_minus").get<double>());
        m.regime = mode_regime_from_string(jm.at("regime").get<std::string>());
        report.modes.push_back(m);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Decay report JSON. Reports the fitted rate next to both reference rates:
// the linearized slowest-mode rate Re λ₋(a₁) and the guaranteed bound λ₀.

struct DecayReport {
    RunStatus status = RunStatus::completed;
    std::optional<double> violation_time;
    DecayFit fit;
    double ref_re_lambda_minus_a1 = 0.0;
    double ref_lambda0 = 0.0;
};

inline std::string decay_report_to_json(const DecayReport& report) {
    std::string out = "{\n  \"status\": \"" + std::string(to_string(report.status)) + "\",\n";
    out += "  \"violation_time\": " +
           (report.violation_time ? format_g17(*report.violation_time) : std::string("null")) + ",\n";
    out += "  \"omega_hat\": " + format_g17(report.fit.omega_hat) + ",\n";
    out += "  \"intercept\": " + format_g17(report.fit.intercept) + ",\n";
    out += "  \"window\": {\"t_begin\": " + format_g17(report.fit.t_begin) +
           ", \"t_end\": " + format_g17(report.fit.t_end) + "},\n";
    out += "  \"residual_rms\": " + format_g17(report.fit.residual_rms) + ",\n";
    out += "  \"method\": \"" + std::string(to_string(report.fit.method)) + "\",\n";
    out += "  \"n_points\": " + std::to_string(report.fit.n_points) + ",\n";
    out += "  \"reference\": {\"re_lambda_minus_a1\": " + format_g17(report.ref_re_lambda_minus_a1) +
           ", \"lambda0\": " + format_g17(report.ref_lambda0) + "}\n}\n";
    return out;
}

inline DecayReport decay_report_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    DecayReport report;
    report.status = run_status_from_string(j.at("status").get<std::string>());
    if (!j.at("violation_time").is_null())
        report.violation_time = j.at("violation_time").get<double>();
    report.fit.omega_hat = j.at("omega_hat").get<double>();
    report.fit.intercept = j.at("intercept").get<double>();
    report.fit.t_begin = j.at("window").at("t_begin").get<double>();
    report.fit.t_end = j.at("window").at("t_end").get<double>();
    report.fit.residual_rms = j.at("residual_rms").get<double>();
    report.fit.method = fit_method_from_string(j.at("method").get<std::string>());
    report.fit.n_points = j.at("n_points").get<int>();
    report.ref_re_lambda_minus_a1 = j.at("reference").at("re_lambda_minus_a1").get<double>();
    report.ref_lambda0 = j.at("reference").at("lambda0").get<double>();
    return report;
}

// ---------------------------------------------------------------------------

/// Summary of a simulate run.
struct SimulateSummary {
    RunStatus status = RunStatus::completed;
    std::optional<double> violation_time;
    std::size_t n_samples = 0;
    TrajectoryRow final_row{};
};

inline std::string simulate_summary_to_json(const Trajectory& traj) {
    const TrajectorySample& last = traj.samples.back();
    std::string out = "{\n  \"status\": \"" + std::string(to_string(traj.status)) + "\",\n";
    out += "  \"violation_time\": " +
           (traj.violation_time ? format_g17(*traj.violation_time) : std::string("null")) + ",\n";
    out += "  \"n_samples\": " + std::to_string(traj.samples.size()) + ",\n";
    out += "  \"final\": {\"t\": " + format_g17(last.t) +
           ", \"norm_u_W2\": " + format_g17(last.norm_u_w2) +
           ", \"norm_ut_trace\": " + format_g17(last.norm_ut_trace) +
           ", \"max_abs_u\": " + format_g17(last.max_abs_u) +
           ", \"min_coeff_a\": " + format_g17(last.min_coeff_a) + "}\n}\n";
    return out;
}

inline SimulateSummary simulate_summary_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    SimulateSummary summary;
    summary.status = run_status_from_string(j.at("status").get<std::string>());
    if (!j.at("violation_time").is_null())
        summary.violation_time = j.at("violation_time").get<double>();
    summary.n_samples = j.at("n_samples").get<std::size_t>();
    const auto& f = j.at("final");
    summary.final_row = {f.at("t").get<double>(), f.at("norm_u_W2").get<double>(),
                         f.at("norm_ut_trace").get<double>(), f.at("max_abs_u").get<double>(),
                         f.at("min_coeff_a").get<double>()};
    return summary;
}

/// Residual report of a resolvent application.
struct ResolventReport {
    Complex lambda;
    Complex mu;
    double residual = 0.0;
    Eigen::Index field_dim = 0;
};

inline std::string resolvent_report_to_json(const ResolventReport& report) {
    std::string out = "{\n  \"lambda\": {\"re\": " + format_g17(report.lambda.real()) +
                      ", \"im\": " + format_g17(report.lambda.imag()) + "},\n";
    out += "  \"mu\": {\"re\": " + format_g17(report.mu.real()) +
           ", \"im\": " + format_g17(report.mu.imag()) + "},\n";
    out += "  \"residual\": " + format_g17(report.residual) + ",\n";
    out += "  \"field_dim\": " + std::to_string(report.field_dim) + "\n}\n";
    return out;
}

inline ResolventReport resolvent_report_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    ResolventReport report;
    report.lambda = Complex(j.at("lambda").at("re").get<double>(),
                            j.at("lambda").at("im").get<double>());
    report.mu = Complex(j.at("mu").at("re").get<double>(), j.at("mu").at("im").get<double>());
    report.residual = j.at("residual").get<double>();
    report.field_dim = j.at("field_dim").get<Eigen::Index>();
    return report;
}

/// Sweep extremes, emitted next to the sweep table.
inline std::string sweep_summary_to_json(const SweepSummary& summary) {
    auto value = [](const std::optional<double>& v) {
        return v ? format_g17(*v) : std::string("null");
    };
    return "{\n  \"largest_completed_decaying_amplitude\": " +
           value(summary.largest_completed_decaying) +
           ",\n  \"smallest_violating_amplitude\": " + value(summary.smallest_violating) + "\n}\n";
}

inline SweepSummary sweep_summary_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    SweepSummary summary;
    if (!j.at("largest_completed_decaying_amplitude").is_null())
        summary.largest_completed_decaying = j.at("largest_completed_decaying_amplitude").get<double>();
    if (!j.at("smallest_violating_amplitude").is_null())
        summary.smallest_violating = j.at("smallest_violating_amplitude").get<double>();
    return summary;
}

/// Writes content to path atomically (write to a sibling temp file, then
/// rename over the target).
inline void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace westervelt
