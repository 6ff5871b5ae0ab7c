#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "westervelt/io.hpp"

namespace westervelt {

/// Parsed run configuration. Every field has a usable default; dt <= 0 and
/// parabolicity_margin <= 0 mean "derive from the problem" (see build_setup).
struct RunConfig {
    double c = 1.0, b = 1.0, k = 1.0;
    std::string domain_kind = "interval";
    std::vector<double> lengths = {std::numbers::pi};
    std::vector<int> n_per_axis = {400};

    std::vector<int> mode = {1};
    std::string nodal_file;  // overrides mode when nonempty
    double u0_amplitude = 1e-3;
    double u1_amplitude = 0.0;

    double dt = 0.0;  // auto: min(1e-3, 0.1/lambda0)
    double t_end = 30.0;
    std::string scheme = "semi_implicit_euler";
    double linear_solve_tol = 1e-10;
    double parabolicity_margin = 0.0;  // auto: 0.9/(2k)
    int record_every = 10;

    double norm_p = 2.0;
    std::string norm_kind = "w2_surrogate";

    double fit_window_fraction = 0.5;
    std::string fit_method = "auto";

    int n_modes = 16;
    bool spectrum_at_initial_data = false;

    std::vector<double> sweep_amplitudes;
    double resolvent_tol = 1e-10;

    std::string output_dir;  // same effect as --out; the flag wins when both are given
    std::uint64_t seed = 0;
};

namespace detail {

template <class T>
void read_field(const nlohmann::json& j, const char* key, const std::string& path, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + "." + key + ": " + e.what());
    }
}

inline const nlohmann::json* section(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) return nullptr;
    if (!j.at(key).is_object()) throw ConfigError(std::string(key) + ": must be an object");
    return &j.at(key);
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config json: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config json: top level must be an object");

    RunConfig cfg;
    if (const auto* s = detail::section(j, "params")) {
        detail::read_field(*s, "c", "params", cfg.c);
        detail::read_field(*s, "b", "params", cfg.b);
        detail::read_field(*s, "k", "params", cfg.k);
    }
    if (const auto* s = detail::section(j, "domain")) {
        detail::read_field(*s, "kind", "domain", cfg.domain_kind);
        detail::read_field(*s, "lengths", "domain", cfg.lengths);
    }
    if (const auto* s = detail::section(j, "grid")) {
        detail::read_field(*s, "n_per_axis", "grid", cfg.n_per_axis);
    }
    if (const auto* s = detail::section(j, "initial")) {
        detail::read_field(*s, "mode", "initial", cfg.mode);
        detail::read_field(*s, "nodal_file", "initial", cfg.nodal_file);
        detail::read_field(*s, "u0_amplitude", "initial", cfg.u0_amplitude);
        detail::read_field(*s, "u1_amplitude", "initial", cfg.u1_amplitude);
    }
    if (const auto* s = detail::section(j, "scheme")) {
        detail::read_field(*s, "dt", "scheme", cfg.dt);
        detail::read_field(*s, "t_end", "scheme", cfg.t_end);
        detail::read_field(*s, "scheme", "scheme", cfg.scheme);
        detail::read_field(*s, "linear_solve_tol", "scheme", cfg.linear_solve_tol);
        detail::read_field(*s, "parabolicity_margin", "scheme", cfg.parabolicity_margin);
        detail::read_field(*s, "record_every", "scheme", cfg.record_every);
    }
    if (const auto* s = detail::section(j, "norm")) {
        detail::read_field(*s, "p", "norm", cfg.norm_p);
        detail::read_field(*s, "kind", "norm", cfg.norm_kind);
    }
    if (const auto* s = detail::section(j, "fit")) {
        detail::read_field(*s, "window_fraction", "fit", cfg.fit_window_fraction);
        detail::read_field(*s, "method", "fit", cfg.fit_method);
    }
    if (const auto* s = detail::section(j, "spectrum")) {
        detail::read_field(*s, "n_modes", "spectrum", cfg.n_modes);
        detail::read_field(*s, "at_initial_data", "spectrum", cfg.spectrum_at_initial_data);
    }
    if (const auto* s = detail::section(j, "sweep")) {
        detail::read_field(*s, "amplitudes", "sweep", cfg.sweep_amplitudes);
    }
    if (const auto* s = detail::section(j, "resolvent")) {
        detail::read_field(*s, "tol", "resolvent", cfg.resolvent_tol);
    }
    if (const auto* s = detail::section(j, "output")) {
        detail::read_field(*s, "dir", "output", cfg.output_dir);
    }
    detail::read_field(j, "seed", "config", cfg.seed);
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    return parse_config(read_file(path));
}

/// Reads a nodal initial-data file: CSV with header "u0,u1" and one row per
/// interior node in flat index order.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> read_nodal_file(
    const std::filesystem::path& path, Eigen::Index expected) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) != std::vector<std::string>{"u0", "u1"})
        throw ConfigError("initial.nodal_file: header must be 'u0,u1'");
    std::vector<double> u0, u1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 2) throw ConfigError("initial.nodal_file: expected 2 columns");
        u0.push_back(parse_double(cells[0], "initial.nodal_file u0"));
        u1.push_back(parse_double(cells[1], "initial.nodal_file u1"));
    }
    if (static_cast<Eigen::Index>(u0.size()) != expected)
        throw ConfigError("initial.nodal_file: row count does not match the grid node count");
    Eigen::VectorXd v0 = Eigen::Map<Eigen::VectorXd>(u0.data(), static_cast<Eigen::Index>(u0.size()));
    Eigen::VectorXd v1 = Eigen::Map<Eigen::VectorXd>(u1.data(), static_cast<Eigen::Index>(u1.size()));
    return {std::move(v0), std::move(v1)};
}

/// Everything a subcommand needs, resolved and validated.
struct Setup {
    PhysicalParams params;
    Grid grid;
    SparseOperator lap;
    GradientOperator grad;
    StateVector v0;
    SchemeConfig scheme;
    NormSpec norm;
    double fit_window_fraction;
    std::string fit_method;  // "auto" resolved by the caller from the slowest mode
    int n_modes;
    bool spectrum_at_initial_data;
    std::vector<double> sweep_amplitudes;
    double resolvent_tol;
    std::uint64_t seed;
};

inline NormKind norm_kind_from_string(const std::string& s) {
    if (s == "lp") return NormKind::lp;
    if (s == "w2_surrogate") return NormKind::w2_surrogate;
    if (s == "trace_surrogate") return NormKind::trace_surrogate;
    throw ConfigError("norm.kind: unknown value '" + s + "'");
}

inline Setup build_setup(const RunConfig& cfg) {
    PhysicalParams params(cfg.c, cfg.b, cfg.k);

    Domain domain = [&] {
        if (cfg.domain_kind == "interval") {
            if (cfg.lengths.size() != 1) throw ConfigError("domain.lengths: interval takes 1 length");
            return Domain::interval(cfg.lengths[0]);
        }
        if (cfg.domain_kind == "rectangle") {
            if (cfg.lengths.size() != 2) throw ConfigError("domain.lengths: rectangle takes 2 lengths");
            return Domain::rectangle(cfg.lengths[0], cfg.lengths[1]);
        }
        throw ConfigError("domain.kind: unknown value '" + cfg.domain_kind + "'");
    }();
    Grid grid(domain, std::span<const int>(cfg.n_per_axis.data(), cfg.n_per_axis.size()));
    SparseOperator lap = build_dirichlet_laplacian(grid);
    GradientOperator grad = build_forward_gradient(grid);

    StateVector v0 = StateVector::zero(grid);
    if (!cfg.nodal_file.empty()) {
        auto [u0, u1] = read_nodal_file(cfg.nodal_file, grid.size());
        v0 = {Field{grid, std::move(u0)}, Field{grid, std::move(u1)}};
    } else {
        const Field phi = sine_mode(grid, std::span<const int>(cfg.mode.data(), cfg.mode.size()));
        v0 = {Field{grid, cfg.u0_amplitude * phi.values}, Field{grid, cfg.u1_amplitude * phi.values}};
    }

    SchemeConfig scheme;
    scheme.t_end = cfg.t_end;
    scheme.scheme = scheme_from_string(cfg.scheme);
    scheme.linear_solve_tol = cfg.linear_solve_tol;
    scheme.record_every = cfg.record_every;
    scheme.record_norm_p = cfg.norm_p;
    scheme.parabolicity_margin =
        cfg.parabolicity_margin > 0.0 ? cfg.parabolicity_margin : default_margin(params);
    if (cfg.dt > 0.0) {
        scheme.dt = cfg.dt;
    } else {
        const double lam1 = smallest_eigenvalue(lap);
        scheme.dt = default_dt(spectral_bound(lam1, params));
    }
    validate(scheme, params);

    NormSpec norm{cfg.norm_p, norm_kind_from_string(cfg.norm_kind)};
    validate(norm);

    if (!(cfg.fit_window_fraction > 0.0 && cfg.fit_window_fraction <= 1.0))
        throw ConfigError("fit.window_fraction: must lie in (0, 1]");
    if (cfg.fit_method != "auto" && cfg.fit_method != "raw_log" && cfg.fit_method != "peak_envelope")
        throw ConfigError("fit.method: unknown value '" + cfg.fit_method + "'");
    if (cfg.n_modes < 1) throw ConfigError("spectrum.n_modes: must be >= 1");
    if (!(cfg.resolvent_tol > 0.0)) throw ConfigError("resolvent.tol: must be > 0");
    const int n_modes = std::min<int>(cfg.n_modes, static_cast<int>(grid.size()));

    return Setup{std::move(params),
                 std::move(grid),
                 std::move(lap),
                 std::move(grad),
                 std::move(v0),
                 scheme,
                 norm,
                 cfg.fit_window_fraction,
                 cfg.fit_method,
                 n_modes,
                 cfg.spectrum_at_initial_data,
                 cfg.sweep_amplitudes,
                 cfg.resolvent_tol,
                 cfg.seed};
}

}  // namespace westervelt
