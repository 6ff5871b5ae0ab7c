// Command line front end: spectrum | resolvent | simulate | decay | sweep.
// Exit codes: 0 success, 2 config/validation error, 3 numerical failure,
// 4 parabolicity violation (simulate/decay only).

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "westervelt/westervelt.hpp"

namespace {

namespace wv = westervelt;
namespace fs = std::filesystem;

enum LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

int log_level() {
    static const int level = [] {
        const char* env = std::getenv("WESTERVELT_LOG");
        if (env == nullptr) return static_cast<int>(kWarn);
        const std::string s(env);
        if (s == "error") return static_cast<int>(kError);
        if (s == "warn") return static_cast<int>(kWarn);
        if (s == "info") return static_cast<int>(kInfo);
        if (s == "debug") return static_cast<int>(kDebug);
        return static_cast<int>(kWarn);
    }();
    return level;
}

void log(int level, const char* tag, const std::string& msg) {
    if (level <= log_level()) std::cerr << "[" << tag << "] " << msg << "\n";
}

void log_error(const std::string& msg) { log(kError, "error", msg); }
void log_warn(const std::string& msg) { log(kWarn, "warn", msg); }
void log_info(const std::string& msg) { log(kInfo, "info", msg); }

struct Output {
    std::string out_dir;  // empty: primary artifact to stdout

    void emit(const std::string& filename, const std::string& content, bool primary) const {
        if (out_dir.empty()) {
            if (primary) std::cout << content;
            return;
        }
        const fs::path path = fs::path(out_dir) / filename;
        wv::atomic_write_file(path, content);
        log_info("wrote " + path.string());
    }

    // Timestamps live only here, so the data artifacts stay byte-identical
    // across reruns of the same config.
    void write_metadata(const std::string& command, const std::string& config_path) const {
        if (out_dir.empty()) return;
        const std::time_t now = std::time(nullptr);
        char stamp[32];
        std::strftime(stamp, sizeof(stamp), "%FT%TZ", std::gmtime(&now));
        std::string meta = "{\n  \"command\": \"" + command + "\",\n  \"config\": \"" + config_path +
                           "\",\n  \"timestamp_utc\": \"" + stamp + "\"\n}\n";
        wv::atomic_write_file(fs::path(out_dir) / "run_meta.json", meta);
    }
};

struct Loaded {
    wv::RunConfig cfg;
    wv::Setup setup;
};

Loaded make_setup(const std::string& config_path) {
    wv::RunConfig cfg;
    if (!config_path.empty()) cfg = wv::load_config(config_path);
    wv::Setup setup = wv::build_setup(cfg);
    if (std::abs(setup.norm.p - 1.5) < 1e-12)
        log_warn("norm.p = 1.5 accepted; the discrete surrogate norms make no continuum claim "
                 "at this exponent");
    log_info("grid: " + std::to_string(setup.grid.size()) + " nodes, dt = " +
             wv::format_g17(setup.scheme.dt));
    return Loaded{std::move(cfg), std::move(setup)};
}

Output make_output(const std::string& flag_dir, const wv::RunConfig& cfg) {
    const std::string dir = flag_dir.empty() ? cfg.output_dir : flag_dir;
    if (!dir.empty()) fs::create_directories(dir);
    return Output{dir};
}

wv::CoefficientField linearization_coefficient(const wv::Setup& setup) {
    const wv::Field& u = setup.spectrum_at_initial_data ? setup.v0.v1 : wv::Field::zero(setup.grid);
    return wv::assemble_coefficient(u, setup.params, setup.scheme.parabolicity_margin);
}

wv::FitMethod resolve_fit_method(const wv::Setup& setup) {
    if (setup.fit_method == "raw_log") return wv::FitMethod::raw_log;
    if (setup.fit_method == "peak_envelope") return wv::FitMethod::peak_envelope;
    const double a1 = wv::smallest_eigenvalue(setup.lap);
    const wv::FitMethod m = wv::choose_fit_method(wv::mode_regime(a1, setup.params));
    log_info(std::string("fit method auto-resolved to ") + wv::to_string(m));
    return m;
}

int cmd_spectrum(const std::string& config_path, const std::string& out_flag) {
    const Loaded loaded = make_setup(config_path);
    const wv::Setup& setup = loaded.setup;
    const Output out = make_output(out_flag, loaded.cfg);
    const wv::CoefficientField coeff = linearization_coefficient(setup);
    const wv::SpectralReport report =
        wv::block_spectrum(coeff, setup.lap, setup.params, setup.n_modes);
    if (!setup.spectrum_at_initial_data) {
        const double continuum = wv::analytic_eigenpairs(setup.grid, 1).front().eigenvalue;
        log_info("lambda1: discrete " + wv::format_g17(report.lambda1_A) + ", continuum oracle " +
                 wv::format_g17(continuum));
    }
    out.emit("spectrum.json", wv::spectral_report_to_json(report), true);
    out.write_metadata("spectrum", config_path);
    return 0;
}

int cmd_resolvent(const std::string& config_path, const std::string& lambda_arg,
                  const std::string& out_flag) {
    const Loaded loaded = make_setup(config_path);
    const wv::Setup& setup = loaded.setup;
    const Output out = make_output(out_flag, loaded.cfg);

    const auto comma = lambda_arg.find(',');
    const double re = wv::parse_double(lambda_arg.substr(0, comma), "--lambda re");
    const double im =
        comma == std::string::npos ? 0.0 : wv::parse_double(lambda_arg.substr(comma + 1), "--lambda im");
    const wv::Complex lambda(re, im);

    const wv::CoefficientField coeff = linearization_coefficient(setup);
    wv::ResolventReport report;
    report.lambda = lambda;
    report.mu = wv::mu_map(lambda, setup.params);  // SingularMu -> exit 2
    report.field_dim = setup.lap.dim();
    wv::apply_resolvent(lambda, coeff, setup.lap, setup.params, wv::to_complex(setup.v0),
                        setup.resolvent_tol, &report.residual);
    out.emit("resolvent.json", wv::resolvent_report_to_json(report), true);
    out.write_metadata("resolvent", config_path);
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_flag) {
    const Loaded loaded = make_setup(config_path);
    const wv::Setup& setup = loaded.setup;
    const Output out = make_output(out_flag, loaded.cfg);
    const wv::Trajectory traj = wv::simulate(setup.v0, setup.scheme, setup.lap, setup.params);
    out.emit("summary.json", wv::simulate_summary_to_json(traj), true);
    out.emit("trajectory.csv", wv::trajectory_to_csv(traj), false);
    out.write_metadata("simulate", config_path);
    if (traj.status == wv::RunStatus::parabolicity_violation) {
        log_warn("parabolicity violated at t = " + wv::format_g17(*traj.violation_time));
        return 4;
    }
    return 0;
}

int cmd_decay(const std::string& config_path, const std::string& out_flag) {
    const Loaded loaded = make_setup(config_path);
    const wv::Setup& setup = loaded.setup;
    const Output out = make_output(out_flag, loaded.cfg);
    const wv::Trajectory traj = wv::simulate(setup.v0, setup.scheme, setup.lap, setup.params);

    const double a1 = wv::smallest_eigenvalue(setup.lap);
    wv::DecayReport report;
    report.status = traj.status;
    report.violation_time = traj.violation_time;
    report.ref_re_lambda_minus_a1 = wv::eigenvalue_pair(a1, setup.params).second.real();
    report.ref_lambda0 = wv::spectral_bound(a1, setup.params);

    if (traj.status == wv::RunStatus::parabolicity_violation) {
        out.emit("decay.json", wv::decay_report_to_json(report), true);
        out.emit("trajectory.csv", wv::trajectory_to_csv(traj), false);
        out.write_metadata("decay", config_path);
        log_warn("parabolicity violated at t = " + wv::format_g17(*traj.violation_time));
        return 4;
    }

    const wv::FitMethod method = resolve_fit_method(setup);
    report.fit = wv::fit_decay_rate(traj, setup.norm, setup.lap, setup.grad,
                                    setup.fit_window_fraction, method);
    out.emit("decay.json", wv::decay_report_to_json(report), true);
    out.emit("decay.csv", wv::decay_fit_to_csv(report.fit), false);
    out.emit("trajectory.csv", wv::trajectory_to_csv(traj), false);
    out.write_metadata("decay", config_path);
    return 0;
}

int cmd_sweep(const std::string& config_path, int jobs, const std::string& out_flag) {
    const Loaded loaded = make_setup(config_path);
    const wv::Setup& setup = loaded.setup;
    const Output out = make_output(out_flag, loaded.cfg);
    if (setup.sweep_amplitudes.empty())
        throw wv::ConfigError("sweep.amplitudes: required for the sweep command");
    const double scale = setup.v0.v1.max_abs();
    if (!(scale > 0.0)) throw wv::ConfigError("initial: sweep needs a nonzero u0 shape");
    const wv::StateVector base{wv::Field{setup.grid, setup.v0.v1.values / scale},
                               wv::Field{setup.grid, setup.v0.v2.values / scale}};

    const wv::FitMethod method = resolve_fit_method(setup);
    const std::vector<wv::SweepRow> rows = wv::stability_sweep(
        base, setup.sweep_amplitudes, setup.scheme, setup.lap, setup.params, setup.norm,
        setup.fit_window_fraction, method, jobs);
    out.emit("sweep.csv", wv::sweep_to_csv(rows), true);
    out.emit("sweep.json", wv::sweep_to_json(rows), false);
    out.emit("sweep_summary.json", wv::sweep_summary_to_json(wv::summarize_sweep(rows)), false);
    out.write_metadata("sweep", config_path);
    return 0;
}

int guarded(bool violation_exits_4, const std::function<int()>& body) {
    try {
        return body();
    } catch (const wv::ConfigError& e) {
        log_error(e.what());
        return 2;
    } catch (const wv::SingularMu& e) {
        log_error(e.what());
        return 2;
    } catch (const wv::ParabolicityViolation& e) {
        log_error(e.what());
        return violation_exits_4 ? 4 : 2;
    } catch (const wv::InvalidArgument& e) {
        log_error(e.what());
        return 2;
    } catch (const wv::SingularResolvent& e) {
        log_error(e.what());
        return 3;
    } catch (const std::exception& e) {
        log_error(e.what());
        return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral laboratory and simulator for a strongly damped quasilinear wave system"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string lambda_arg;
    int jobs = 1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON configuration file");
        sub->add_option("--out", out_dir, "output directory (default: primary artifact to stdout)");
    };

    CLI::App* spectrum = app.add_subcommand("spectrum", "block-operator spectrum and bound");
    add_common(spectrum);
    CLI::App* resolvent = app.add_subcommand("resolvent", "apply the resolvent and report residual");
    add_common(resolvent);
    resolvent->add_option("--lambda", lambda_arg, "complex shift re,im")->required();
    CLI::App* simulate = app.add_subcommand("simulate", "integrate the system and dump trajectory");
    add_common(simulate);
    CLI::App* decay = app.add_subcommand("decay", "simulate, then fit the decay rate");
    add_common(decay);
    CLI::App* sweep = app.add_subcommand("sweep", "amplitude sweep with per-row decay fits");
    add_common(sweep);
    sweep->add_option("--jobs", jobs, "concurrent sweep rows")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    if (spectrum->parsed())
        return guarded(false, [&] { return cmd_spectrum(config_path, out_dir); });
    if (resolvent->parsed())
        return guarded(false, [&] { return cmd_resolvent(config_path, lambda_arg, out_dir); });
    if (simulate->parsed()) return guarded(true, [&] { return cmd_simulate(config_path, out_dir); });
    if (decay->parsed()) return guarded(true, [&] { return cmd_decay(config_path, out_dir); });
    if (sweep->parsed()) return guarded(false, [&] { return cmd_sweep(config_path, jobs, out_dir); });
    return 2;
}
