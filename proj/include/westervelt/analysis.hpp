#pragma once

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "westervelt/eigenpairs.hpp"
#include "westervelt/evolution.hpp"

namespace westervelt {

enum class FitMethod { raw_log, peak_envelope };

/// Least-squares exponential decay rate: the negative slope of a line fitted
/// through (t, log norm(t)). The residual is always reported.
struct DecayFit {
    double omega_hat = 0.0;
    double intercept = 0.0;  // fitted log-norm at t = 0
    double t_begin = 0.0;
    double t_end = 0.0;
    double residual_rms = 0.0;
    FitMethod method = FitMethod::raw_log;
    int n_points = 0;
};

/// Fits a decay rate to a norm series over the final window_fraction of its
/// time range. peak_envelope first reduces the series to its strict local
/// maxima (needed when complex eigenvalue pairs make the norm oscillate) and
/// requires at least three peaks; raw_log uses every sample and requires all
/// of them positive.
inline DecayFit fit_log_series(std::span<const double> times, std::span<const double> norms,
                               double window_fraction, FitMethod method) {
    if (times.size() != norms.size()) throw InvalidArgument("fit_log_series: size mismatch");
    if (!(window_fraction > 0.0 && window_fraction <= 1.0))
        throw InvalidArgument("fit.window_fraction: must lie in (0, 1]");
    if (times.size() < 2) throw InvalidArgument("fit_log_series: need at least 2 samples");

    const double t_first = times.front();
    const double t_last = times.back();
    const double t_cut = t_last - window_fraction * (t_last - t_first);

    std::vector<std::size_t> window;
    for (std::size_t i = 0; i < times.size(); ++i)
        if (times[i] >= t_cut) window.push_back(i);
    if (window.size() < 10)
        throw InvalidArgument("fit_log_series: fewer than 10 samples in the fit window");

    std::vector<std::size_t> selected;
    if (method == FitMethod::peak_envelope) {
        for (std::size_t w = 1; w + 1 < window.size(); ++w) {
            const double left = norms[window[w - 1]];
            const double mid = norms[window[w]];
            const double right = norms[window[w + 1]];
            if (mid > left && mid >= right) selected.push_back(window[w]);
        }
        if (selected.size() < 3)
            throw DegenerateFit("fit_log_series: fewer than 3 envelope peaks in the window");
    } else {
        selected = window;
    }

    double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
    for (std::size_t i : selected) {
        if (!(norms[i] > 0.0))
            throw DegenerateFit("fit_log_series: norm underflowed to zero inside the fit window");
        const double t = times[i];
        const double l = std::log(norms[i]);
        st += t;
        sl += l;
        stt += t * t;
        stl += t * l;
    }
    const double m = static_cast<double>(selected.size());
    const double denom = m * stt - st * st;
    if (!(std::abs(denom) > 0.0)) throw DegenerateFit("fit_log_series: degenerate time samples");
    const double slope = (m * stl - st * sl) / denom;
    const double intercept = (sl - slope * st) / m;

    double rss = 0.0;
    for (std::size_t i : selected) {
        const double r = std::log(norms[i]) - (intercept + slope * times[i]);
        rss += r * r;
    }

    DecayFit fit;
    fit.omega_hat = -slope;
    fit.intercept = intercept;
    fit.t_begin = times[selected.front()];
    fit.t_end = times[selected.back()];
    fit.residual_rms = std::sqrt(rss / m);
    fit.method = method;
    fit.n_points = static_cast<int>(selected.size());
    return fit;
}

/// Fits the decay rate of the combined state norm along a trajectory.
inline DecayFit fit_decay_rate(const Trajectory& traj, const NormSpec& spec,
                               const SparseOperator& lap, const GradientOperator& grad,
                               double window_fraction, FitMethod method) {
    std::vector<double> times, norms;
    times.reserve(traj.samples.size());
    norms.reserve(traj.samples.size());
    for (const TrajectorySample& s : traj.samples) {
        times.push_back(s.t);
        norms.push_back(state_norm(s.state, spec, lap, grad));
    }
    return fit_log_series(times, norms, window_fraction, method);
}

/// Default fit method for a spectral report: peak_envelope when the slowest
/// mode is a complex pair (oscillatory norms), raw_log otherwise.
inline FitMethod choose_fit_method(ModeRegime slowest_mode_regime) {
    return slowest_mode_regime == ModeRegime::complex_pair ? FitMethod::peak_envelope
                                                           : FitMethod::raw_log;
}

/// Single-mode scenario shared by the convergence study.
struct ModalScenario {
    Grid grid;
    PhysicalParams params;
    std::vector<int> mode;
    double u0_amplitude = 0.0;
    double u1_amplitude = 0.0;
    double t_end = 1.0;
    Scheme scheme = Scheme::semi_implicit_euler;
    double margin = 0.45;

    enum class Reference { modal_exact, richardson };
    Reference reference = Reference::modal_exact;
};

struct ConvergenceRow {
    double dt = 0.0;
    double error = 0.0;
    double observed_order = 0.0;
    bool order_defined = false;
};

namespace detail {
inline StateVector integrate_final(const StateVector& v0, double dt, double t_end, Scheme scheme,
                                   const SparseOperator& lap, const PhysicalParams& params,
                                   double margin) {
    SchemeConfig cfg;
    cfg.dt = dt;
    cfg.t_end = t_end;
    cfg.scheme = scheme;
    cfg.parabolicity_margin = margin;
    cfg.record_every = std::numeric_limits<int>::max();
    Trajectory traj = simulate(v0, cfg, lap, params);
    if (traj.status != RunStatus::completed)
        throw SolverFailure("convergence scenario left the parabolic regime");
    return traj.samples.back().state;
}
}  // namespace detail

/// Time-refinement study for a single-mode scenario: errors of the final
/// state against the exact modal solution of the frozen linear problem (or a
/// Richardson-refined reference for genuinely nonlinear runs) and the
/// observed orders from consecutive ratios. Orders are undefined on the
/// first row and wherever consecutive dt values coincide.
inline std::vector<ConvergenceRow> convergence_study(const ModalScenario& sc,
                                                     std::span<const double> dt_list) {
    if (dt_list.size() < 3) throw InvalidArgument("convergence_study: need at least 3 dt values");
    for (std::size_t i = 0; i < dt_list.size(); ++i) {
        if (!(dt_list[i] > 0.0)) throw InvalidArgument("convergence_study: dt values must be > 0");
        if (i > 0 && dt_list[i] > dt_list[i - 1])
            throw InvalidArgument("convergence_study: dt list must be non-increasing");
    }

    const SparseOperator lap = build_dirichlet_laplacian(sc.grid);
    const Field phi = sine_mode(sc.grid, sc.mode);
    StateVector v0{Field{sc.grid, sc.u0_amplitude * phi.values},
                   Field{sc.grid, sc.u1_amplitude * phi.values}};

    StateVector reference = StateVector::zero(sc.grid);
    if (sc.reference == ModalScenario::Reference::modal_exact) {
        const double a_h = rayleigh_quotient(lap, phi);
        const auto [alpha, beta] =
            modal_coefficients(a_h, sc.params, sc.u0_amplitude, sc.u1_amplitude);
        const auto [y, dy] = modal_exact_solution(a_h, sc.params, alpha, beta, sc.t_end);
        reference = StateVector{Field{sc.grid, y * phi.values}, Field{sc.grid, dy * phi.values}};
    } else {
        const double dt_fine = dt_list.back() / 4.0;
        reference = detail::integrate_final(v0, dt_fine, sc.t_end, sc.scheme, lap, sc.params,
                                            sc.margin);
    }

    const double cell = sc.grid.cell_volume();
    std::vector<ConvergenceRow> rows;
    rows.reserve(dt_list.size());
    for (std::size_t i = 0; i < dt_list.size(); ++i) {
        const StateVector vt = detail::integrate_final(v0, dt_list[i], sc.t_end, sc.scheme, lap,
                                                       sc.params, sc.margin);
        ConvergenceRow row;
        row.dt = dt_list[i];
        row.error = std::sqrt(cell * ((vt.v1.values - reference.v1.values).squaredNorm() +
                                      (vt.v2.values - reference.v2.values).squaredNorm()));
        if (i > 0) {
            const ConvergenceRow& prev = rows.back();
            if (prev.dt != row.dt && row.error > 0.0 && prev.error > 0.0) {
                row.observed_order = std::log(prev.error / row.error) / std::log(prev.dt / row.dt);
                row.order_defined = true;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

struct SweepRow {
    double amplitude = 0.0;
    RunStatus status = RunStatus::completed;
    std::optional<double> omega_hat;
    std::optional<double> residual_rms;
    std::optional<double> violation_time;
};

/// Extremes of a sweep table: the largest amplitude that completed with a
/// positive fitted decay rate, and the smallest amplitude that violated the
/// parabolic margin.
struct SweepSummary {
    std::optional<double> largest_completed_decaying;
    std::optional<double> smallest_violating;
};

inline SweepSummary summarize_sweep(std::span<const SweepRow> rows) {
    SweepSummary summary;
    for (const SweepRow& row : rows) {
        if (row.status == RunStatus::completed && row.omega_hat && *row.omega_hat > 0.0)
            summary.largest_completed_decaying = row.amplitude;
        if (row.status == RunStatus::parabolicity_violation && !summary.smallest_violating)
            summary.smallest_violating = row.amplitude;
    }
    return summary;
}

/// Runs one simulation per amplitude (v0 = amplitude * base_shape) and fits
/// the decay rate of every completed run. Rows are independent and may be
/// evaluated concurrently; results are ordered by amplitude regardless of
/// the number of jobs.
inline std::vector<SweepRow> stability_sweep(const StateVector& base_shape,
                                             std::span<const double> amplitudes,
                                             const SchemeConfig& cfg, const SparseOperator& lap,
                                             const PhysicalParams& params, const NormSpec& spec,
                                             double window_fraction, FitMethod method,
                                             int jobs = 1) {
    require_state(base_shape, "stability_sweep");
    if (amplitudes.empty()) throw InvalidArgument("sweep.amplitudes: must be nonempty");
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
        if (!(amplitudes[i] >= 0.0)) throw InvalidArgument("sweep.amplitudes: must be nonnegative");
        if (i > 0 && !(amplitudes[i] > amplitudes[i - 1]))
            throw InvalidArgument("sweep.amplitudes: must be strictly increasing");
    }
    if (jobs < 1) throw InvalidArgument("jobs: must be >= 1");

    const GradientOperator grad = build_forward_gradient(base_shape.v1.grid);
    std::vector<SweepRow> rows(amplitudes.size());

    auto run_row = [&](std::size_t i) {
        const double amp = amplitudes[i];
        StateVector v0{Field{base_shape.v1.grid, amp * base_shape.v1.values},
                       Field{base_shape.v2.grid, amp * base_shape.v2.values}};
        const Trajectory traj = simulate(v0, cfg, lap, params);
        SweepRow row;
        row.amplitude = amp;
        row.status = traj.status;
        if (traj.status == RunStatus::parabolicity_violation) {
            row.violation_time = traj.violation_time;
        } else if (amp > 0.0) {
            try {
                const DecayFit fit = fit_decay_rate(traj, spec, lap, grad, window_fraction, method);
                row.omega_hat = fit.omega_hat;
                row.residual_rms = fit.residual_rms;
            } catch (const DegenerateFit&) {
                // row stays completed with the fit columns empty
            }
        }
        rows[i] = row;
    };

    const int workers = std::min<int>(jobs, static_cast<int>(amplitudes.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < amplitudes.size(); ++i) run_row(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                try {
                    for (std::size_t i = next.fetch_add(1); i < rows.size(); i = next.fetch_add(1))
                        run_row(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
        for (std::thread& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }
    return rows;
}

}  // namespace westervelt
