#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/SparseCholesky>

#include "westervelt/block_operator.hpp"
#include "westervelt/norms.hpp"

namespace westervelt {

enum class Scheme { semi_implicit_euler, imex_trapezoid };

/// Time integration configuration. The implicit part always freezes the
/// coefficient at the previous step; the quadratic source is explicit.
struct SchemeConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    Scheme scheme = Scheme::semi_implicit_euler;
    double linear_solve_tol = 1e-10;
    double parabolicity_margin = 0.45;
    int record_every = 10;
    double record_norm_p = 2.0;
};

inline void validate(const SchemeConfig& cfg, const PhysicalParams& params) {
    if (!(cfg.dt > 0.0)) throw InvalidArgument("scheme.dt: must be > 0");
    if (!(cfg.t_end > 0.0)) throw InvalidArgument("scheme.t_end: must be > 0");
    if (!(cfg.parabolicity_margin > 0.0 && cfg.parabolicity_margin < params.breakdown_bound()))
        throw InvalidArgument("scheme.parabolicity_margin: must lie in (0, 1/(2k))");
    if (cfg.record_every < 1) throw InvalidArgument("scheme.record_every: must be >= 1");
    if (!(cfg.linear_solve_tol > 0.0)) throw InvalidArgument("scheme.linear_solve_tol: must be > 0");
    if (!(cfg.record_norm_p >= 1.0 && cfg.record_norm_p <= 8.0))
        throw InvalidArgument("scheme.record_norm_p: must lie in [1, 8]");
}

inline double default_margin(const PhysicalParams& params) { return 0.9 / (2.0 * params.k); }
inline double default_dt(double lambda0) { return std::min(1e-3, 0.1 / lambda0); }

enum class RunStatus { completed, parabolicity_violation };

struct TrajectorySample {
    double t = 0.0;
    StateVector state;
    double norm_u_w2 = 0.0;      // ‖u‖_p + ‖Δ_h u‖_p
    double norm_ut_trace = 0.0;  // ‖u_t‖_p + ‖∇_h u_t‖_p
    double max_abs_u = 0.0;
    double min_coeff_a = 0.0;  // min_x 1/(1 - 2k u); diagnostic only past a violation
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    RunStatus status = RunStatus::completed;
    std::optional<double> violation_time;
};

/// Quadratic source F(v) = (0, 2 v2² / (1 - 2k v1)). Throws
/// ParabolicityViolation when some node reaches |v1| >= 1/(2k).
inline StateVector quadratic_source(const StateVector& v, const PhysicalParams& params) {
    require_state(v, "quadratic_source");
    const Eigen::Index n = v.v1.values.size();
    const double bound = params.breakdown_bound();
    Eigen::VectorXd f2(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double u = v.v1.values[i];
        if (!(std::abs(u) < bound))
            throw ParabolicityViolation(static_cast<std::size_t>(i), std::abs(u), bound);
        const double ut = v.v2.values[i];
        f2[i] = 2.0 * ut * ut / (1.0 - 2.0 * params.k * u);
    }
    return {Field::zero(v.v1.grid), Field{v.v2.grid, std::move(f2)}};
}

namespace detail {

/// Solves (diag(w) + beta L) x = rhs with w > 0 and L SPD; the system matrix
/// is SPD, so a sparse LDLT factorization applies.
inline Eigen::VectorXd shifted_spd_solve(const SparseOperator& lap, const Eigen::VectorXd& w,
                                         double beta, const Eigen::VectorXd& rhs, double tol) {
    Eigen::SparseMatrix<double> m = beta * lap.matrix;
    for (Eigen::Index i = 0; i < m.rows(); ++i) m.coeffRef(i, i) += w[i];
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(m);
    if (solver.info() != Eigen::Success)
        throw SolverFailure("implicit step: LDLT factorization failed");
    Eigen::VectorXd x = solver.solve(rhs);
    if (solver.info() != Eigen::Success) throw SolverFailure("implicit step: solve failed");
    const double rhs_norm = rhs.norm();
    if (rhs_norm > 0.0) {
        const double residual = (m * x - rhs).norm() / rhs_norm;
        if (!(residual <= tol))
            throw SolverFailure("implicit step: relative residual " + std::to_string(residual) +
                                " above tolerance");
    }
    return x;
}

inline Eigen::VectorXd one_minus_2ku(const Field& u, const PhysicalParams& params) {
    return (1.0 - 2.0 * params.k * u.values.array()).matrix();
}

}  // namespace detail

/// One step of the semi-implicit Euler scheme: backward Euler in the block
/// operator with the coefficient frozen at v, the quadratic source explicit.
/// The first block row gives v1' = v1 + dt v2' exactly, so the implicit solve
/// reduces to the single N-dimensional SPD system
///   (diag(1-2k v1) + (dt b + dt² c²) L) v2' = rhs.
inline StateVector step_semi_implicit(const StateVector& v, double dt, const SparseOperator& lap,
                                      const PhysicalParams& params, double margin,
                                      double solve_tol = 1e-10) {
    require_state(v, "step_semi_implicit");
    require_dim(v.v1.values.size(), lap.dim(), "step_semi_implicit");
    assemble_coefficient(v.v1, params, margin);  // rejects states outside the margin

    const Eigen::VectorXd w = detail::one_minus_2ku(v.v1, params);
    const double c2 = params.c * params.c;
    const Eigen::VectorXd rhs = w.cwiseProduct(v.v2.values) +
                                dt * 2.0 * v.v2.values.cwiseProduct(v.v2.values) -
                                dt * c2 * (lap.matrix * v.v1.values);
    const double beta = dt * params.b + dt * dt * c2;
    Eigen::VectorXd v2_next = detail::shifted_spd_solve(lap, w, beta, rhs, solve_tol);
    Eigen::VectorXd v1_next = v.v1.values + dt * v2_next;
    return {Field{v.v1.grid, std::move(v1_next)}, Field{v.v2.grid, std::move(v2_next)}};
}

/// One step of the IMEX trapezoid scheme: trapezoidal in the block operator
/// with the coefficient frozen at v, the quadratic source extrapolated to
/// second order as 1.5 F(v_n) - 0.5 F(v_{n-1}). Eliminating the first row
/// leaves one SPD solve with beta = dt b/2 + dt² c²/4.
inline StateVector step_imex_trapezoid(const StateVector& v, double dt, const SparseOperator& lap,
                                       const PhysicalParams& params, double margin,
                                       const Eigen::VectorXd& f2_prev, double solve_tol = 1e-10) {
    require_state(v, "step_imex_trapezoid");
    require_dim(v.v1.values.size(), lap.dim(), "step_imex_trapezoid");
    require_dim(f2_prev.size(), lap.dim(), "step_imex_trapezoid");
    assemble_coefficient(v.v1, params, margin);

    const Eigen::VectorXd w = detail::one_minus_2ku(v.v1, params);
    const double c2 = params.c * params.c;
    const Eigen::VectorXd f2_now =
        (2.0 * v.v2.values.cwiseProduct(v.v2.values)).cwiseQuotient(w);
    const Eigen::VectorXd f2_star = 1.5 * f2_now - 0.5 * f2_prev;
    const double beta = 0.5 * dt * params.b + 0.25 * dt * dt * c2;
    const Eigen::VectorXd rhs = w.cwiseProduct(v.v2.values + dt * f2_star) -
                                dt * c2 * (lap.matrix * v.v1.values) -
                                beta * (lap.matrix * v.v2.values);
    Eigen::VectorXd v2_next = detail::shifted_spd_solve(lap, w, beta, rhs, solve_tol);
    Eigen::VectorXd v1_next = v.v1.values + 0.5 * dt * (v.v2.values + v2_next);
    return {Field{v.v1.grid, std::move(v1_next)}, Field{v.v2.grid, std::move(v2_next)}};
}

/// Startup form of the trapezoid step: uses F(v) itself for the explicit part.
inline StateVector step_imex_trapezoid(const StateVector& v, double dt, const SparseOperator& lap,
                                       const PhysicalParams& params, double margin,
                                       double solve_tol = 1e-10) {
    const Eigen::VectorXd f2 = quadratic_source(v, params).v2.values;
    return step_imex_trapezoid(v, dt, lap, params, margin, f2, solve_tol);
}

/// Integrates the quasilinear system from v0 until t_end or until the state
/// leaves the parabolic margin, whichever comes first. A violation is
/// recorded in the trajectory status (with the offending sample included)
/// rather than thrown. Deterministic: identical inputs give bitwise-identical
/// trajectories.
inline Trajectory simulate(const StateVector& v0, const SchemeConfig& cfg,
                           const SparseOperator& lap, const PhysicalParams& params) {
    validate(cfg, params);
    require_state(v0, "simulate");
    require_dim(v0.v1.values.size(), lap.dim(), "simulate");

    const GradientOperator grad = build_forward_gradient(v0.v1.grid);
    const NormSpec u_spec{cfg.record_norm_p, NormKind::w2_surrogate};
    const NormSpec ut_spec{cfg.record_norm_p, NormKind::trace_surrogate};

    auto make_sample = [&](double t, const StateVector& v) {
        return TrajectorySample{t,
                                v,
                                discrete_norm(v.v1, u_spec, lap, grad),
                                discrete_norm(v.v2, ut_spec, lap, grad),
                                v.v1.max_abs(),
                                (1.0 / (1.0 - 2.0 * params.k * v.v1.values.array())).minCoeff()};
    };

    Trajectory traj;
    traj.samples.push_back(make_sample(0.0, v0));
    if (v0.v1.max_abs() > cfg.parabolicity_margin) {
        traj.status = RunStatus::parabolicity_violation;
        traj.violation_time = 0.0;
        return traj;
    }

    const long n_steps = std::max<long>(1, std::lround(cfg.t_end / cfg.dt));
    StateVector v = v0;
    Eigen::VectorXd f2_prev;
    if (cfg.scheme == Scheme::imex_trapezoid)
        f2_prev = quadratic_source(v, params).v2.values;

    for (long step = 1; step <= n_steps; ++step) {
        const double t = static_cast<double>(step) * cfg.dt;
        StateVector next = [&] {
            if (cfg.scheme == Scheme::semi_implicit_euler)
                return step_semi_implicit(v, cfg.dt, lap, params, cfg.parabolicity_margin,
                                          cfg.linear_solve_tol);
            Eigen::VectorXd f2_now = quadratic_source(v, params).v2.values;
            StateVector stepped = step_imex_trapezoid(v, cfg.dt, lap, params,
                                                      cfg.parabolicity_margin, f2_prev,
                                                      cfg.linear_solve_tol);
            f2_prev = std::move(f2_now);
            return stepped;
        }();
        if (next.v1.max_abs() > cfg.parabolicity_margin) {
            traj.samples.push_back(make_sample(t, next));
            traj.status = RunStatus::parabolicity_violation;
            traj.violation_time = t;
            return traj;
        }
        v = std::move(next);
        if (step % cfg.record_every == 0 || step == n_steps) traj.samples.push_back(make_sample(t, v));
    }
    traj.status = RunStatus::completed;
    return traj;
}

/// Exact solution of the frozen-coefficient modal equation
/// y'' + a b y' + a c² y = 0 and its derivative, for the mode of A with
/// eigenvalue a. The decay rates are the eigenvalue pair λ±(a); the real
/// parametrization by (alpha, beta) depends on the regime:
///   complex pair λ = σ ± iω:  y = e^(-σt) (α cos ωt + β sin ωt)
///   real pair λ₊ > λ₋:        y = α e^(-λ₊ t) + β e^(-λ₋ t)
///   double root λ:            y = (α + β t) e^(-λ t)
inline std::pair<double, double> modal_exact_solution(double a, const PhysicalParams& params,
                                                      double alpha, double beta, double t) {
    const auto [plus, minus] = eigenvalue_pair(a, params);
    switch (mode_regime(a, params)) {
        case ModeRegime::complex_pair: {
            const double sigma = plus.real();
            const double omega = plus.imag();
            const double e = std::exp(-sigma * t);
            const double co = std::cos(omega * t);
            const double si = std::sin(omega * t);
            const double y = e * (alpha * co + beta * si);
            const double dy = e * ((-sigma * alpha + omega * beta) * co +
                                   (-sigma * beta - omega * alpha) * si);
            return {y, dy};
        }
        case ModeRegime::real_pair: {
            const double lp = plus.real();
            const double lm = minus.real();
            const double ep = std::exp(-lp * t);
            const double em = std::exp(-lm * t);
            return {alpha * ep + beta * em, -lp * alpha * ep - lm * beta * em};
        }
        case ModeRegime::double_root:
        default: {
            const double l = plus.real();
            const double e = std::exp(-l * t);
            return {(alpha + beta * t) * e, (beta - l * (alpha + beta * t)) * e};
        }
    }
}

/// Inverts the modal parametrization: coefficients (alpha, beta) reproducing
/// the initial data y(0) = y0, y'(0) = dy0.
inline std::pair<double, double> modal_coefficients(double a, const PhysicalParams& params,
                                                    double y0, double dy0) {
    const auto [plus, minus] = eigenvalue_pair(a, params);
    switch (mode_regime(a, params)) {
        case ModeRegime::complex_pair: {
            const double sigma = plus.real();
            const double omega = plus.imag();
            return {y0, (dy0 + sigma * y0) / omega};
        }
        case ModeRegime::real_pair: {
            const double lp = plus.real();
            const double lm = minus.real();
            const double alpha = -(dy0 + lm * y0) / (lp - lm);
            return {alpha, y0 - alpha};
        }
        case ModeRegime::double_root:
        default: {
            const double l = plus.real();
            return {y0, dy0 + l * y0};
        }
    }
}

}  // namespace westervelt
