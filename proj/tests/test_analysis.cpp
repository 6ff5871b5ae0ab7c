#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <numbers>

#include "oracles.hpp"

namespace wv = westervelt;
using Catch::Approx;

namespace {
constexpr double kPi = std::numbers::pi;

struct NormFixture {
    wv::Grid grid{wv::Domain::interval(kPi), {400}};
    wv::SparseOperator lap = wv::build_dirichlet_laplacian(grid);
    wv::GradientOperator grad = wv::build_forward_gradient(grid);
    wv::Field sine = wv::sine_mode(grid, std::array<int, 1>{1});
};
}  // namespace

TEST_CASE("discrete_norm values", "[analysis]") {
    const NormFixture fx;
    const double half_pi_sqrt = std::sqrt(kPi / 2.0);  // L2 norm of sin on (0, pi)

    SECTION("zero field has zero norm in every kind") {
        for (const wv::NormKind kind :
             {wv::NormKind::lp, wv::NormKind::w2_surrogate, wv::NormKind::trace_surrogate}) {
            REQUIRE(wv::discrete_norm(wv::Field::zero(fx.grid), {2.0, kind}, fx.lap, fx.grad) == 0.0);
        }
    }
    SECTION("L2 norm of sin is sqrt(pi/2), exactly at the discrete level") {
        const double n = wv::discrete_norm(fx.sine, {2.0, wv::NormKind::lp}, fx.lap, fx.grad);
        REQUIRE(n == Approx(half_pi_sqrt).epsilon(1e-12));
    }
    SECTION("W2 surrogate of sin approaches 2 sqrt(pi/2)") {
        const double n = wv::discrete_norm(fx.sine, {2.0, wv::NormKind::w2_surrogate}, fx.lap, fx.grad);
        REQUIRE(n == Approx(2.0 * half_pi_sqrt).margin(1e-4));
    }
    SECTION("trace surrogate of sin approaches 2 sqrt(pi/2)") {
        const double n =
            wv::discrete_norm(fx.sine, {2.0, wv::NormKind::trace_surrogate}, fx.lap, fx.grad);
        REQUIRE(n == Approx(2.0 * half_pi_sqrt).margin(1e-4));
    }
    SECTION("p outside [1, 8] is rejected") {
        REQUIRE_THROWS_AS(wv::discrete_norm(fx.sine, {0.5, wv::NormKind::lp}, fx.lap, fx.grad),
                          wv::InvalidArgument);
        REQUIRE_THROWS_AS(wv::discrete_norm(fx.sine, {9.0, wv::NormKind::lp}, fx.lap, fx.grad),
                          wv::InvalidArgument);
    }
}

TEST_CASE("discrete_norm is homogeneous and satisfies the triangle inequality",
          "[analysis][property]") {
    const wv::Grid grid(wv::Domain::interval(2.0), {80});
    const wv::SparseOperator lap = wv::build_dirichlet_laplacian(grid);
    const wv::GradientOperator grad = wv::build_forward_gradient(grid);
    auto rng = oracles::seeded_rng(20240817);
    std::uniform_real_distribution<double> scale(-5.0, 5.0);

    for (const double p : {1.0, 1.5, 2.0, 3.0, 8.0}) {
        for (const wv::NormKind kind :
             {wv::NormKind::lp, wv::NormKind::w2_surrogate, wv::NormKind::trace_surrogate}) {
            const wv::NormSpec spec{p, kind};
            for (int trial = 0; trial < 10; ++trial) {
                const wv::Field u = oracles::random_field(rng, grid);
                const wv::Field v = oracles::random_field(rng, grid);
                const double t = scale(rng);

                const double nu = wv::discrete_norm(u, spec, lap, grad);
                const wv::Field tu{grid, t * u.values};
                REQUIRE(wv::discrete_norm(tu, spec, lap, grad) ==
                        Approx(std::abs(t) * nu).epsilon(1e-13));

                const wv::Field sum{grid, u.values + v.values};
                REQUIRE(wv::discrete_norm(sum, spec, lap, grad) <=
                        nu + wv::discrete_norm(v, spec, lap, grad) + 1e-13);
            }
        }
    }
}

TEST_CASE("state_norm pairs the W2 kind with the trace companion", "[analysis]") {
    const NormFixture fx;
    auto rng = oracles::seeded_rng(3);
    const wv::StateVector v{oracles::random_field(rng, fx.grid), oracles::random_field(rng, fx.grid)};
    const wv::NormSpec spec{2.0, wv::NormKind::w2_surrogate};
    const double expected =
        wv::discrete_norm(v.v1, spec, fx.lap, fx.grad) +
        wv::discrete_norm(v.v2, {2.0, wv::NormKind::trace_surrogate}, fx.lap, fx.grad);
    REQUIRE(wv::state_norm(v, spec, fx.lap, fx.grad) == expected);
}

TEST_CASE("fit_log_series on synthetic data", "[analysis]") {
    SECTION("exact exponential 5 e^{-0.7 t} is recovered to 1e-10 for any window") {
        std::vector<double> ts, ns;
        for (int i = 0; i <= 500; ++i) {
            const double t = 0.02 * i;
            ts.push_back(t);
            ns.push_back(5.0 * std::exp(-0.7 * t));
        }
        for (const double window : {0.3, 0.5, 1.0}) {
            const wv::DecayFit fit = wv::fit_log_series(ts, ns, window, wv::FitMethod::raw_log);
            REQUIRE(fit.omega_hat == Approx(0.7).margin(1e-10));
            REQUIRE(fit.residual_rms <= 1e-12);
        }
        const wv::DecayFit fit = wv::fit_log_series(ts, ns, 1.0, wv::FitMethod::raw_log);
        REQUIRE(fit.intercept == Approx(std::log(5.0)).margin(1e-10));
    }

    SECTION("oscillatory envelope e^{-0.5 t} |cos(0.86 t)| needs the peak method") {
        std::vector<double> ts, ns;
        for (int i = 0; i <= 3000; ++i) {
            const double t = 0.01 * i;
            ts.push_back(t);
            ns.push_back(std::exp(-0.5 * t) * std::abs(std::cos(0.86 * t)));
        }
        const wv::DecayFit fit = wv::fit_log_series(ts, ns, 0.5, wv::FitMethod::peak_envelope);
        REQUIRE(fit.omega_hat == Approx(0.5).epsilon(0.02));
        REQUIRE(fit.n_points >= 3);
        REQUIRE(fit.method == wv::FitMethod::peak_envelope);
    }

    SECTION("zero norms raise DegenerateFit") {
        std::vector<double> ts, ns;
        for (int i = 0; i <= 100; ++i) {
            ts.push_back(0.1 * i);
            ns.push_back(0.0);
        }
        REQUIRE_THROWS_AS(wv::fit_log_series(ts, ns, 1.0, wv::FitMethod::raw_log),
                          wv::DegenerateFit);
        REQUIRE_THROWS_AS(wv::fit_log_series(ts, ns, 1.0, wv::FitMethod::peak_envelope),
                          wv::DegenerateFit);
    }

    SECTION("monotone data has no peaks") {
        std::vector<double> ts, ns;
        for (int i = 0; i <= 100; ++i) {
            ts.push_back(0.1 * i);
            ns.push_back(std::exp(-0.3 * 0.1 * i));
        }
        REQUIRE_THROWS_AS(wv::fit_log_series(ts, ns, 1.0, wv::FitMethod::peak_envelope),
                          wv::DegenerateFit);
    }

    SECTION("too few samples in the window is a precondition failure") {
        std::vector<double> ts{0, 1, 2, 3, 4, 5, 6, 7, 8};
        std::vector<double> ns(9, 1.0);
        REQUIRE_THROWS_AS(wv::fit_log_series(ts, ns, 1.0, wv::FitMethod::raw_log),
                          wv::InvalidArgument);
    }
}

TEST_CASE("choose_fit_method follows the slowest-mode regime", "[analysis]") {
    REQUIRE(wv::choose_fit_method(wv::ModeRegime::complex_pair) == wv::FitMethod::peak_envelope);
    REQUIRE(wv::choose_fit_method(wv::ModeRegime::real_pair) == wv::FitMethod::raw_log);
    REQUIRE(wv::choose_fit_method(wv::ModeRegime::double_root) == wv::FitMethod::raw_log);
}

TEST_CASE("fit_decay_rate on a linear first-mode run matches the discrete modal rate within 1%",
          "[analysis][slow]") {
    const wv::PhysicalParams params(1.0, 1.0, 1.0);
    const wv::Grid grid(wv::Domain::interval(kPi), {60});
    const wv::SparseOperator lap = wv::build_dirichlet_laplacian(grid);
    const wv::GradientOperator grad = wv::build_forward_gradient(grid);
    const wv::Field phi = wv::sine_mode(grid, std::array<int, 1>{1});
    const double a_h = wv::rayleigh_quotient(lap, phi);
    const double sigma = wv::eigenvalue_pair(a_h, params).second.real();

    wv::SchemeConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 20.0;
    cfg.parabolicity_margin = 0.45;
    cfg.record_every = 10;
    const wv::StateVector v0{wv::Field{grid, 1e-8 * phi.values}, wv::Field::zero(grid)};
    const wv::Trajectory traj = wv::simulate(v0, cfg, lap, params);

    const wv::DecayFit fit = wv::fit_decay_rate(traj, {2.0, wv::NormKind::w2_surrogate}, lap, grad,
                                                0.75, wv::FitMethod::peak_envelope);
    REQUIRE(fit.omega_hat == Approx(sigma).epsilon(0.01));
}

TEST_CASE("convergence_study observed orders", "[analysis]") {
    const wv::Grid grid(wv::Domain::interval(kPi), {50});
    const wv::PhysicalParams params(1.0, 1.0, 1.0);
    const std::vector<double> dts{4e-3, 2e-3, 1e-3};

    SECTION("semi-implicit Euler: orders in [0.9, 1.1]") {
        const wv::ModalScenario sc{grid, params, {1}, 1e-8, 0.0, 2.0,
                                   wv::Scheme::semi_implicit_euler, 0.45};
        const auto rows = wv::convergence_study(sc, dts);
        REQUIRE(rows.size() == 3);
        REQUIRE_FALSE(rows[0].order_defined);
        for (std::size_t i = 1; i < rows.size(); ++i) {
            REQUIRE(rows[i].order_defined);
            REQUIRE(rows[i].observed_order > 0.9);
            REQUIRE(rows[i].observed_order < 1.1);
        }
    }
    SECTION("imex trapezoid: orders in [1.8, 2.2]") {
        const wv::ModalScenario sc{grid, params, {1}, 1e-8, 0.0, 2.0,
                                   wv::Scheme::imex_trapezoid, 0.45};
        const auto rows = wv::convergence_study(sc, dts);
        for (std::size_t i = 1; i < rows.size(); ++i) {
            REQUIRE(rows[i].order_defined);
            REQUIRE(rows[i].observed_order > 1.8);
            REQUIRE(rows[i].observed_order < 2.2);
        }
    }
    SECTION("repeated dt entries give identical errors and an undefined order") {
        const wv::ModalScenario sc{grid, params, {1}, 1e-8, 0.0, 1.0,
                                   wv::Scheme::semi_implicit_euler, 0.45};
        const std::vector<double> repeated{2e-3, 2e-3, 1e-3};
        const auto rows = wv::convergence_study(sc, repeated);
        REQUIRE(rows[0].error == rows[1].error);
        REQUIRE_FALSE(rows[1].order_defined);
        REQUIRE(rows[2].order_defined);
    }
    SECTION("bad dt lists are rejected") {
        const wv::ModalScenario sc{grid, params, {1}, 1e-8, 0.0, 1.0,
                                   wv::Scheme::semi_implicit_euler, 0.45};
        REQUIRE_THROWS_AS(wv::convergence_study(sc, std::vector<double>{1e-3, 2e-3, 4e-3}),
                          wv::InvalidArgument);
        REQUIRE_THROWS_AS(wv::convergence_study(sc, std::vector<double>{1e-3, 5e-4}),
                          wv::InvalidArgument);
    }
    SECTION("nonlinear scenario against a Richardson-refined reference converges") {
        wv::ModalScenario sc{grid, params, {1}, 0.05, 0.0, 1.0,
                             wv::Scheme::semi_implicit_euler, 0.45};
        sc.reference = wv::ModalScenario::Reference::richardson;
        const auto rows = wv::convergence_study(sc, dts);
        REQUIRE(rows[1].error < rows[0].error);
        REQUIRE(rows[2].error < rows[1].error);
        for (std::size_t i = 1; i < rows.size(); ++i) {
            REQUIRE(rows[i].observed_order > 0.7);
            REQUIRE(rows[i].observed_order < 1.3);
        }
    }
}

TEST_CASE("stability_sweep", "[analysis][slow]") {
    const wv::PhysicalParams params(1.0, 1.0, 1.0);
    const wv::Grid grid(wv::Domain::interval(kPi), {40});
    const wv::SparseOperator lap = wv::build_dirichlet_laplacian(grid);
    const wv::Field phi = wv::sine_mode(grid, std::array<int, 1>{1});
    const double scale = phi.max_abs();
    const wv::StateVector base{wv::Field{grid, phi.values / scale}, wv::Field::zero(grid)};

    wv::SchemeConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 20.0;
    cfg.parabolicity_margin = 0.45;
    cfg.record_every = 10;
    const wv::NormSpec spec{2.0, wv::NormKind::w2_surrogate};
    const std::vector<double> amplitudes{0.0, 1e-3, 0.6};

    const auto rows = wv::stability_sweep(base, amplitudes, cfg, lap, params, spec, 0.75,
                                          wv::FitMethod::peak_envelope);
    REQUIRE(rows.size() == 3);

    REQUIRE(rows[0].status == wv::RunStatus::completed);
    REQUIRE_FALSE(rows[0].omega_hat.has_value());  // zero trajectory: fit skipped

    REQUIRE(rows[1].status == wv::RunStatus::completed);
    REQUIRE(rows[1].omega_hat.has_value());
    REQUIRE(*rows[1].omega_hat >= 0.45);

    REQUIRE(rows[2].status == wv::RunStatus::parabolicity_violation);
    REQUIRE(rows[2].violation_time.has_value());
    REQUIRE(*rows[2].violation_time == 0.0);
    REQUIRE_FALSE(rows[2].omega_hat.has_value());

    SECTION("concurrent evaluation returns identical rows") {
        const auto parallel = wv::stability_sweep(base, amplitudes, cfg, lap, params, spec, 0.75,
                                                  wv::FitMethod::peak_envelope, 3);
        REQUIRE(parallel.size() == rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            REQUIRE(parallel[i].status == rows[i].status);
            REQUIRE(parallel[i].omega_hat == rows[i].omega_hat);
            REQUIRE(parallel[i].residual_rms == rows[i].residual_rms);
            REQUIRE(parallel[i].violation_time == rows[i].violation_time);
        }
    }

    SECTION("amplitude validation") {
        REQUIRE_THROWS_AS(wv::stability_sweep(base, std::vector<double>{0.1, 0.1}, cfg, lap,
                                              params, spec, 0.75, wv::FitMethod::peak_envelope),
                          wv::InvalidArgument);
        REQUIRE_THROWS_AS(wv::stability_sweep(base, std::vector<double>{-0.1, 0.1}, cfg, lap,
                                              params, spec, 0.75, wv::FitMethod::peak_envelope),
                          wv::InvalidArgument);
    }
}
