#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "westervelt/coefficient.hpp"
#include "westervelt/state.hpp"

namespace westervelt {

/// Discrete block operator [[0, -I], [c²A, bA]] acting on (v1, v2), with
/// A = diag(a) L and L the positive discrete Laplacian.
struct BlockOperator {
    CoefficientField coeff;
    SparseOperator lap;
    PhysicalParams params;

    Eigen::Index field_dim() const noexcept { return lap.dim(); }
};

/// (w1, w2) = (-v2, c²A v1 + bA v2).
inline StateVector apply_block(const BlockOperator& op, const StateVector& v) {
    require_state(v, "apply_block");
    require_dim(v.v1.values.size(), op.field_dim(), "apply_block");
    const auto& a = op.coeff.a.values;
    Eigen::VectorXd w2 = a.cwiseProduct(op.params.c * op.params.c * (op.lap.matrix * v.v1.values) +
                                        op.params.b * (op.lap.matrix * v.v2.values));
    return {Field{v.v1.grid, -v.v2.values}, Field{v.v2.grid, std::move(w2)}};
}

inline ComplexState apply_block(const BlockOperator& op, const ComplexState& v) {
    require_dim(v.v1.size(), op.field_dim(), "apply_block");
    require_dim(v.v2.size(), op.field_dim(), "apply_block");
    const Eigen::VectorXcd a = op.coeff.a.values.cast<Complex>();
    Eigen::VectorXcd w2 = a.cwiseProduct(op.params.c * op.params.c * (op.lap.matrix * v.v1) +
                                         op.params.b * (op.lap.matrix * v.v2));
    return {-v.v2, std::move(w2)};
}

/// Scalar spectral parameter μ(λ) = λ² / (λb - c²) that carries points of the
/// block resolvent set to the resolvent set of A. Undefined on the line
/// λb = c²; values within tol_scale·(1+|λ|) of it raise SingularMu.
inline Complex mu_map(Complex lambda, const PhysicalParams& params, double tol_scale = 1e-12) {
    const Complex denom = lambda * params.b - params.c * params.c;
    if (std::abs(denom) <= tol_scale * (1.0 + std::abs(lambda))) throw SingularMu(lambda);
    return lambda * lambda / denom;
}

enum class ModeRegime { complex_pair, real_pair, double_root };

namespace detail {
inline double mode_discriminant(double a, const PhysicalParams& p) {
    const double half = 0.5 * a * p.b;
    return half * half - a * p.c * p.c;
}

inline double mode_discriminant_scale(double a, const PhysicalParams& p) {
    const double half = 0.5 * a * p.b;
    return half * half + a * p.c * p.c;
}
}  // namespace detail

inline ModeRegime mode_regime(double a, const PhysicalParams& params) {
    if (!(a > 0.0)) throw InvalidArgument("mode_regime: a must be > 0");
    const double disc = detail::mode_discriminant(a, params);
    if (std::abs(disc) <= 1e-12 * detail::mode_discriminant_scale(a, params))
        return ModeRegime::double_root;
    return disc < 0.0 ? ModeRegime::complex_pair : ModeRegime::real_pair;
}

/// The two block-operator eigenvalues attached to an eigenvalue a > 0 of the
/// scalar operator A: the roots ab/2 ± sqrt(a²b²/4 - ac²) of μ(λ) = a.
/// Complex-conjugate when a²b²/4 < ac², both real otherwise; at the double
/// root the repeated value is returned twice (see mode_regime).
inline std::pair<Complex, Complex> eigenvalue_pair(double a, const PhysicalParams& params) {
    if (!(a > 0.0)) throw InvalidArgument("eigenvalue_pair: a must be > 0");
    const double half = 0.5 * a * params.b;
    const double disc = detail::mode_discriminant(a, params);
    switch (mode_regime(a, params)) {
        case ModeRegime::double_root:
            return {Complex(half, 0.0), Complex(half, 0.0)};
        case ModeRegime::complex_pair: {
            const double s = std::sqrt(-disc);
            return {Complex(half, s), Complex(half, -s)};
        }
        case ModeRegime::real_pair:
        default: {
            // The larger root is cancellation-free; the smaller one comes from
            // the root product λ₊ λ₋ = a c².
            const double r = std::sqrt(disc);
            const double large = half + r;
            return {Complex(large, 0.0), Complex(a * params.c * params.c / large, 0.0)};
        }
    }
}

/// λ₀ = min{(b/2) λ₁(A), c²/b}: every spectral point of the block operator
/// has real part at least λ₀.
inline double spectral_bound(double lambda1_A, const PhysicalParams& params) {
    if (!(lambda1_A > 0.0)) throw InvalidArgument("spectral_bound: lambda1_A must be > 0");
    return std::min(0.5 * params.b * lambda1_A, params.c * params.c / params.b);
}

/// True iff |λb - c²| > tol and μ(λ) keeps distance > tol from the given
/// (sorted, nonempty) spectrum of A.
inline bool in_resolvent_set(Complex lambda, std::span<const double> spectrum_A,
                             const PhysicalParams& params, double tol) {
    if (spectrum_A.empty()) throw InvalidArgument("in_resolvent_set: empty spectrum");
    for (std::size_t i = 1; i < spectrum_A.size(); ++i) {
        if (spectrum_A[i] < spectrum_A[i - 1])
            throw InvalidArgument("in_resolvent_set: spectrum must be sorted ascending");
    }
    const Complex denom = lambda * params.b - params.c * params.c;
    if (!(std::abs(denom) > tol)) return false;
    const Complex m = lambda * lambda / denom;
    double dist = std::numeric_limits<double>::infinity();
    for (double a : spectrum_A) dist = std::min(dist, std::abs(m - a));
    return dist > tol;
}

/// Applies (λ - 𝒜)⁻¹ to (f, g) through the scalar factorization
/// R_λ = (-λ² I + (λb - c²) A)⁻¹ and the block inverse
///   v1 = -R_λ (λ - bA) f + R_λ g,   v2 = f - λ v1,
/// i.e. two N-dimensional sparse solves with one factorization instead of a
/// 2N-dimensional solve. Throws SingularResolvent when the factorization
/// fails or the relative residual of (λ - 𝒜)v = rhs exceeds residual_tol.
inline ComplexState apply_resolvent(Complex lambda, const CoefficientField& coeff,
                                    const SparseOperator& lap, const PhysicalParams& params,
                                    const ComplexState& rhs, double residual_tol = 1e-10,
                                    double* achieved_residual = nullptr) {
    const Eigen::Index n = lap.dim();
    require_dim(rhs.v1.size(), n, "apply_resolvent");
    require_dim(rhs.v2.size(), n, "apply_resolvent");
    require_dim(coeff.a.values.size(), n, "apply_resolvent");

    const double rhs_norm = std::sqrt(rhs.v1.squaredNorm() + rhs.v2.squaredNorm());
    if (rhs_norm == 0.0) {
        if (achieved_residual != nullptr) *achieved_residual = 0.0;
        return ComplexState::zero(n);
    }

    const Complex factor = lambda * params.b - params.c * params.c;

    // M = -λ² I + (λb - c²) diag(a) L, assembled row-scaled from L.
    std::vector<Eigen::Triplet<Complex>> entries;
    entries.reserve(static_cast<std::size_t>(lap.matrix.nonZeros()) + static_cast<std::size_t>(n));
    const auto& a = coeff.a.values;
    for (int col = 0; col < lap.matrix.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(lap.matrix, col); it; ++it) {
            entries.emplace_back(it.row(), it.col(), factor * a[it.row()] * it.value());
        }
    }
    const Complex lambda2 = lambda * lambda;
    for (Eigen::Index i = 0; i < n; ++i) entries.emplace_back(i, i, -lambda2);
    Eigen::SparseMatrix<Complex> m(n, n);
    m.setFromTriplets(entries.begin(), entries.end());
    m.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<Complex>> solver;
    solver.compute(m);
    if (solver.info() != Eigen::Success)
        throw SingularResolvent(lambda, std::numeric_limits<double>::infinity());

    const Eigen::VectorXcd ac = a.cast<Complex>();
    const Eigen::VectorXcd shifted_f =
        lambda * rhs.v1 - params.b * ac.cwiseProduct(lap.matrix * rhs.v1);  // (λ - bA) f
    const Eigen::VectorXcd x = solver.solve(shifted_f);
    const Eigen::VectorXcd y = solver.solve(rhs.v2);
    if (solver.info() != Eigen::Success)
        throw SingularResolvent(lambda, std::numeric_limits<double>::infinity());

    ComplexState v{y - x, Eigen::VectorXcd()};
    v.v2 = rhs.v1 - lambda * v.v1;

    // Defining-equation residual: (λ - 𝒜)v = (λ v1 + v2, λ v2 - c²A v1 - bA v2).
    const Eigen::VectorXcd r1 = lambda * v.v1 + v.v2 - rhs.v1;
    const Eigen::VectorXcd r2 =
        lambda * v.v2 -
        ac.cwiseProduct(params.c * params.c * (lap.matrix * v.v1) + params.b * (lap.matrix * v.v2)) -
        rhs.v2;
    const double residual = std::sqrt(r1.squaredNorm() + r2.squaredNorm()) / rhs_norm;
    if (!(residual <= residual_tol)) throw SingularResolvent(lambda, residual);
    if (achieved_residual != nullptr) *achieved_residual = residual;
    return v;
}

}  // namespace westervelt
