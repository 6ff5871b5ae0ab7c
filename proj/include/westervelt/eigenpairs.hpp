#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/SparseLU>

#include "westervelt/laplacian.hpp"

namespace westervelt {

struct EigenPair {
    double eigenvalue;  // continuum value
    Field eigenfield;   // sine mode sampled at the interior nodes, not normalized
};

/// Closed-form Dirichlet eigenpairs of the continuum -Δ on the product
/// domain, in ascending order: (j π / L)² with eigenfunction sin(j π x / L)
/// on the interval, tensor sums and products on the rectangle. The sampled
/// sine modes are also exact eigenvectors of the discrete Laplacian, whose
/// eigenvalues they approach at rate h².
inline std::vector<EigenPair> analytic_eigenpairs(const Grid& grid, int count) {
    if (count < 1) throw InvalidArgument("analytic_eigenpairs: count must be >= 1");
    if (static_cast<Eigen::Index>(count) > grid.size())
        throw InvalidArgument("analytic_eigenpairs: count exceeds the grid node count");

    constexpr double pi = std::numbers::pi;
    struct ModeIndex {
        double value;
        int jx, jy;
    };
    std::vector<ModeIndex> modes;

    if (grid.dim() == 1) {
        const double lx = grid.domain().length(0);
        modes.reserve(static_cast<std::size_t>(count));
        for (int j = 1; j <= count; ++j) {
            const double w = static_cast<double>(j) * pi / lx;
            modes.push_back({w * w, j, 0});
        }
    } else {
        const double lx = grid.domain().length(0);
        const double ly = grid.domain().length(1);
        modes.reserve(static_cast<std::size_t>(grid.size()));
        for (int jy = 1; jy <= grid.n(1); ++jy) {
            for (int jx = 1; jx <= grid.n(0); ++jx) {
                const double wx = static_cast<double>(jx) * pi / lx;
                const double wy = static_cast<double>(jy) * pi / ly;
                modes.push_back({wx * wx + wy * wy, jx, jy});
            }
        }
        std::sort(modes.begin(), modes.end(), [](const ModeIndex& a, const ModeIndex& b) {
            if (a.value != b.value) return a.value < b.value;
            if (a.jx != b.jx) return a.jx < b.jx;
            return a.jy < b.jy;
        });
        modes.resize(static_cast<std::size_t>(count));
    }

    std::vector<EigenPair> pairs;
    pairs.reserve(modes.size());
    for (const ModeIndex& m : modes) {
        Field field = Field::sample(grid, [&](double x, double y) {
            double v = std::sin(static_cast<double>(m.jx) * pi * x / grid.domain().length(0));
            if (grid.dim() == 2) v *= std::sin(static_cast<double>(m.jy) * pi * y / grid.domain().length(1));
            return v;
        });
        pairs.push_back({m.value, std::move(field)});
    }
    return pairs;
}

/// Samples the product sine mode Π_ax sin(j_ax π x / L_ax). On product grids
/// these are exact eigenvectors of the discrete Dirichlet Laplacian, so the
/// Rayleigh quotient below recovers the discrete eigenvalue to rounding.
inline Field sine_mode(const Grid& grid, std::span<const int> mode) {
    if (static_cast<int>(mode.size()) != grid.dim())
        throw InvalidArgument("initial.mode: one index per domain axis required");
    for (int ax = 0; ax < grid.dim(); ++ax) {
        const int j = mode[static_cast<std::size_t>(ax)];
        if (j < 1 || j > grid.n(ax))
            throw InvalidArgument("initial.mode: index must lie in [1, n] per axis");
    }
    constexpr double pi = std::numbers::pi;
    return Field::sample(grid, [&](double x, double y) {
        double v = std::sin(static_cast<double>(mode[0]) * pi * x / grid.domain().length(0));
        if (grid.dim() == 2)
            v *= std::sin(static_cast<double>(mode[1]) * pi * y / grid.domain().length(1));
        return v;
    });
}

/// Rayleigh quotient u' (op u) / (u' u).
inline double rayleigh_quotient(const SparseOperator& op, const Field& u) {
    require_dim(u.values.size(), op.dim(), "rayleigh_quotient");
    const double denom = u.values.squaredNorm();
    if (!(denom > 0.0)) throw InvalidArgument("rayleigh_quotient: zero field");
    return u.values.dot(op.matrix * u.values) / denom;
}

struct SmallestEigOptions {
    double tol = 1e-10;
    int max_iterations = 10000;
    double shift = 0.0;
};

/// Smallest eigenvalue of the (optionally coefficient-weighted) operator
/// diag(coeff) * op by shifted inverse power iteration on the equivalent
/// symmetric pencil op u = λ diag(1/coeff) u, with a sparse direct
/// factorization of op - shift * diag(1/coeff). Iterates are normalized in
/// the max norm; convergence is measured on the relative change of the
/// Rayleigh quotient.
inline double smallest_eigenvalue(const SparseOperator& op, const Field* coeff,
                                  SmallestEigOptions opts = {}) {
    if (!op.symmetric) throw InvalidArgument("smallest_eigenvalue: operator must be symmetric");
    const Eigen::Index n = op.dim();
    if (n < 1) throw InvalidArgument("smallest_eigenvalue: empty operator");

    Eigen::VectorXd weight = Eigen::VectorXd::Ones(n);
    if (coeff != nullptr) {
        require_dim(coeff->values.size(), n, "smallest_eigenvalue");
        if (!(coeff->values.minCoeff() > 0.0))
            throw InvalidArgument("smallest_eigenvalue: coefficient field must be strictly positive");
        weight = coeff->values.cwiseInverse();
    }

    Eigen::SparseMatrix<double> shifted = op.matrix;
    if (opts.shift != 0.0) {
        Eigen::SparseMatrix<double> w(n, n);
        w.setIdentity();
        w.diagonal() = weight;
        shifted = op.matrix - opts.shift * w;
    }
    Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
    solver.compute(shifted);
    if (solver.info() != Eigen::Success)
        throw SolverFailure("smallest_eigenvalue: factorization failed (operator singular at the shift?)");

    Eigen::VectorXd u = Eigen::VectorXd::Ones(n);
    double rq_prev = 0.0;
    bool have_prev = false;
    for (int it = 0; it < opts.max_iterations; ++it) {
        Eigen::VectorXd z = solver.solve(weight.cwiseProduct(u));
        if (solver.info() != Eigen::Success)
            throw SolverFailure("smallest_eigenvalue: solve failed");
        const double rq = z.dot(op.matrix * z) / z.dot(weight.cwiseProduct(z));
        z /= z.cwiseAbs().maxCoeff();
        if (have_prev && std::abs(rq - rq_prev) <= opts.tol * std::abs(rq)) return rq;
        rq_prev = rq;
        have_prev = true;
        u = std::move(z);
    }
    throw SolverFailure("smallest_eigenvalue: no convergence within " +
                        std::to_string(opts.max_iterations) + " iterations");
}

inline double smallest_eigenvalue(const SparseOperator& op, SmallestEigOptions opts = {}) {
    return smallest_eigenvalue(op, nullptr, opts);
}

}  // namespace westervelt
