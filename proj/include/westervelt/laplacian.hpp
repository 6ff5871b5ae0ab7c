#pragma once

#include <vector>

#include <Eigen/Sparse>

#include "westervelt/domain.hpp"

namespace westervelt {

/// Square sparse operator acting on interior-node fields.
struct SparseOperator {
    Eigen::SparseMatrix<double> matrix;
    bool symmetric = false;

    Eigen::Index dim() const noexcept { return matrix.rows(); }
};

/// Rectangular sparse operator mapping interior-node values to edge
/// differences (one row per edge, all axes stacked).
struct GradientOperator {
    Eigen::SparseMatrix<double> matrix;
};

/// Assembles the positive discrete Laplacian -Δ_h with homogeneous Dirichlet
/// rows eliminated: the 3-point stencil (2/h², -1/h²) on intervals and the
/// 5-point stencil on rectangles. Symmetric positive definite.
inline SparseOperator build_dirichlet_laplacian(const Grid& grid) {
    const Eigen::Index size = grid.size();
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(size) * (grid.dim() == 1 ? 3 : 5));

    const int nx = grid.n(0);
    const int ny = grid.dim() == 2 ? grid.n(1) : 1;
    const double ihx2 = 1.0 / (grid.h(0) * grid.h(0));
    const double ihy2 = grid.dim() == 2 ? 1.0 / (grid.h(1) * grid.h(1)) : 0.0;
    const double diag = 2.0 * ihx2 + (grid.dim() == 2 ? 2.0 * ihy2 : 0.0);

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const Eigen::Index row = static_cast<Eigen::Index>(j) * nx + i;
            entries.emplace_back(row, row, diag);
            if (i > 0) entries.emplace_back(row, row - 1, -ihx2);
            if (i < nx - 1) entries.emplace_back(row, row + 1, -ihx2);
            if (grid.dim() == 2) {
                if (j > 0) entries.emplace_back(row, row - nx, -ihy2);
                if (j < ny - 1) entries.emplace_back(row, row + nx, -ihy2);
            }
        }
    }

    Eigen::SparseMatrix<double> mat(size, size);
    mat.setFromTriplets(entries.begin(), entries.end());
    mat.makeCompressed();
    return SparseOperator{std::move(mat), true};
}

/// Assembles forward edge differences (u_right - u_left)/h per axis, with
/// the implied zero boundary values included, so an axis with n interior
/// nodes contributes n+1 edges. The stacked operator G satisfies
/// G^T G == build_dirichlet_laplacian(grid).matrix.
inline GradientOperator build_forward_gradient(const Grid& grid) {
    const int nx = grid.n(0);
    const int ny = grid.dim() == 2 ? grid.n(1) : 1;
    const double ihx = 1.0 / grid.h(0);
    const double ihy = grid.dim() == 2 ? 1.0 / grid.h(1) : 0.0;

    const Eigen::Index x_rows = static_cast<Eigen::Index>(nx + 1) * ny;
    const Eigen::Index y_rows = grid.dim() == 2 ? static_cast<Eigen::Index>(ny + 1) * nx : 0;

    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(2 * (x_rows + y_rows)));

    // x-edges: edge e in row j sits between nodes (e-1, j) and (e, j).
    Eigen::Index row = 0;
    for (int j = 0; j < ny; ++j) {
        for (int e = 0; e <= nx; ++e, ++row) {
            const Eigen::Index base = static_cast<Eigen::Index>(j) * nx;
            if (e > 0) entries.emplace_back(row, base + e - 1, -ihx);
            if (e < nx) entries.emplace_back(row, base + e, ihx);
        }
    }
    // y-edges: edge e in column i sits between nodes (i, e-1) and (i, e).
    if (grid.dim() == 2) {
        for (int i = 0; i < nx; ++i) {
            for (int e = 0; e <= ny; ++e, ++row) {
                if (e > 0) entries.emplace_back(row, static_cast<Eigen::Index>(e - 1) * nx + i, -ihy);
                if (e < ny) entries.emplace_back(row, static_cast<Eigen::Index>(e) * nx + i, ihy);
            }
        }
    }

    Eigen::SparseMatrix<double> mat(x_rows + y_rows, grid.size());
    mat.setFromTriplets(entries.begin(), entries.end());
    mat.makeCompressed();
    return GradientOperator{std::move(mat)};
}

}  // namespace westervelt
