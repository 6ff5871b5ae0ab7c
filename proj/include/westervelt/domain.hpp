#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>

#include <Eigen/Core>

#include "westervelt/errors.hpp"

namespace westervelt {

/// Bounded product domain: the interval (0, L) or the axis-aligned
/// rectangle (0, Lx) x (0, Ly).
class Domain {
public:
    static Domain interval(double length) { return Domain(1, {length, 0.0}); }
    static Domain rectangle(double lx, double ly) { return Domain(2, {lx, ly}); }

    int dim() const noexcept { return dim_; }

    double length(int axis) const {
        if (axis < 0 || axis >= dim_) throw InvalidArgument("domain axis out of range");
        return lengths_[static_cast<std::size_t>(axis)];
    }

private:
    Domain(int dim, std::array<double, 2> lengths) : dim_(dim), lengths_(lengths) {
        for (int ax = 0; ax < dim_; ++ax) {
            if (!(lengths_[static_cast<std::size_t>(ax)] > 0.0))
                throw InvalidArgument("domain.lengths: must be strictly positive");
        }
    }

    int dim_;
    std::array<double, 2> lengths_;
};

/// Uniform grid of interior nodes on a product domain. Homogeneous Dirichlet
/// boundary values are implied and never stored. Along an axis of length L
/// with n interior nodes, the spacing is exactly h = L/(n+1) and the node
/// coordinates are h, 2h, ..., nh.
///
/// Flat node index in 2D: idx = j * nx + i (x fastest).
class Grid {
public:
    Grid(const Domain& domain, std::span<const int> n_per_axis) : domain_(domain) {
        if (static_cast<int>(n_per_axis.size()) != domain.dim())
            throw InvalidArgument("grid.n_per_axis: one entry per domain axis required");
        n_ = {1, 1};
        h_ = {0.0, 0.0};
        for (int ax = 0; ax < domain.dim(); ++ax) {
            const int n = n_per_axis[static_cast<std::size_t>(ax)];
            if (n < 2) throw InvalidArgument("grid.n_per_axis: need at least 2 interior nodes per axis");
            n_[static_cast<std::size_t>(ax)] = n;
            h_[static_cast<std::size_t>(ax)] = domain.length(ax) / static_cast<double>(n + 1);
        }
    }

    Grid(const Domain& domain, std::initializer_list<int> n_per_axis)
        : Grid(domain, std::span<const int>(n_per_axis.begin(), n_per_axis.size())) {}

    const Domain& domain() const noexcept { return domain_; }
    int dim() const noexcept { return domain_.dim(); }

    int n(int axis) const { return n_[checked_axis(axis)]; }
    double h(int axis) const { return h_[checked_axis(axis)]; }

    /// Total interior node count.
    Eigen::Index size() const noexcept {
        return static_cast<Eigen::Index>(n_[0]) * static_cast<Eigen::Index>(n_[1]);
    }

    /// Volume of one grid cell, h (1D) or hx*hy (2D); used as quadrature weight.
    double cell_volume() const noexcept {
        double v = h_[0];
        if (dim() == 2) v *= h_[1];
        return v;
    }

    /// Coordinates of the interior node with flat index idx; unused axes are 0.
    std::array<double, 2> coord(Eigen::Index idx) const {
        const int nx = n_[0];
        const int i = static_cast<int>(idx % nx);
        const int j = static_cast<int>(idx / nx);
        return {static_cast<double>(i + 1) * h_[0], dim() == 2 ? static_cast<double>(j + 1) * h_[1] : 0.0};
    }

    friend bool operator==(const Grid& a, const Grid& b) {
        if (a.dim() != b.dim()) return false;
        for (int ax = 0; ax < a.dim(); ++ax) {
            if (a.n(ax) != b.n(ax)) return false;
            if (a.domain().length(ax) != b.domain().length(ax)) return false;
        }
        return true;
    }

private:
    std::size_t checked_axis(int axis) const {
        if (axis < 0 || axis >= dim()) throw InvalidArgument("grid axis out of range");
        return static_cast<std::size_t>(axis);
    }

    Domain domain_;
    std::array<int, 2> n_{1, 1};
    std::array<double, 2> h_{0.0, 0.0};
};

/// Real scalar values on the interior nodes of a grid; boundary values are
/// implicitly zero.
struct Field {
    Grid grid;
    Eigen::VectorXd values;

    static Field zero(const Grid& g) { return {g, Eigen::VectorXd::Zero(g.size())}; }

    /// Samples f(x, y) at the interior nodes; y is passed as 0 on intervals.
    template <class F>
    static Field sample(const Grid& g, F&& f) {
        Eigen::VectorXd v(g.size());
        for (Eigen::Index idx = 0; idx < g.size(); ++idx) {
            const auto xy = g.coord(idx);
            v[idx] = f(xy[0], xy[1]);
        }
        return {g, std::move(v)};
    }

    double max_abs() const { return values.size() > 0 ? values.cwiseAbs().maxCoeff() : 0.0; }
};

inline void require_same_layout(const Field& a, const Field& b, const char* what) {
    if (!(a.grid == b.grid) || a.values.size() != b.values.size())
        throw InvalidArgument(std::string(what) + ": fields live on different grids");
}

inline void require_dim(Eigen::Index have, Eigen::Index want, const char* what) {
    if (have != want)
        throw InvalidArgument(std::string(what) + ": dimension mismatch (" + std::to_string(have) +
                              " vs " + std::to_string(want) + ")");
}

}  // namespace westervelt
