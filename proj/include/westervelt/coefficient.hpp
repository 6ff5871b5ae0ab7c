#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "westervelt/laplacian.hpp"
#include "westervelt/params.hpp"

namespace westervelt {

/// Nodewise coefficient a(x) = 1/(1 - 2k u(x)) together with its recorded
/// lower bound a0 = min_x a(x) > 0.
struct CoefficientField {
    Field a;
    double a0;
};

/// Builds the coefficient field from the state u. Succeeds iff
/// sup|u| <= margin; the margin must lie strictly inside (0, 1/(2k)).
inline CoefficientField assemble_coefficient(const Field& u, const PhysicalParams& params,
                                             double margin) {
    if (!(margin > 0.0 && margin < params.breakdown_bound()))
        throw InvalidArgument("parabolicity_margin: must lie in (0, 1/(2k))");

    const Eigen::Index n = u.values.size();
    Eigen::VectorXd a(n);
    double a0 = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double ui = u.values[i];
        if (std::abs(ui) > margin)
            throw ParabolicityViolation(static_cast<std::size_t>(i), std::abs(ui), margin);
        a[i] = 1.0 / (1.0 - 2.0 * params.k * ui);
        a0 = std::min(a0, a[i]);
    }
    return {Field{u.grid, std::move(a)}, a0};
}

/// Applies the coefficient-weighted operator A u = a(x) * (-Δ_h u) nodewise.
inline Field apply_weighted_laplacian(const CoefficientField& coeff, const SparseOperator& lap,
                                      const Field& u) {
    require_dim(u.values.size(), lap.dim(), "apply_weighted_laplacian");
    require_dim(coeff.a.values.size(), lap.dim(), "apply_weighted_laplacian");
    return Field{u.grid, coeff.a.values.cwiseProduct(lap.matrix * u.values)};
}

}  // namespace westervelt
