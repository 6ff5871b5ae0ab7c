#pragma once

#include <cmath>

#include "westervelt/laplacian.hpp"
#include "westervelt/state.hpp"

namespace westervelt {

enum class NormKind { lp, w2_surrogate, trace_surrogate };

/// Discrete norm selector. All kinds build on the weighted l_p norm
/// ‖u‖_p = (Σ_x h^d |u(x)|^p)^(1/p):
///   lp               ‖u‖_p
///   w2_surrogate     ‖u‖_p + ‖Δ_h u‖_p
///   trace_surrogate  ‖u‖_p + ‖∇_h u‖_p  (forward edge differences, same weight)
struct NormSpec {
    double p = 2.0;
    NormKind kind = NormKind::w2_surrogate;
};

inline void validate(const NormSpec& spec) {
    if (!(spec.p >= 1.0 && spec.p <= 8.0)) throw InvalidArgument("norm.p: must lie in [1, 8]");
}

namespace detail {
template <class Vec>
double weighted_lp(const Vec& values, double p, double cell_volume) {
    if (values.size() == 0) return 0.0;
    if (p == 2.0) return std::sqrt(cell_volume * values.squaredNorm());
    double sum = 0.0;
    for (Eigen::Index i = 0; i < values.size(); ++i) sum += std::pow(std::abs(values[i]), p);
    return std::pow(cell_volume * sum, 1.0 / p);
}
}  // namespace detail

inline double discrete_norm(const Field& u, const NormSpec& spec, const SparseOperator& lap,
                            const GradientOperator& grad) {
    validate(spec);
    const double cell = u.grid.cell_volume();
    switch (spec.kind) {
        case NormKind::lp:
            return detail::weighted_lp(u.values, spec.p, cell);
        case NormKind::w2_surrogate: {
            require_dim(u.values.size(), lap.dim(), "discrete_norm");
            const Eigen::VectorXd lu = lap.matrix * u.values;
            return detail::weighted_lp(u.values, spec.p, cell) + detail::weighted_lp(lu, spec.p, cell);
        }
        case NormKind::trace_surrogate:
        default: {
            require_dim(u.values.size(), grad.matrix.cols(), "discrete_norm");
            const Eigen::VectorXd gu = grad.matrix * u.values;
            return detail::weighted_lp(u.values, spec.p, cell) + detail::weighted_lp(gu, spec.p, cell);
        }
    }
}

/// Norm of the full state: v1 is measured by spec.kind and v2 by the matching
/// lower-order norm (trace_surrogate under w2_surrogate, otherwise the same
/// kind), so the default pairing is ‖u‖_{W2} + ‖u_t‖_{trace}.
inline double state_norm(const StateVector& v, const NormSpec& spec, const SparseOperator& lap,
                         const GradientOperator& grad) {
    NormSpec companion = spec;
    if (spec.kind == NormKind::w2_surrogate) companion.kind = NormKind::trace_surrogate;
    return discrete_norm(v.v1, spec, lap, grad) + discrete_norm(v.v2, companion, lap, grad);
}

}  // namespace westervelt
