#pragma once

#include <complex>

#include <Eigen/Core>

#include "westervelt/domain.hpp"

namespace westervelt {

using Complex = std::complex<double>;

/// First-order system state (v1, v2) = (u, u_t) as grid fields.
struct StateVector {
    Field v1;
    Field v2;

    static StateVector zero(const Grid& g) { return {Field::zero(g), Field::zero(g)}; }
};

inline void require_state(const StateVector& v, const char* what) {
    require_same_layout(v.v1, v.v2, what);
}

/// Complex-valued state used by the resolvent computations; real states are
/// promoted on entry. Fields stay real everywhere else.
struct ComplexState {
    Eigen::VectorXcd v1;
    Eigen::VectorXcd v2;

    static ComplexState zero(Eigen::Index n) {
        return {Eigen::VectorXcd::Zero(n), Eigen::VectorXcd::Zero(n)};
    }
};

inline ComplexState to_complex(const StateVector& v) {
    require_state(v, "to_complex");
    return {v.v1.values.cast<Complex>(), v.v2.values.cast<Complex>()};
}

}  // namespace westervelt
