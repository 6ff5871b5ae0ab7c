#pragma once

#include "westervelt/errors.hpp"

namespace westervelt {

/// Physical coefficients of the damped quasilinear wave equation:
/// c is the sound speed, b the diffusivity of sound, k the nonlinearity
/// parameter. All three must be strictly positive.
struct PhysicalParams {
    double c;
    double b;
    double k;

    PhysicalParams(double c_, double b_, double k_) : c(c_), b(b_), k(k_) {
        if (!(c > 0.0)) throw InvalidArgument("params.c: must be > 0");
        if (!(b > 0.0)) throw InvalidArgument("params.b: must be > 0");
        if (!(k > 0.0)) throw InvalidArgument("params.k: must be > 0");
    }

    /// The coefficient 1/(1 - 2k u) degenerates when |u| reaches this bound.
    double breakdown_bound() const noexcept { return 1.0 / (2.0 * k); }
};

}  // namespace westervelt
