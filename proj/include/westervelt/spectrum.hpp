#pragma once

#include <algorithm>
#include <vector>

#include <Eigen/Dense>

#include "westervelt/block_operator.hpp"

namespace westervelt {

/// Largest operator size handled by the dense spectrum path.
inline constexpr Eigen::Index kDenseSpectrumLimit = 2500;

/// All eigenvalues of A = diag(a) L in ascending order. A is similar to the
/// symmetric positive definite matrix sqrt(diag(a)) L sqrt(diag(a)), so the
/// spectrum is real and strictly positive; it is computed densely through
/// that similarity. Desk-scale only (dim <= kDenseSpectrumLimit).
inline std::vector<double> operator_spectrum(const CoefficientField& coeff,
                                             const SparseOperator& lap) {
    const Eigen::Index n = lap.dim();
    require_dim(coeff.a.values.size(), n, "operator_spectrum");
    if (n > kDenseSpectrumLimit)
        throw SolverFailure("operator_spectrum: dimension " + std::to_string(n) +
                            " exceeds the dense limit " + std::to_string(kDenseSpectrumLimit));

    const Eigen::VectorXd d = coeff.a.values.cwiseSqrt();
    Eigen::MatrixXd s = d.asDiagonal() * Eigen::MatrixXd(lap.matrix) * d.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) throw SolverFailure("operator_spectrum: eigensolver failed");

    std::vector<double> values(eig.eigenvalues().data(), eig.eigenvalues().data() + n);
    std::sort(values.begin(), values.end());
    return values;
}

struct SpectralMode {
    double a_j;
    Complex plus;
    Complex minus;
    ModeRegime regime;
};

/// Spectral report of the discrete block operator: λ₁(A), the bound
/// λ₀ = min{(b/2)λ₁, c²/b}, the eigenvalue pairs of the n_modes smallest
/// modes, and the spectral abscissa of -𝒜 (the negative of the smallest
/// real part over the whole spectrum).
struct SpectralReport {
    double lambda1_A = 0.0;
    double lambda0 = 0.0;
    std::vector<SpectralMode> modes;
    double spectral_abscissa = 0.0;
};

inline SpectralReport block_spectrum(const CoefficientField& coeff, const SparseOperator& lap,
                                     const PhysicalParams& params, int n_modes) {
    if (n_modes < 1) throw InvalidArgument("block_spectrum: n_modes must be >= 1");
    if (static_cast<Eigen::Index>(n_modes) > lap.dim())
        throw InvalidArgument("block_spectrum: n_modes exceeds the operator dimension");

    const std::vector<double> alphas = operator_spectrum(coeff, lap);

    SpectralReport report;
    report.lambda1_A = alphas.front();
    report.lambda0 = spectral_bound(report.lambda1_A, params);

    report.modes.reserve(static_cast<std::size_t>(n_modes));
    double min_re = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < alphas.size(); ++j) {
        const auto [plus, minus] = eigenvalue_pair(alphas[j], params);
        min_re = std::min(min_re, std::min(plus.real(), minus.real()));
        if (j < static_cast<std::size_t>(n_modes))
            report.modes.push_back({alphas[j], plus, minus, mode_regime(alphas[j], params)});
    }
    report.spectral_abscissa = -min_re;
    return report;
}

}  // namespace westervelt
