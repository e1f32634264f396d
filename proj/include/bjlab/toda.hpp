#pragma once

#include "bjlab/numerics.hpp"

#include <cmath>

namespace bjlab {

template <typename Scalar>
struct Heteroclinic {
    Scalar w;
    Scalar wp;
    Scalar wpp;
};

/// W = tanh(x / sqrt 2) and its first two derivatives.
template <typename Scalar>
Heteroclinic<Scalar> heteroclinic(Scalar x) {
    using std::cosh;
    using std::tanh;
    const Scalar r2 = std::sqrt(Scalar(2));
    const Scalar u = x / r2;
    const Scalar th = tanh(u);
    // 1 - tanh^2 loses everything in the tails; go through cosh instead
    const Scalar c = std::abs(u) < Scalar(350) ? cosh(u) : std::numeric_limits<Scalar>::infinity();
    const Scalar sech2 = Scalar(1) / (c * c);
    return {th, sech2 / r2, -sech2 * th};
}

/// sech^2(x / sqrt 2) = 1 - W^2 without cancellation.
template <typename Scalar>
Scalar one_minus_w2(Scalar x) {
    using std::cosh;
    const Scalar u = x / std::sqrt(Scalar(2));
    if (std::abs(u) > Scalar(350)) return Scalar(0);
    const Scalar c = cosh(u);
    return Scalar(1) / (c * c);
}

struct InteractionConstants {
    double c0 = 0.0;
    double c1 = 0.0;
    double cbar_sq = 0.0;
    double c0_error = 0.0;
    double c1_error = 0.0;
    double cbar() const { return std::sqrt(cbar_sq); }
};

/// c0 = int W'^2, c1 = 6 int e^{-sqrt2 x} (1 - W^2) W', cbar^2 = sqrt2 c1 / c0.
/// Computed once per process.
const InteractionConstants& interaction_constants();

/// Same integrals at an explicit tolerance, uncached.
InteractionConstants compute_interaction_constants(double tol);

/// Leading inner profile near a minimum of the Jacobi-Toda solution.
struct TodaProfile {
    double kappa = 1.0;
    double sbar = 0.0;
    double epsilon = 1.0;
    double curvature_at_sbar = 0.0;
};

struct TodaValue {
    double value = 0.0;
    double slope = 0.0;
};

/// T0(s) = ln cosh(kappa (s - sbar) / eps) - ln kappa + ln cbar + K(sbar) ln(kappa) (s - sbar)^2 / 2.
TodaValue toda_profile_eval(const TodaProfile& profile, double s);

/// ln cosh without overflow.
double log_cosh(double x);

struct LinearizedTodaReport {
    double eigen_residual = 0.0;      // max |L0(sech) + sech|
    double kernel_tanh_residual = 0.0;
    double kernel_even_residual = 0.0;  // max |L0(s tanh s - 1)|
    double smallest_eigenvalue = 0.0;
    double eigenvector_error = 0.0;     // distance of the normalized vector to sech
    Index grid = 0;
};

/// L0 = -(d^2 + 2 sech^2): checks the eigenfunction, both kernel elements, and the
/// discrete ground state on [-20, 20].
LinearizedTodaReport linearized_toda_checks(Index grid = 4000, double half_window = 20.0);

struct CorrectorIntegrals {
    double i_x = 0.0, i_y = 0.0, i_z = 0.0;
    double rhs_x = 0.0, rhs_y = 0.0, rhs_z = 0.0;  // int B W'' for each right-hand side B
    double rho = 0.0;
    double orth_x = 0.0, orth_y = 0.0, orth_z = 0.0;  // int A W'
    double half_window = 0.0;
    Index grid = 0;
};

/// Solves (d^2 + 1 - 3W^2) A = B for B in {W'', x W', 6(1 - W^2)(e^{-sqrt2 x} - rho)} with A orthogonal
/// to W', and returns 6 int W W'^2 A next to the closed-form right-hand sides.
CorrectorIntegrals corrector_integrals(double half_window = 25.0, Index grid = 8000);

}  // namespace bjlab
