#pragma once

#include "bjlab/bouncing.hpp"
#include "bjlab/toda.hpp"

#include <optional>
#include <string>

namespace bjlab {

struct GlueMinimum {
    double kappa = 0.0;
    double sbar = 0.0;
    double delta = 0.0;
    double theta = 0.0;
};

struct GlueParameters {
    std::vector<GlueMinimum> minima;
    double r_match = 0.0;
    /// smallest constants C making each matching bound hold; NaN until fitted
    double c_kappa = std::numeric_limits<double>::quiet_NaN();
    double c_delta = std::numeric_limits<double>::quiet_NaN();
    double c_theta = std::numeric_limits<double>::quiet_NaN();
    double c_sbar = std::numeric_limits<double>::quiet_NaN();
};

struct JacobiTodaOptions {
    Index grid = 0;                     // 0: jt_grid_size
    double residual_tol = 1e-10;        // relative to max(1, |Psi|_inf)
    int max_newton = 80;
    /// gluing needs alpha * min gap at least this large
    double glue_threshold = 6.0;
    double continuation_ratio = 0.8;
    int max_continuation = 80;
};

/// Continuation could not reach the requested epsilon (typically a fold of the branch).
class ContinuationStall : public SolverError {
public:
    ContinuationStall(const std::string& what, double last_good) : SolverError(what), last_good_epsilon(last_good) {}
    double last_good_epsilon;
};

struct JacobiTodaSolution {
    double epsilon = 0.0;
    double alpha = 0.0;
    double length = 0.0;
    Eigen::VectorXd psi;  // on s_i = i L / N
    double residual_norm = 0.0;
    GlueParameters glue;
    BouncingField field;
    int newton_iterations = 0;
    int continuation_steps = 0;
    std::string method;  // "glue" or "continuation"

    Index grid() const { return psi.size(); }
    double h() const { return length / static_cast<double>(psi.size()); }
    double s(Index i) const { return h() * static_cast<double>(i); }
};

/// Enough points for 40 per Toda core, at least 4096.
Index jt_grid_size(const BouncingField& field, double epsilon);

/// alpha_eps times the smallest gap between consecutive points.
double glue_separation(const BouncingField& field, double epsilon);

/// Leading-order glued guess on an N-point periodic grid.
/// Throws DomainError when the separation is below the threshold.
std::pair<Eigen::VectorXd, GlueParameters> glue_initial_guess(const CurvatureProfile& profile,
                                                              const BouncingField& field, double epsilon,
                                                              Index grid, double threshold = 6.0);

/// -eps^2 (Psi'' + K Psi) + cbar^2 e^{-2 Psi} with the fourth-order periodic stencil.
Eigen::VectorXd jt_residual(const CurvatureProfile& profile, double epsilon, const Eigen::VectorXd& psi);

/// Derivative of jt_residual at psi.
BandedMatrix jt_jacobian(const CurvatureProfile& profile, double epsilon, const Eigen::VectorXd& psi);

/// Damped Newton from `guess` (the glued guess when absent). Outside the gluing regime, or when
/// Newton fails, runs continuation in epsilon from a glued solve at smaller epsilon.
JacobiTodaSolution solve_jacobi_toda(const CurvatureProfile& profile, const BouncingField& field, double epsilon,
                                     const std::optional<Eigen::VectorXd>& guess = std::nullopt,
                                     const JacobiTodaOptions& opts = {});

/// Same problem on a different grid, seeded by periodic interpolation of `solution`.
JacobiTodaSolution regrid_jacobi_toda(const CurvatureProfile& profile, const JacobiTodaSolution& solution,
                                      Index grid, const JacobiTodaOptions& opts = {});

/// Recovers kappa_j, sbar_j from the minima and delta_j, theta_j by fitting Jacobi fields to the
/// outer parts; fills the fitted constants.
GlueParameters fit_glue_parameters(const CurvatureProfile& profile, const JacobiTodaSolution& solution);

/// max |Psi / alpha - Phi| over grid points at distance >= min gap / 4 from every s_j.
double outer_deviation(const CurvatureProfile& profile, const JacobiTodaSolution& solution);

/// Periodic cubic resampling of a uniform periodic sample to m points.
Eigen::VectorXd resample_periodic(const Eigen::VectorXd& values, Index m);

/// Indices of strict local minima of Psi on the periodic grid.
std::vector<Index> local_minima(const Eigen::VectorXd& psi);

/// L_eps / eps^2 = -(d^2 + K) - 2 cbar^2 e^{-2 Psi} / eps^2 with the second-order stencil.
BandedMatrix jt_linearized_operator(const CurvatureProfile& profile, const JacobiTodaSolution& solution);

struct JtSpectrum {
    Index index = 0;
    Index nullity = 0;
    /// eigenvalues of L_eps, ascending; the first n are the Toda-core ones
    std::vector<double> eigenvalues;
    double gap = 0.0;  // min |lambda| / eps^2
    double zero_tolerance = 0.0;
    /// inertia on the doubled grid, when checked
    std::optional<Inertia> refined;
};

JtSpectrum jt_linearized_spectrum(const CurvatureProfile& profile, const JacobiTodaSolution& solution,
                                  bool check_refinement = true);

}  // namespace bjlab
