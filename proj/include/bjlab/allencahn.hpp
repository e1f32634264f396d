#pragma once

#include "bjlab/geometry.hpp"
#include "bjlab/jacobitoda.hpp"

#include <Eigen/SparseCore>

namespace bjlab {

/// Uniform grid on [0, L) x [-tau, tau]: periodic in s, u = 1 on t = +-tau.
/// Grid functions are ns x (nt + 1) matrices whose first and last columns are the boundary.
class StripGrid {
  public:
    StripGrid(TubeMetric metric, Index ns, Index nt);

    const TubeMetric& metric() const { return metric_; }
    Index ns() const { return ns_; }
    Index nt() const { return nt_; }
    double hs() const { return hs_; }
    double ht() const { return ht_; }
    double s(Index i) const { return hs_ * static_cast<double>(i); }
    double t(Index j) const { return -metric_.half_width() + ht_ * static_cast<double>(j); }
    Index unknowns() const { return ns_ * (nt_ - 1); }
    /// position of interior node (i, j), 1 <= j < nt, in the unknown vector
    Index index(Index i, Index j) const { return i * (nt_ - 1) + (j - 1); }

    /// sqrt E at nodes, at s-edges (i + 1/2, j) and at t-edges (i, j + 1/2)
    const Eigen::MatrixXd& weight() const { return w_; }
    const Eigen::MatrixXd& s_edge() const { return as_; }
    const Eigen::MatrixXd& t_edge() const { return bt_; }

    Eigen::VectorXd pack(const Eigen::MatrixXd& u) const;
    Eigen::MatrixXd unpack(const Eigen::VectorXd& x, double boundary = 1.0) const;

  private:
    TubeMetric metric_;
    Index ns_;
    Index nt_;
    double hs_;
    double ht_;
    Eigen::MatrixXd w_;
    Eigen::MatrixXd as_;  // sqrt E / E at (s_{i+1/2}, t_j)
    Eigen::MatrixXd bt_;  // sqrt E at (s_i, t_{j+1/2})
};

/// nt for a given epsilon, proportional to 1 / eps (192 at eps = 0.05), even.
Index ac_default_nt(double epsilon);

struct ACApproximation {
    StripGrid grid;
    double epsilon = 0.0;
    Eigen::VectorXd psi;  // Psi_eps on the s-grid
    Eigen::VectorXd f1;
    Eigen::VectorXd f2;
    double inner_radius = 0.0;
    double outer_radius = 0.0;
    Eigen::MatrixXd u;
};

/// U = chi(t) [W((t - eps f2) / eps) - W((t - eps f1) / eps)] + 1 with sqrt2 f2 = -sqrt2 f1 = Psi and
/// chi ramping from 1 at tau / 2 to 0 at 3 tau / 4.
ACApproximation build_approximation(const JacobiTodaSolution& jt, const StripGrid& grid);

/// eps^2 Delta_g u + u - u^3 in divergence form; zero on the boundary columns.
Eigen::MatrixXd ac_residual(const StripGrid& grid, double epsilon, const Eigen::MatrixXd& u);

/// Weighted linearization: d(residual)/du = -diag(mass)^{-1} a, with `a` symmetric.
struct ACOperator {
    Eigen::SparseMatrix<double> a;
    Eigen::VectorXd mass;
};
ACOperator ac_operator(const StripGrid& grid, double epsilon, const Eigen::MatrixXd& u);

/// sum [(eps/2)|grad u|_g^2 + (1 - u^2)^2 / (4 eps)] sqrt E hs ht, gradients on edges.
double ac_energy(const StripGrid& grid, double epsilon, const Eigen::MatrixXd& u);

struct ZeroSet {
    Eigen::VectorXd s;
    Eigen::VectorXd t_minus;
    Eigen::VectorXd t_plus;
};

/// Linear interpolation of u = 0 along every t-line; throws SolverError unless there are
/// exactly two crossings on each line.
ZeroSet zero_set(const StripGrid& grid, const Eigen::MatrixXd& u);

struct ACOptions {
    int max_newton = 30;
    double residual_tol = 1e-9;
};

struct ACSolution {
    StripGrid grid;
    double epsilon = 0.0;
    Eigen::MatrixXd u;
    Eigen::MatrixXd approximation;
    Eigen::VectorXd psi;
    double residual_norm = 0.0;
    double approximation_residual = 0.0;
    int newton_iterations = 0;
    double energy = 0.0;
    ZeroSet zeros;
    double v_norm = 0.0;   // |u - U_eps|_inf
    double h1_norm = 0.0;  // sup |t_- / eps + Psi / sqrt2|
    double h2_norm = 0.0;  // sup |t_+ / eps - Psi / sqrt2|
    double max_abs_u = 0.0;
};

/// Damped Newton from the approximation with direct sparse solves.
ACSolution solve_allen_cahn(const ACApproximation& approx, const ACOptions& opts = {});

/// Layer character of a low eigenvector: its projection on eps-scaled W' profiles along each layer.
struct ModeDiagnostic {
    double eigenvalue = 0.0;
    double layer_fraction = 0.0;  // share of the mass-norm captured by the two layer profiles
    double even_fraction = 0.0;   // share of the layer part that moves both layers together
};

struct ACSpectrum {
    Index index = 0;
    Index zero_count = 0;
    bool nullity_flag = false;
    double zero_tolerance = 0.0;
    std::vector<double> eigenvalues;  // ascending, the index plus a few more
    std::vector<ModeDiagnostic> modes;
};

/// Morse index of -(eps^2 Delta_g + 1 - 3u^2) from the inertia of the mass-scaled symmetric
/// matrix, with the low eigenpairs for the decomposition diagnostics.
ACSpectrum ac_morse_index(const ACSolution& solution, Index extra_eigenpairs = 3);

}  // namespace bjlab
