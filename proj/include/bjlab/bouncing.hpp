#pragma once

#include "bjlab/jacobi.hpp"

#include <optional>

namespace bjlab {

/// Critical configuration of H_n together with its Jacobi field Phi.
struct BouncingField {
    double length = 0.0;
    std::vector<double> points;             // s_1 < ... < s_n
    std::vector<SegmentSolution> segments;  // segment j spans [s_j, s_{j+1}]
    Eigen::VectorXd slope_plus;             // Phi'(s_j+)
    Eigen::VectorXd slope_minus;            // Phi'(s_j-)
    Eigen::VectorXd jumps;                  // N_j
    Index index = -1;
    Index nullity = -1;
    double hn_value = 0.0;
    double gradient_norm = 0.0;
    double reflection_error = 0.0;

    int n() const { return static_cast<int>(points.size()); }

    /// Phi at any s (reduced modulo the length).
    double phi(const CurvatureProfile& profile, double s) const;
    /// (s, Phi) on a uniform grid of `count` nodes over [0, L).
    std::pair<Eigen::VectorXd, Eigen::VectorXd> sample(const CurvatureProfile& profile, Index count) const;
};

/// Per-segment data of H_n at an ordered configuration.
struct HnEvaluation {
    double value = 0.0;  // -infinity if any segment is
    std::vector<SegmentEnergy> segments;
    bool finite() const { return std::isfinite(value); }
};

HnEvaluation evaluate_hn(const CurvatureProfile& profile, const std::vector<double>& points,
                         const OdeOptions& opts = {});

/// sum_j H(s_j, s_{j+1}) with s_{n+1} = s_1 + L.
double hn_value(const CurvatureProfile& profile, const std::vector<double>& points);

/// dH_n/ds_j = Phi'(s_j+)^2 - Phi'(s_j-)^2 from the segment minimizers.
Eigen::VectorXd hn_gradient(const CurvatureProfile& profile, const std::vector<double>& points);
Eigen::VectorXd hn_gradient(const HnEvaluation& eval);

/// Hessian of H_n in the plain coordinates s_j at any finite configuration.
Eigen::MatrixXd hn_hessian_s(const CurvatureProfile& profile, const std::vector<double>& points);
Eigen::MatrixXd hn_hessian_s(const CurvatureProfile& profile, const HnEvaluation& eval);

struct HessianReport {
    Eigen::MatrixXd matrix;  // symmetrized, in sigma_j = N_j sdot_j
    double asymmetry = 0.0;
};

/// Second variation in sigma-coordinates from the jump solutions eta with
/// eta(s_j+) = -eta(s_j-) = sigma_j, one basis direction at a time.
HessianReport hn_hessian(const CurvatureProfile& profile, const BouncingField& field);

struct IndexNullity {
    Index index = 0;
    Index nullity = 0;
    Eigen::VectorXd eigenvalues;
    double asymmetry = 0.0;
    /// filled on cross-validation: inertia of the discretized form Q
    std::optional<Inertia> q_form;
};

IndexNullity bjf_index_nullity(const CurvatureProfile& profile, const BouncingField& field,
                               bool cross_validate = false);

/// Inertia of Q(eta) = sum_j int (eta'^2 - K eta^2) - K(s_j)/N_j (eta(s_j+) - eta(s_j-))^2
/// over functions with eta(s_j+) = -eta(s_j-), with `nodes` intervals per segment.
Inertia q_form_inertia(const CurvatureProfile& profile, const BouncingField& field, Index nodes = 512,
                       double zero_tolerance = 1e-3);

struct FindOptions {
    int ascent_iterations = 4000;
    int newton_iterations = 60;
    double gradient_tol = 1e-10;
    double collapse_fraction = 1e-3;
};

/// Maximizes H_n from `seed` (uniform points when empty) and Newton-refines the critical point.
BouncingField find_bjf(const CurvatureProfile& profile, int n, const std::vector<double>& seed = {},
                       const FindOptions& opts = {});

/// Critical points reached from `seeds` random starts, deduplicated up to relabeling
/// (and rotation for constant curvature).
std::vector<BouncingField> sweep_bjf(const CurvatureProfile& profile, int n, int seeds = 32,
                                     std::uint64_t rng_seed = 0, const FindOptions& opts = {});

/// Builds the field data (segments, slopes, jumps, checks) at given critical points.
BouncingField make_field(const CurvatureProfile& profile, const std::vector<double>& points);

struct BounceResult {
    double s_next = 0.0;
    double p_next = 0.0;
    Eigen::Matrix2d jacobian = Eigen::Matrix2d::Identity();
};

/// First return of Phi'' + K Phi = 0, (Phi, Phi') = (1, p) at s, to Phi = 1; p' = -Phi'(s').
BounceResult bounce_map(const CurvatureProfile& profile, double s, double p);

/// Newton on the n-cycle equations of bounce_map started from (s_j, p_j).
/// Returns refined (s, p) and the final cycle residual.
struct BounceCycle {
    std::vector<double> points;
    std::vector<double> slopes;
    double residual = 0.0;
    double max_slope_mismatch = 0.0;  // max_j |p'_j - p_{j+1}| after refinement
};
BounceCycle refine_bounce_cycle(const CurvatureProfile& profile, std::vector<double> points,
                                std::vector<double> slopes);

struct SuperadditivityAudit {
    int tested = 0;
    int violations = 0;
    double min_margin = std::numeric_limits<double>::infinity();  // min of H(s,m) + H(m,t) - H(s,t)
};

/// Draws ordered triples s < m < t (t - s < L) until `count` have all three segment energies
/// finite, and checks H(s, t) < H(s, m) + H(m, t) on each.
SuperadditivityAudit superadditivity_audit(const CurvatureProfile& profile, int count, std::uint64_t seed = 0);

}  // namespace bjlab
