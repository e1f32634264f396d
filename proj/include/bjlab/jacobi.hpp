#pragma once

#include "bjlab/geometry.hpp"
#include "bjlab/ode.hpp"

namespace bjlab {

struct JacobiEnd {
    double value = 0.0;
    double slope = 0.0;
};

/// Solves phi'' + K phi = 0 from (value, slope) at s0 to s1.
JacobiEnd jacobi_ivp(const CurvatureProfile& profile, double s0, double value, double slope, double s1,
                     const OdeOptions& opts = {});

/// Fundamental solutions on [a, b]: y1 = (1, 0) and y2 = (0, 1) at a, evaluated at b.
struct FundamentalPair {
    double y1 = 1.0, y1p = 0.0;
    double y2 = 0.0, y2p = 1.0;
    /// first zero of y2 in (a, b), or NaN
    double conjugate_point = std::numeric_limits<double>::quiet_NaN();

    bool has_conjugate_point() const { return !std::isnan(conjugate_point); }
};

FundamentalPair fundamental_pair(const CurvatureProfile& profile, double a, double b, const OdeOptions& opts = {});

/// Minimizer of the Dirichlet energy of the Jacobi operator on [a, b] with unit end values,
/// plus the Dirichlet-to-Neumann data needed for first and second variations.
struct SegmentSolution {
    double a = 0.0;
    double b = 0.0;
    FundamentalPair fund;
    bool conjugate = false;   // H = -inf on this segment
    bool degenerate = false;  // conjugate point within tolerance of b

    /// phi'(a+) and phi'(b-) for phi(a) = phi(b) = 1
    double slope_a = 0.0;
    double slope_b = 0.0;

    /// u'(a) = daa u(a) + dab u(b), u'(b) = dba u(a) + dbb u(b) for Jacobi fields u
    double daa() const { return -fund.y1 / fund.y2; }
    double dab() const { return 1.0 / fund.y2; }
    double dba() const { return (fund.y1p * fund.y2 - fund.y1 * fund.y2p) / fund.y2; }
    double dbb() const { return fund.y2p / fund.y2; }

    /// phi on a uniform grid of `points` nodes including both ends
    void sample(const CurvatureProfile& profile, Index points, Eigen::VectorXd& s, Eigen::VectorXd& phi) const;
    double value_at(const CurvatureProfile& profile, double s) const;
};

struct SegmentEnergy {
    /// -infinity when the segment carries a conjugate point
    double h = 0.0;
    SegmentSolution minimizer;
};

/// H(s1, s2) = phi'(s2) - phi'(s1) by shooting; s2 may exceed |gamma| (lifted to the cover).
SegmentEnergy segment_energy(const CurvatureProfile& profile, double s1, double s2, const OdeOptions& opts = {});

struct GeodesicIndexOptions {
    Index grid = 512;
    /// absolute half-width of the zero band; <= 0 selects the discretization-error estimate
    double zero_tolerance = 0.0;
    Index eigenpairs = 4;
};

/// Inertia of -(d^2 + K) on the circle, required to agree on grids N and 2N.
SpectrumReport geodesic_index(const CurvatureProfile& profile, const GeodesicIndexOptions& opts = {});

/// Periodic 2nd-order discretization of -(d^2 + K) on N nodes.
BandedMatrix jacobi_operator(const CurvatureProfile& profile, Index n);

}  // namespace bjlab
