#pragma once

#include "bjlab/numerics.hpp"

#include <vector>

namespace bjlab {

/// Periodic trigonometric polynomial on [0, length).
///
/// f(s) = a0 + sum_k a_k cos(2 pi k s / L) + b_k sin(2 pi k s / L), k = 1..m.
class PeriodicFunction {
  public:
    PeriodicFunction() = default;
    PeriodicFunction(double length, double a0, std::vector<double> ak, std::vector<double> bk);

    /// Trigonometric interpolant of uniform samples f(i L / N), i = 0..N-1.
    static PeriodicFunction from_samples(double length, const Eigen::VectorXd& samples);

    double length() const { return length_; }
    double a0() const { return a0_; }
    const std::vector<double>& ak() const { return ak_; }
    const std::vector<double>& bk() const { return bk_; }
    int modes() const { return static_cast<int>(ak_.size()); }
    bool is_constant() const;

    double operator()(double s) const { return value(s); }
    double value(double s) const;
    double derivative(double s) const;
    double second_derivative(double s) const;

    /// Values on the uniform grid s_i = i L / N.
    Eigen::VectorXd sample(Index n) const;

    double sup() const;
    double inf() const;

    /// Reduced argument in [0, L).
    double wrap(double s) const;

  private:
    double extremum(bool want_max) const;

    double length_ = 1.0;
    double a0_ = 0.0;
    std::vector<double> ak_;
    std::vector<double> bk_;
};

/// A closed geodesic: its length and the Gauss curvature along it.
using CurvatureProfile = PeriodicFunction;

CurvatureProfile constant_profile(double length, double k);

/// Fermi-coordinate tube with E(s, t) = (1 - K(s) t^2 / 2)^2, metric E ds^2 + dt^2.
class TubeMetric {
  public:
    /// Enforces sup|K| tau^2 <= 0.3 so that E >= 0.25 on the tube.
    TubeMetric(CurvatureProfile profile, double half_width);

    const CurvatureProfile& profile() const { return profile_; }
    double half_width() const { return tau_; }

    double sqrt_e(double s, double t) const { return 1.0 - 0.5 * profile_(s) * t * t; }
    double e(double s, double t) const {
        double r = sqrt_e(s, t);
        return r * r;
    }

  private:
    CurvatureProfile profile_;
    double tau_;
};

inline constexpr double kDefaultTubeHalfWidth = 0.4;
inline constexpr double kTubeCurvatureLimit = 0.3;

/// The perturbation g_z = g + z(s) t^2 ds^2, given by its derivative zdot.
struct MetricPerturbation {
    PeriodicFunction zdot;
};

/// -(d_t^2 sqrt E) / sqrt E, closed form K / (1 - K t^2 / 2).
double gauss_curvature_of_tube(const TubeMetric& metric, double s, double t);

/// First-order change of K along t = 0 under g_z: D_z K = -zdot.
double curvature_derivative_under_perturbation(const MetricPerturbation& perturbation, double s);

enum class Verdict { Exists, CannotExist, Inconclusive };

const char* to_string(Verdict v);

/// Sufficient conditions: pi^2 n^2 > L^2 sup K with K > 0 gives existence,
/// pi^2 n^2 < L^2 inf K rules it out.
Verdict existence_precheck(const CurvatureProfile& profile, int n);

}  // namespace bjlab
