#pragma once

// Reference computations for the tests, written independently of the library code paths.

#include "bjlab/geometry.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/lambert_w.hpp>

#include <cmath>
#include <functional>
#include <random>

namespace oracle {

/// Classical fixed-step RK4 for phi'' + K phi = 0; returns (phi, phi') at s1.
inline std::pair<double, double> rk4_jacobi(const bjlab::CurvatureProfile& k, double s0, double v, double p, double s1,
                                            int steps = 20000) {
    const double h = (s1 - s0) / steps;
    double s = s0;
    for (int i = 0; i < steps; ++i) {
        auto f = [&](double x, double a, double b) { return std::pair{b, -k(x) * a}; };
        auto [k1a, k1b] = f(s, v, p);
        auto [k2a, k2b] = f(s + h / 2, v + h / 2 * k1a, p + h / 2 * k1b);
        auto [k3a, k3b] = f(s + h / 2, v + h / 2 * k2a, p + h / 2 * k2b);
        auto [k4a, k4b] = f(s + h, v + h * k3a, p + h * k3b);
        v += h / 6 * (k1a + 2 * k2a + 2 * k3a + k4a);
        p += h / 6 * (k1b + 2 * k2b + 2 * k3b + k4b);
        s += h;
    }
    return {v, p};
}

/// Integral over the real line by tanh-sinh, long double.
inline long double integrate_line(const std::function<long double(long double)>& f) {
    boost::math::quadrature::tanh_sinh<long double> ts;
    const long double inf = std::numeric_limits<long double>::infinity();
    return ts.integrate(f, -inf, 0.0L) + ts.integrate(f, 0.0L, inf);
}

inline double lambert_alpha(double eps) { return boost::math::lambert_w0(1.0 / eps); }

/// Dense central-difference second derivative matrix of a scalar function of n variables.
inline Eigen::MatrixXd fd_hessian(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                                  double h) {
    const auto n = x.size();
    Eigen::MatrixXd hess(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            Eigen::VectorXd pp = x, pm = x, mp = x, mm = x;
            pp(i) += h; pp(j) += h;
            pm(i) += h; pm(j) -= h;
            mp(i) -= h; mp(j) += h;
            mm(i) -= h; mm(j) -= h;
            hess(i, j) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * h * h);
        }
    return hess;
}

struct SignCounts {
    int neg = 0, zero = 0, pos = 0;
};

inline SignCounts sign_counts(const Eigen::MatrixXd& a, double zero_tol) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
    SignCounts c;
    for (double v : es.eigenvalues()) (v < -zero_tol ? c.neg : v > zero_tol ? c.pos : c.zero)++;
    return c;
}

}  // namespace oracle
