#include "bjlab/allencahn.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <numbers>
#include <optional>

using namespace bjlab;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

CurvatureProfile test_profile() { return CurvatureProfile(2 * kPi, 1.0, {0.2}, {0.0}); }

Eigen::MatrixXd fill(const StripGrid& g, const std::function<double(double, double)>& f) {
    Eigen::MatrixXd u(g.ns(), g.nt() + 1);
    for (Index i = 0; i < g.ns(); ++i)
        for (Index j = 0; j <= g.nt(); ++j) u(i, j) = f(g.s(i), g.t(j));
    return u;
}

/// Two flat layers at t = +-a.
Eigen::MatrixXd flat_pair(const StripGrid& g, double eps, double a) {
    return fill(g, [&](double, double t) {
        return 1.0 - heteroclinic((t + a) / eps).w + heteroclinic((t - a) / eps).w;
    });
}

struct Solved {
    CurvatureProfile profile = test_profile();
    BouncingField field;
    JacobiTodaSolution jt;
    std::optional<ACSolution> ac;
};

const Solved& solved() {
    static const Solved s = [] {
        Solved out;
        out.field = find_bjf(out.profile, 3);
        out.jt = solve_jacobi_toda(out.profile, out.field, 0.035);
        StripGrid grid(TubeMetric(out.profile, 0.5), 256, ac_default_nt(0.035));
        out.ac.emplace(solve_allen_cahn(build_approximation(out.jt, grid)));
        return out;
    }();
    return s;
}

}  // namespace

TEST_CASE("residual and energy of the constant states") {
    StripGrid g(TubeMetric(test_profile(), 0.5), 32, 16);
    CHECK(g.unknowns() == 32 * 15);
    const Eigen::MatrixXd one = Eigen::MatrixXd::Ones(32, 17);
    CHECK(ac_residual(g, 0.05, one).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(ac_energy(g, 0.05, one) == 0.0);
    Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(32, 17);
    zero.col(0).setOnes();
    zero.col(16).setOnes();
    const Eigen::MatrixXd r = ac_residual(g, 0.05, zero);
    CHECK(r.col(0).norm() == 0.0);
    CHECK(r.col(16).norm() == 0.0);
    // only the rows next to the boundary see the Dirichlet data
    for (Index j = 2; j <= 14; ++j) CHECK(r.col(j).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(g.pack(g.unpack(Eigen::VectorXd::LinSpaced(g.unknowns(), 0.0, 1.0))) ==
          Eigen::VectorXd::LinSpaced(g.unknowns(), 0.0, 1.0));
}

TEST_CASE("linearization is symmetric and matches directional differences") {
    StripGrid g(TubeMetric(test_profile(), 0.5), 24, 20);
    const double eps = 0.08;
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 10; ++trial) {
        const double a = n01(rng), b = n01(rng), c = n01(rng);
        Eigen::MatrixXd u = fill(g, [&](double s, double t) {
            const double x = 0.5 - std::abs(t);
            return 1.0 - (0.5 + 0.3 * std::cos(s + a)) * std::sin(kPi * x / 0.5 + b) * std::tanh(10 * x) - 0.1 * c * x;
        });
        u.col(0).setOnes();
        u.col(g.nt()).setOnes();
        const ACOperator op = ac_operator(g, eps, u);
        CHECK((Eigen::MatrixXd(op.a) - Eigen::MatrixXd(op.a).transpose()).norm() == 0.0);
        CHECK(op.mass.minCoeff() > 0.0);

        Eigen::VectorXd d(g.unknowns());
        for (Index k = 0; k < d.size(); ++k) d(k) = n01(rng);
        const double h = 1e-6;
        const Eigen::MatrixXd dm = g.unpack(d, 0.0);
        const Eigen::VectorXd fd =
            g.pack((ac_residual(g, eps, u + h * dm) - ac_residual(g, eps, u - h * dm)) / (2 * h));
        const Eigen::VectorXd lin = -(op.a * d).cwiseQuotient(op.mass);
        CHECK((fd - lin).lpNorm<Eigen::Infinity>() <= 1e-6 * std::max(1.0, lin.lpNorm<Eigen::Infinity>()));
    }
}

TEST_CASE("two flat layers carry twice the one-dimensional energy") {
    const double eps = 0.05, a = 0.15, length = 2 * kPi;
    StripGrid g(TubeMetric(constant_profile(length, 0.0), 0.5), 64, 400);
    const Eigen::MatrixXd u = flat_pair(g, eps, a);
    CHECK(ac_energy(g, eps, u) == Approx(2 * interaction_constants().c0 * length).epsilon(0.01));
    const ZeroSet z = zero_set(g, u);
    CHECK(z.s.size() == 64);
    CHECK(std::abs(z.t_minus.maxCoeff() + a) < 1e-3);
    CHECK(std::abs(z.t_plus.minCoeff() - a) < 1e-3);
    CHECK_THROWS_AS(zero_set(g, Eigen::MatrixXd::Ones(64, 401)), SolverError);
}

TEST_CASE("approximation") {
    const Solved& s = solved();
    StripGrid grid(TubeMetric(s.profile, 0.5), 256, ac_default_nt(0.035));
    const ACApproximation ap = build_approximation(s.jt, grid);
    CHECK(ap.u.col(0).isOnes(0.0));
    CHECK(ap.u.col(grid.nt()).isOnes(0.0));
    CHECK((ap.f2 + ap.f1).lpNorm<Eigen::Infinity>() <= 1e-14);
    CHECK((std::numbers::sqrt2 * ap.f2 - ap.psi).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK(ap.u.minCoeff() < -0.9);
    CHECK(ap.u.maxCoeff() <= 1.0 + 1e-12);
}

TEST_CASE("Allen-Cahn solve") {
    const Solved& s = solved();
    const ACSolution& ac = *s.ac;
    const double limit = 2 * interaction_constants().c0 * s.profile.length();
    CHECK(ac.residual_norm <= 1e-9);
    CHECK(ac.max_abs_u <= 1.0 + 1e-6);
    CHECK(ac.energy >= 0.9 * limit);
    CHECK(ac.energy <= 1.05 * limit);
    CHECK(ac.energy == Approx(ac_energy(ac.grid, ac.epsilon, ac.u)).epsilon(1e-14));
    CHECK(ac_residual(ac.grid, ac.epsilon, ac.u).lpNorm<Eigen::Infinity>() == Approx(ac.residual_norm).scale(1e-12));

    // the problem is symmetric in t, and in s about the first bounce point
    const Index ns = ac.grid.ns(), nt = ac.grid.nt();
    CHECK((ac.zeros.t_minus + ac.zeros.t_plus).lpNorm<Eigen::Infinity>() <= 1e-8);
    double asym = 0.0;
    for (Index i = 1; i < ns; ++i)
        for (Index j = 0; j <= nt; ++j) asym = std::max(asym, std::abs(ac.u(i, j) - ac.u(ns - i, j)));
    CHECK(asym <= 1e-7);

    // the layers are closest where Psi has its minima
    CHECK(local_minima(ac.zeros.t_plus).size() == 3);
    CHECK(ac.h1_norm == Approx(ac.h2_norm).epsilon(1e-6));
    CHECK(ac.h2_norm < 0.2 * s.jt.psi.maxCoeff());
}

TEST_CASE("layer-localized test functions are negative directions") {
    const Solved& s = solved();
    const ACSolution& ac = *s.ac;
    const StripGrid& g = ac.grid;
    const ACOperator op = ac_operator(g, ac.epsilon, ac.u);
    const GlueParameters glue = fit_glue_parameters(s.profile, s.jt);
    const double eps = ac.epsilon;
    Eigen::VectorXd psi = resample_periodic(s.jt.psi, g.ns());
    for (const GlueMinimum& m : glue.minima) {
        // moves the two layers apart near a bounce point, on the Toda core scale
        Eigen::MatrixXd v = fill(g, [&](double sv, double t) {
            const double ds = std::remainder(sv - m.sbar, s.profile.length());
            const Index i = std::min<Index>(g.ns() - 1, static_cast<Index>(std::lround(sv / g.hs())));
            const double f = eps * psi(i) / std::numbers::sqrt2;
            return (heteroclinic((t - f) / eps).wp + heteroclinic((t + f) / eps).wp) / std::cosh(m.kappa * ds / eps);
        });
        const Eigen::VectorXd x = g.pack(v);
        CHECK(x.dot(op.a * x) < 0.0);
    }
}
