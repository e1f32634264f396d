#include "bjlab/jacobitoda.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <numbers>

using namespace bjlab;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

CurvatureProfile test_profile() { return CurvatureProfile(2 * kPi, 1.0, {0.2}, {0.0}); }

const BouncingField& test_field() {
    static const BouncingField f = find_bjf(test_profile(), 3);
    return f;
}

const JacobiTodaSolution& test_solution() {
    static const JacobiTodaSolution sol = solve_jacobi_toda(test_profile(), test_field(), 0.01);
    return sol;
}

}  // namespace

TEST_CASE("linearization matches directional differences") {
    const CurvatureProfile k = test_profile();
    const double eps = 0.02;
    auto [psi, glue] = glue_initial_guess(k, test_field(), eps, 4096, 4.0);
    const BandedMatrix jac = jt_jacobian(k, eps, psi);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    const double h = 1e-6;
    for (int trial = 0; trial < 10; ++trial) {
        // smooth random direction
        Eigen::VectorXd d(psi.size());
        const double a = g(rng), b = g(rng), c = g(rng);
        for (Index i = 0; i < d.size(); ++i) {
            const double s = 2 * kPi * static_cast<double>(i) / static_cast<double>(d.size());
            d(i) = a + b * std::cos(s + c) + 0.3 * g(rng) * std::sin(3 * s);
        }
        const Eigen::VectorXd fd = (jt_residual(k, eps, psi + h * d) - jt_residual(k, eps, psi - h * d)) / (2 * h);
        const Eigen::VectorXd jd = jac.apply(d);
        CHECK((fd - jd).lpNorm<Eigen::Infinity>() <= 1e-6 * std::max(1.0, jd.lpNorm<Eigen::Infinity>()));
    }
}

TEST_CASE("glued guess on the round geodesic") {
    const CurvatureProfile one = constant_profile(2 * kPi, 1.0);
    const BouncingField f = find_bjf(one, 3);
    const double eps = 0.01, alpha = lambert_alpha(eps);
    const double cbar = interaction_constants().cbar();
    const double predicted = std::log(2 * cbar / (eps * alpha * f.jumps(0)));
    CHECK(predicted == Approx(4.43).epsilon(0.01));
    const Index grid = jt_grid_size(f, eps);
    auto [psi, glue] = glue_initial_guess(one, f, eps, grid);
    CHECK(std::abs(psi.minCoeff() - predicted) <= 0.5);
    CHECK(psi.minCoeff() > 0.0);
    CHECK(glue.minima.size() == 3);
    CHECK(glue.r_match == Approx(std::pow(alpha, -2.0 / 3.0)).epsilon(1e-12));
    // midway between two minima the outer field is alpha (1 + delta) Phi, delta = -ln(N / cbar) / alpha
    const double mid = kPi / 3;
    const auto i = static_cast<Index>(std::llround(mid / (2 * kPi) * static_cast<double>(grid)));
    const double delta = -std::log(f.jumps(0) / cbar) / alpha;
    CHECK(std::abs(psi(i) / alpha - (1 + delta) * f.phi(one, mid)) <= 0.05);
    // continuity: no jumps larger than the steepest Toda slope allows
    const double h = 2 * kPi / static_cast<double>(grid);
    for (Index j = 0; j < grid; ++j) {
        const double jump = std::abs(psi((j + 1) % grid) - psi(j));
        REQUIRE(jump <= 2.0 * alpha * f.jumps.maxCoeff() * h);
    }

    CHECK(glue_separation(f, eps) == Approx(alpha * 2 * kPi / 3).epsilon(1e-8));
    CHECK_THROWS_AS(glue_initial_guess(one, f, 0.3, 4096), DomainError);
}

TEST_CASE("Jacobi-Toda solve on the round geodesic") {
    const CurvatureProfile one = constant_profile(2 * kPi, 1.0);
    const BouncingField f = find_bjf(one, 3);
    const double eps = 0.01, alpha = lambert_alpha(eps);
    const JacobiTodaSolution sol = solve_jacobi_toda(one, f, eps);
    CHECK(sol.method == "glue");
    CHECK(sol.residual_norm <= 1e-10 * std::max(1.0, sol.psi.lpNorm<Eigen::Infinity>()));
    CHECK(jt_residual(one, eps, sol.psi).lpNorm<Eigen::Infinity>() == Approx(sol.residual_norm).epsilon(1e-6).scale(1e-12));
    const auto minima = local_minima(sol.psi);
    REQUIRE(minima.size() == 3);
    const double cbar = interaction_constants().cbar();
    for (Index m : minima)
        CHECK(std::abs(sol.psi(m) - std::log(2 * cbar / (eps * alpha * f.jumps(0)))) <= 0.5);
    CHECK(sol.psi.minCoeff() > 0.0);
}

TEST_CASE("Jacobi-Toda solve on the test profile") {
    const CurvatureProfile k = test_profile();
    const JacobiTodaSolution& sol = test_solution();
    CHECK(sol.residual_norm <= 1e-10 * std::max(1.0, sol.psi.lpNorm<Eigen::Infinity>()));
    CHECK(sol.psi.minCoeff() > 0.0);
    CHECK(local_minima(sol.psi).size() == 3);

    // K is even and the field is symmetric about s = 0
    REQUIRE(std::abs(test_field().points[0]) < 1e-10);
    const Index n = sol.grid();
    double asym = 0.0;
    for (Index i = 1; i < n; ++i) asym = std::max(asym, std::abs(sol.psi(i) - sol.psi(n - i)));
    CHECK(asym <= 1e-8);

    const GlueParameters g = fit_glue_parameters(k, sol);
    CHECK(std::isfinite(g.c_kappa));
    CHECK(std::isfinite(g.c_delta));
    CHECK(std::isfinite(g.c_theta));
    CHECK(std::isfinite(g.c_sbar));
    REQUIRE(g.minima.size() == 3);
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(g.minima[j].sbar - test_field().points[j]) < 0.1);

    const double dev = outer_deviation(k, sol);
    CHECK(dev > 0.0);
    CHECK(dev < 0.2);
}

TEST_CASE("spectrum of the linearized Jacobi-Toda operator") {
    const CurvatureProfile k = test_profile();
    const IndexNullity ind = bjf_index_nullity(k, test_field());
    const JtSpectrum sp = jt_linearized_spectrum(k, test_solution());
    CHECK(sp.index == 3 + ind.index);
    CHECK(sp.nullity == 0);
    REQUIRE(sp.refined.has_value());
    CHECK(sp.refined->neg == sp.index);
    CHECK(sp.refined->zero == sp.nullity);
    CHECK(sp.index >= geodesic_index(k).neg_count);
    CHECK(sp.gap > 0.0);
    CHECK(std::is_sorted(sp.eigenvalues.begin(), sp.eigenvalues.end()));

    // inertia of the assembled operator agrees with the report
    const BandedMatrix op = jt_linearized_operator(k, test_solution());
    CHECK(count_below(op, 0.0) == sp.index);
}

TEST_CASE("regridding keeps the solution") {
    const CurvatureProfile k = test_profile();
    const JacobiTodaSolution& sol = test_solution();
    const JacobiTodaSolution fine = regrid_jacobi_toda(k, sol, 2 * sol.grid());
    CHECK(fine.residual_norm <= 1e-10 * std::max(1.0, fine.psi.lpNorm<Eigen::Infinity>()));
    double diff = 0.0;
    for (Index i = 0; i < sol.grid(); ++i) diff = std::max(diff, std::abs(fine.psi(2 * i) - sol.psi(i)));
    CHECK(diff < 1e-3);
}

TEST_CASE("periodic resampling and minima") {
    const Index n = 64;
    Eigen::VectorXd v(n);
    for (Index i = 0; i < n; ++i) v(i) = std::cos(2 * kPi * static_cast<double>(i) / n);
    const Eigen::VectorXd w = resample_periodic(v, 3 * n);
    for (Index i = 0; i < 3 * n; ++i)
        CHECK(w(i) == Approx(std::cos(2 * kPi * static_cast<double>(i) / (3 * n))).epsilon(1e-5).scale(1.0));
    CHECK(resample_periodic(v, n).isApprox(v, 1e-14));

    const std::vector<Index> m = local_minima(v);
    REQUIRE(m.size() == 1);
    CHECK(m[0] == n / 2);
    Eigen::VectorXd three(n);
    for (Index i = 0; i < n; ++i) three(i) = std::cos(3 * 2 * kPi * static_cast<double>(i) / n + 0.1);
    CHECK(local_minima(three).size() == 3);
    CHECK(local_minima(Eigen::VectorXd::Ones(n)).empty());
}
