#include "bjlab/toda.hpp"

#include <Eigen/SparseLU>

#include <numbers>

namespace bjlab {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

double sech(double x) { return 1.0 / std::cosh(x); }

/// Eighth-order central second difference.
template <typename F>
double second_difference(const F& f, double x, double h) {
    const double c0 = -205.0 / 72.0, c1 = 8.0 / 5.0, c2 = -1.0 / 5.0, c3 = 8.0 / 315.0, c4 = -1.0 / 560.0;
    return (c0 * f(x) + c1 * (f(x + h) + f(x - h)) + c2 * (f(x + 2 * h) + f(x - 2 * h)) +
            c3 * (f(x + 3 * h) + f(x - 3 * h)) + c4 * (f(x + 4 * h) + f(x - 4 * h))) /
           (h * h);
}

struct CorrectorSolve {
    double integral = 0.0;  // 6 int W W'^2 A
    double orth = 0.0;      // int A W'
};

/// Neumann ends plus a Lagrange row for A orthogonal to W'; trapezoid integrals.
std::vector<CorrectorSolve> solve_correctors(double half_window, Index intervals,
                                             const std::vector<std::function<double(double)>>& rhs) {
    const Index n = intervals + 1;
    const double h = 2.0 * half_window / static_cast<double>(intervals);
    Eigen::VectorXd x(n), w(n), wp(n), trap(n);
    for (Index i = 0; i < n; ++i) {
        x(i) = -half_window + h * static_cast<double>(i);
        auto het = heteroclinic(x(i));
        w(i) = het.w;
        wp(i) = het.wp;
        trap(i) = (i == 0 || i == n - 1) ? 0.5 * h : h;
    }
    std::vector<Eigen::Triplet<double>> trip;
    const double c = 1.0 / (h * h);
    for (Index i = 0; i < n; ++i) {
        trip.emplace_back(i, i, -2.0 * c + 1.0 - 3.0 * w(i) * w(i));
        if (i == 0) trip.emplace_back(i, 1, 2.0 * c);
        else if (i == n - 1) trip.emplace_back(i, n - 2, 2.0 * c);
        else {
            trip.emplace_back(i, i - 1, c);
            trip.emplace_back(i, i + 1, c);
        }
        // border: multiplier column and orthogonality row
        trip.emplace_back(i, n, trap(i) * wp(i));
        trip.emplace_back(n, i, trap(i) * wp(i));
    }
    Eigen::SparseMatrix<double> a(n + 1, n + 1);
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) throw SolverError("corrector_integrals: bordered system singular; enlarge window");
    std::vector<CorrectorSolve> out;
    for (const auto& f : rhs) {
        Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
        for (Index i = 0; i < n; ++i) b(i) = f(x(i));
        Eigen::VectorXd sol = lu.solve(b);
        if (!sol.allFinite()) throw SolverError("corrector_integrals: ill-conditioned solve; refine");
        CorrectorSolve cs;
        for (Index i = 0; i < n; ++i) {
            cs.integral += 6.0 * trap(i) * w(i) * wp(i) * wp(i) * sol(i);
            cs.orth += trap(i) * sol(i) * wp(i);
        }
        out.push_back(cs);
    }
    return out;
}

}  // namespace

InteractionConstants compute_interaction_constants(double tol) {
    const double inf = std::numeric_limits<double>::infinity();
    auto f0 = [](double x) {
        double wp = heteroclinic(x).wp;
        return wp * wp;
    };
    auto f1 = [](double x) { return 6.0 * std::exp(-kSqrt2 * x) * one_minus_w2(x) * heteroclinic(x).wp; };
    QuadratureResult q0 = adaptive_quadrature(f0, -inf, inf, tol);
    QuadratureResult q1 = adaptive_quadrature(f1, -inf, inf, tol);
    InteractionConstants c;
    c.c0 = q0.value;
    c.c1 = q1.value;
    c.c0_error = q0.error;
    c.c1_error = q1.error;
    c.cbar_sq = kSqrt2 * c.c1 / c.c0;
    return c;
}

const InteractionConstants& interaction_constants() {
    static const InteractionConstants constants = compute_interaction_constants(1e-12);
    return constants;
}

double log_cosh(double x) {
    const double a = std::abs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

TodaValue toda_profile_eval(const TodaProfile& p, double s) {
    const double z = p.kappa * (s - p.sbar) / p.epsilon;
    const double d = s - p.sbar;
    const double lk = std::log(p.kappa);
    const double lc = 0.5 * std::log(interaction_constants().cbar_sq);
    TodaValue v;
    v.value = log_cosh(z) - lk + lc + p.curvature_at_sbar * lk * d * d / 2.0;
    v.slope = p.kappa / p.epsilon * std::tanh(z) + p.curvature_at_sbar * lk * d;
    return v;
}

LinearizedTodaReport linearized_toda_checks(Index grid, double half_window) {
    LinearizedTodaReport rep;
    rep.grid = grid;
    const double h = 2e-2;
    auto pot = [](double s) { return 2.0 * sech(s) * sech(s); };
    auto l0 = [&](const auto& f, double s) { return -(second_difference(f, s, h) + pot(s) * f(s)); };
    auto f_sech = [](double s) { return sech(s); };
    auto f_tanh = [](double s) { return std::tanh(s); };
    auto f_even = [](double s) { return s * std::tanh(s) - 1.0; };
    for (int i = 0; i <= 2000; ++i) {
        const double s = -10.0 + 0.01 * i;
        rep.eigen_residual = std::max(rep.eigen_residual, std::abs(l0(f_sech, s) + sech(s)));
        rep.kernel_tanh_residual = std::max(rep.kernel_tanh_residual, std::abs(l0(f_tanh, s)));
        rep.kernel_even_residual = std::max(rep.kernel_even_residual, std::abs(l0(f_even, s)));
    }

    const double dx = 2.0 * half_window / static_cast<double>(grid);
    const Index m = grid - 1;
    Eigen::VectorXd v(m), ref(m);
    for (Index i = 0; i < m; ++i) {
        const double s = -half_window + dx * static_cast<double>(i + 1);
        v(i) = -pot(s);
        ref(i) = sech(s);
    }
    SpectrumReport sp = smallest_eigenpairs(dirichlet_schrodinger(v, dx), 1);
    rep.smallest_eigenvalue = sp.smallest.front().value;
    Eigen::VectorXd e = sp.smallest.front().vector;
    ref.normalize();
    if (e.dot(ref) < 0.0) e = -e;
    rep.eigenvector_error = (e - ref).norm();
    return rep;
}

CorrectorIntegrals corrector_integrals(double half_window, Index grid) {
    if (half_window < 8.0) throw DomainError("corrector_integrals: window too small for the W' decay");
    const double inf = std::numeric_limits<double>::infinity();
    const double tol = 1e-12;
    CorrectorIntegrals out;
    out.half_window = half_window;
    out.grid = grid;

    auto num = adaptive_quadrature([](double x) { return std::exp(-kSqrt2 * x) * one_minus_w2(x) * heteroclinic(x).wp; },
                                   -inf, inf, tol);
    auto den = adaptive_quadrature([](double x) { return one_minus_w2(x) * heteroclinic(x).wp; }, -inf, inf, tol);
    out.rho = num.value / den.value;
    const double rho = out.rho;

    std::vector<std::function<double(double)>> rhs = {
        [](double x) { return heteroclinic(x).wpp; },
        [](double x) { return x * heteroclinic(x).wp; },
        [rho](double x) {
            // e^{-sqrt2 x}(1 - W^2) stays bounded as x -> -inf; form the product before subtracting rho
            const double g = one_minus_w2(x);
            return 6.0 * (std::exp(-kSqrt2 * x) * g - rho * g);
        }};
    // Richardson on the second-order scheme
    auto coarse = solve_correctors(half_window, grid, rhs);
    auto fine = solve_correctors(half_window, 2 * grid, rhs);
    auto extrap = [](double c, double f) { return (4.0 * f - c) / 3.0; };
    out.i_x = extrap(coarse[0].integral, fine[0].integral);
    out.i_y = extrap(coarse[1].integral, fine[1].integral);
    out.i_z = extrap(coarse[2].integral, fine[2].integral);
    out.orth_x = fine[0].orth;
    out.orth_y = fine[1].orth;
    out.orth_z = fine[2].orth;

    for (std::size_t k = 0; k < rhs.size(); ++k) {
        const auto& b = rhs[k];
        auto q = adaptive_quadrature([&b](double x) { return b(x) * heteroclinic(x).wpp; }, -inf, inf, tol);
        (k == 0 ? out.rhs_x : k == 1 ? out.rhs_y : out.rhs_z) = q.value;
    }
    return out;
}

}  // namespace bjlab
