#include "bjlab/allencahn.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <numbers>

namespace bjlab {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

double quintic_step(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

Index wrap(Index i, Index n) { return (i % n + n) % n; }

/// Solves a x = b for symmetric `a`, LDL^T first and LU if that breaks down.
Eigen::VectorXd solve_symmetric(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& b) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(a);
    if (ldlt.info() == Eigen::Success) {
        Eigen::VectorXd x = ldlt.solve(b);
        if (x.allFinite() && (a * x - b).lpNorm<Eigen::Infinity>() <= 1e-8 * (1.0 + b.lpNorm<Eigen::Infinity>()))
            return x;
    }
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) throw SolverError("allen-cahn: singular Newton matrix");
    return lu.solve(b);
}

}  // namespace

StripGrid::StripGrid(TubeMetric metric, Index ns, Index nt)
    : metric_(std::move(metric)), ns_(ns), nt_(nt) {
    if (ns < 8 || nt < 4) throw DomainError("StripGrid: need ns >= 8 and nt >= 4");
    const double length = metric_.profile().length();
    hs_ = length / static_cast<double>(ns);
    ht_ = 2.0 * metric_.half_width() / static_cast<double>(nt);
    w_.resize(ns, nt + 1);
    as_.resize(ns, nt + 1);
    bt_.resize(ns, nt);
    for (Index i = 0; i < ns; ++i) {
        const double s = this->s(i);
        const double sh = s + 0.5 * hs_;
        for (Index j = 0; j <= nt; ++j) {
            const double t = this->t(j);
            w_(i, j) = metric_.sqrt_e(s, t);
            as_(i, j) = 1.0 / metric_.sqrt_e(sh, t);
            if (j < nt) bt_(i, j) = metric_.sqrt_e(s, t + 0.5 * ht_);
        }
    }
    if (w_.minCoeff() <= 0.0) throw DomainError("StripGrid: metric degenerates inside the tube");
}

Eigen::VectorXd StripGrid::pack(const Eigen::MatrixXd& u) const {
    Eigen::VectorXd x(unknowns());
    for (Index i = 0; i < ns_; ++i)
        for (Index j = 1; j < nt_; ++j) x(index(i, j)) = u(i, j);
    return x;
}

Eigen::MatrixXd StripGrid::unpack(const Eigen::VectorXd& x, double boundary) const {
    Eigen::MatrixXd u(ns_, nt_ + 1);
    for (Index i = 0; i < ns_; ++i) {
        u(i, 0) = boundary;
        u(i, nt_) = boundary;
        for (Index j = 1; j < nt_; ++j) u(i, j) = x(index(i, j));
    }
    return u;
}

Index ac_default_nt(double epsilon) {
    const Index half = static_cast<Index>(std::lround(96.0 * 0.05 / epsilon));
    return 2 * std::max<Index>(half, 2);
}

ACApproximation build_approximation(const JacobiTodaSolution& jt, const StripGrid& grid) {
    const double eps = jt.epsilon;
    const double tau = grid.metric().half_width();
    ACApproximation out{grid, eps, {}, {}, {}, 0.0, 0.0, {}};
    out.epsilon = eps;
    out.psi = resample_periodic(jt.psi, grid.ns());
    if (eps * out.psi.maxCoeff() / kSqrt2 > tau / 2.0) throw DomainError("shrink eps or widen tube");
    if (out.psi.minCoeff() <= 0.0) throw DomainError("build_approximation: Psi must be positive");
    out.f2 = out.psi / kSqrt2;
    out.f1 = -out.f2;
    out.inner_radius = tau / 2.0;
    out.outer_radius = 0.75 * tau;
    out.u.resize(grid.ns(), grid.nt() + 1);
    for (Index i = 0; i < grid.ns(); ++i) {
        for (Index j = 0; j <= grid.nt(); ++j) {
            const double t = grid.t(j);
            const double chi = 1.0 - quintic_step((std::abs(t) - out.inner_radius) / (out.outer_radius - out.inner_radius));
            const double w2 = heteroclinic((t - eps * out.f2(i)) / eps).w;
            const double w1 = heteroclinic((t - eps * out.f1(i)) / eps).w;
            out.u(i, j) = chi * (w2 - w1) + 1.0;
        }
        out.u(i, 0) = 1.0;
        out.u(i, grid.nt()) = 1.0;
    }
    return out;
}

Eigen::MatrixXd ac_residual(const StripGrid& grid, double eps, const Eigen::MatrixXd& u) {
    const Index ns = grid.ns(), nt = grid.nt();
    const double cs = eps * eps / (grid.hs() * grid.hs());
    const double ct = eps * eps / (grid.ht() * grid.ht());
    const auto& w = grid.weight();
    const auto& as = grid.s_edge();
    const auto& bt = grid.t_edge();
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(ns, nt + 1);
    for (Index i = 0; i < ns; ++i) {
        const Index ip = wrap(i + 1, ns), im = wrap(i - 1, ns);
        for (Index j = 1; j < nt; ++j) {
            const double c = u(i, j);
            const double div = cs * (as(i, j) * (u(ip, j) - c) - as(im, j) * (c - u(im, j))) +
                               ct * (bt(i, j) * (u(i, j + 1) - c) - bt(i, j - 1) * (c - u(i, j - 1)));
            r(i, j) = div / w(i, j) + c - c * c * c;
        }
    }
    return r;
}

ACOperator ac_operator(const StripGrid& grid, double eps, const Eigen::MatrixXd& u) {
    const Index ns = grid.ns(), nt = grid.nt();
    const double cs = eps * eps / (grid.hs() * grid.hs());
    const double ct = eps * eps / (grid.ht() * grid.ht());
    const auto& w = grid.weight();
    const auto& as = grid.s_edge();
    const auto& bt = grid.t_edge();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(grid.unknowns() * 5));
    ACOperator op;
    op.mass.resize(grid.unknowns());
    for (Index i = 0; i < ns; ++i) {
        const Index ip = wrap(i + 1, ns), im = wrap(i - 1, ns);
        for (Index j = 1; j < nt; ++j) {
            const Index k = grid.index(i, j);
            const double c = u(i, j);
            op.mass(k) = w(i, j);
            double diag = cs * (as(i, j) + as(im, j)) + ct * (bt(i, j) + bt(i, j - 1)) + w(i, j) * (3.0 * c * c - 1.0);
            trip.emplace_back(k, k, diag);
            trip.emplace_back(k, grid.index(ip, j), -cs * as(i, j));
            trip.emplace_back(k, grid.index(im, j), -cs * as(im, j));
            if (j + 1 < nt) trip.emplace_back(k, grid.index(i, j + 1), -ct * bt(i, j));
            if (j - 1 > 0) trip.emplace_back(k, grid.index(i, j - 1), -ct * bt(i, j - 1));
        }
    }
    op.a.resize(grid.unknowns(), grid.unknowns());
    op.a.setFromTriplets(trip.begin(), trip.end());
    return op;
}

double ac_energy(const StripGrid& grid, double eps, const Eigen::MatrixXd& u) {
    const Index ns = grid.ns(), nt = grid.nt();
    const double hs = grid.hs(), ht = grid.ht();
    const auto& w = grid.weight();
    const auto& as = grid.s_edge();
    const auto& bt = grid.t_edge();
    double e = 0.0;
    for (Index i = 0; i < ns; ++i) {
        const Index ip = wrap(i + 1, ns);
        double line = 0.0;
        for (Index j = 0; j <= nt; ++j) {
            const double ds = (u(ip, j) - u(i, j)) / hs;
            // boundary rows carry half the s-edge and node weight
            const double half = (j == 0 || j == nt) ? 0.5 : 1.0;
            const double pot = 1.0 - u(i, j) * u(i, j);
            line += half * (0.5 * eps * as(i, j) * ds * ds + w(i, j) * pot * pot / (4.0 * eps));
            if (j < nt) {
                const double dt = (u(i, j + 1) - u(i, j)) / ht;
                line += 0.5 * eps * bt(i, j) * dt * dt;
            }
        }
        e += line;
    }
    return e * hs * ht;
}

ZeroSet zero_set(const StripGrid& grid, const Eigen::MatrixXd& u) {
    const Index ns = grid.ns(), nt = grid.nt();
    ZeroSet z;
    z.s.resize(ns);
    z.t_minus.resize(ns);
    z.t_plus.resize(ns);
    for (Index i = 0; i < ns; ++i) {
        z.s(i) = grid.s(i);
        std::vector<double> cross;
        for (Index j = 0; j < nt; ++j) {
            const double a = u(i, j), b = u(i, j + 1);
            if ((a >= 0.0) != (b >= 0.0)) cross.push_back(grid.t(j) + grid.ht() * a / (a - b));
        }
        if (cross.size() != 2)
            throw SolverError("zero_set: " + std::to_string(cross.size()) + " crossings on the line s = " +
                              std::to_string(grid.s(i)));
        z.t_minus(i) = cross[0];
        z.t_plus(i) = cross[1];
    }
    return z;
}

ACSolution solve_allen_cahn(const ACApproximation& approx, const ACOptions& opts) {
    const StripGrid& grid = approx.grid;
    const double eps = approx.epsilon;
    Eigen::MatrixXd u = approx.u;
    Eigen::MatrixXd r = ac_residual(grid, eps, u);
    double rn = r.lpNorm<Eigen::Infinity>();
    ACSolution sol{grid, eps, {}, {}, {}, 0.0, 0.0, 0, 0.0, {}, 0.0, 0.0, 0.0, 0.0};
    sol.epsilon = eps;
    sol.approximation = approx.u;
    sol.psi = approx.psi;
    sol.approximation_residual = rn;
    if (!std::isfinite(rn)) throw DomainError("solve_allen_cahn: approximation residual is not finite");

    // Armijo on the mass-weighted 2-norm, for which the Newton step is a descent direction
    auto merit = [&](const Eigen::MatrixXd& res) {
        return std::sqrt(grid.weight().cwiseProduct(res.cwiseProduct(res)).sum() * grid.hs() * grid.ht());
    };
    double m = merit(r);
    int it = 0;
    for (; it < opts.max_newton && rn > opts.residual_tol; ++it) {
        ACOperator op = ac_operator(grid, eps, u);
        Eigen::VectorXd rhs = op.mass.cwiseProduct(grid.pack(r));
        Eigen::VectorXd step = solve_symmetric(op.a, rhs);
        double t = 1.0;
        bool accepted = false;
        while (t >= std::ldexp(1.0, -20)) {
            Eigen::MatrixXd trial = grid.unpack(grid.pack(u) + t * step);
            Eigen::MatrixXd rt = ac_residual(grid, eps, trial);
            const double mt = merit(rt);
            if (std::isfinite(mt) && mt <= (1.0 - 1e-4 * t) * m) {
                u = std::move(trial);
                r = std::move(rt);
                m = mt;
                rn = r.lpNorm<Eigen::Infinity>();
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;
    }
    if (u.maxCoeff() - u.minCoeff() < 1e-3) throw SolverError("layer collapse; decrease eps or refine guess");
    if (!(rn <= opts.residual_tol))
        throw SolverError("solve_allen_cahn: Newton stalled at residual " + std::to_string(rn));

    sol.u = u;
    sol.residual_norm = rn;
    sol.newton_iterations = it;
    sol.energy = ac_energy(grid, eps, u);
    sol.zeros = zero_set(grid, u);
    sol.v_norm = (u - approx.u).lpNorm<Eigen::Infinity>();
    sol.h1_norm = (sol.zeros.t_minus / eps + approx.psi / kSqrt2).lpNorm<Eigen::Infinity>();
    sol.h2_norm = (sol.zeros.t_plus / eps - approx.psi / kSqrt2).lpNorm<Eigen::Infinity>();
    sol.max_abs_u = u.cwiseAbs().maxCoeff();
    return sol;
}

ACSpectrum ac_morse_index(const ACSolution& sol, Index extra) {
    const StripGrid& grid = sol.grid;
    const double eps = sol.epsilon;
    ACOperator op = ac_operator(grid, eps, sol.u);
    // M^{-1/2} A M^{-1/2} carries the eigenvalues of the weighted problem
    Eigen::VectorXd isq = op.mass.cwiseSqrt().cwiseInverse();
    Eigen::SparseMatrix<double> b = isq.asDiagonal() * op.a * isq.asDiagonal();
    b = 0.5 * (b + Eigen::SparseMatrix<double>(b.transpose()));

    const auto& profile = grid.metric().profile();
    const double kmax = std::max(std::abs(profile.sup()), std::abs(profile.inf()));
    // low modes vary on the O(1) scale along s; the stencil moves them by ~ eps^2 w^4 hs^2 / 12
    const double tol = eps * eps * 4.0 * (1.0 + kmax) * (1.0 + kmax) * grid.hs() * grid.hs() / 12.0;
    double norm = 0.0;
    for (int k = 0; k < b.outerSize(); ++k) {
        double row = 0.0;
        for (Eigen::SparseMatrix<double>::InnerIterator itr(b, k); itr; ++itr) row += std::abs(itr.value());
        norm = std::max(norm, row);
    }
    Inertia in = inertia(b, 0.0, tol / norm);
    ACSpectrum out;
    out.index = in.neg;
    out.zero_count = in.zero;
    out.nullity_flag = in.zero > 0;
    out.zero_tolerance = tol;

    EigenOptions eo;
    eo.zero_band = tol / norm;
    eo.block_size = std::max<Index>(2, std::min<Index>(2 * (in.neg + in.zero) + 4, 24));
    SpectrumReport rep = smallest_eigenpairs(b, in.neg + in.zero + extra, eo);

    // projections on eps-scaled W' along each layer
    const double ht = grid.ht();
    for (const auto& p : rep.smallest) {
        out.eigenvalues.push_back(p.value);
        Eigen::MatrixXd phi = grid.unpack(isq.cwiseProduct(p.vector), 0.0);
        double total = 0.0, captured = 0.0, common = 0.0, layer = 0.0;
        for (Index i = 0; i < grid.ns(); ++i) {
            double p1 = 0.0, p2 = 0.0, n1 = 0.0, n2 = 0.0;
            for (Index j = 1; j < grid.nt(); ++j) {
                const double w = grid.weight()(i, j) * ht;
                const double t = grid.t(j);
                const double b1 = heteroclinic((t - sol.zeros.t_minus(i)) / eps).wp;
                const double b2 = heteroclinic((t - sol.zeros.t_plus(i)) / eps).wp;
                p1 += w * phi(i, j) * b1;
                p2 += w * phi(i, j) * b2;
                n1 += w * b1 * b1;
                n2 += w * b2 * b2;
                total += w * phi(i, j) * phi(i, j);
            }
            const double k1 = p1 / n1, k2 = p2 / n2;
            captured += k1 * k1 * n1 + k2 * k2 * n2;
            // a common shift moves the two layers' W' bumps with opposite signs
            common += 0.5 * (k2 - k1) * (k2 - k1);
            layer += k1 * k1 + k2 * k2;
        }
        ModeDiagnostic d;
        d.eigenvalue = p.value;
        d.layer_fraction = total > 0.0 ? captured / total : 0.0;
        d.even_fraction = layer > 0.0 ? common / layer : 0.0;
        out.modes.push_back(d);
    }
    return out;
}

}  // namespace bjlab
