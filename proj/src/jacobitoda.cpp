#include "bjlab/jacobitoda.hpp"

#include <Eigen/SparseLU>

#include <algorithm>

namespace bjlab {

namespace {

using State2 = Eigen::Vector2d;

double quintic_step(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

/// s - c wrapped into [-L/2, L/2).
double signed_offset(double s, double c, double length) {
    double d = std::fmod(s - c, length);
    if (d < -0.5 * length) d += length;
    if (d >= 0.5 * length) d -= length;
    return d;
}

double min_gap(const BouncingField& f) {
    double g = std::numeric_limits<double>::infinity();
    const auto n = f.points.size();
    for (std::size_t j = 0; j < n; ++j) {
        const double next = (j + 1 < n) ? f.points[j + 1] : f.points.front() + f.length;
        g = std::min(g, next - f.points[j]);
    }
    return g;
}

/// Values and slopes of the solution of u'' + K u = 0 with data (u0, p0) at a, at sorted
/// abscissae xs in [a, b] (b may exceed the period; K is periodic).
void sample_jacobi(const CurvatureProfile& profile, double a, double u0, double p0, const std::vector<double>& xs,
                   std::vector<double>& val, std::vector<double>& slope) {
    val.assign(xs.size(), 0.0);
    slope.assign(xs.size(), 0.0);
    if (xs.empty()) return;
    auto rhs = [&](double s, const State2& y) { return State2(y(1), -profile(s) * y(0)); };
    std::size_t next = 0;
    while (next < xs.size() && xs[next] <= a) {
        val[next] = u0;
        slope[next] = p0;
        ++next;
    }
    auto obs = [&](const OdeStep<State2>& st) {
        while (next < xs.size() && xs[next] <= st.t1()) {
            State2 y = st.eval(xs[next]);
            val[next] = y(0);
            slope[next] = y(1);
            ++next;
        }
        return next < xs.size();
    };
    if (next < xs.size()) integrate<State2>(rhs, a, State2(u0, p0), xs.back(), OdeOptions{}, obs);
    if (next < xs.size()) throw SolverError("sample_jacobi: integration ended early");
}

/// Fourth-order periodic second difference.
Eigen::VectorXd second_derivative4(const Eigen::VectorXd& u, double h) {
    const Index n = u.size();
    Eigen::VectorXd d(n);
    const double c = 1.0 / (12.0 * h * h);
    for (Index i = 0; i < n; ++i) {
        auto at = [&](Index k) { return u((i + k + n) % n); };
        d(i) = c * (-at(-2) + 16.0 * at(-1) - 30.0 * at(0) + 16.0 * at(1) - at(2));
    }
    return d;
}

double cbar_sq() { return interaction_constants().cbar_sq; }

struct NewtonResult {
    Eigen::VectorXd psi;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

NewtonResult newton(const CurvatureProfile& profile, double eps, Eigen::VectorXd psi, const JacobiTodaOptions& opts) {
    NewtonResult out;
    Eigen::VectorXd f = jt_residual(profile, eps, psi);
    double r = f.lpNorm<Eigen::Infinity>();
    int polish = 0;
    for (int it = 0; it < opts.max_newton; ++it) {
        out.iterations = it;
        if (!std::isfinite(r)) break;
        if (r <= opts.residual_tol * std::max(1.0, psi.lpNorm<Eigen::Infinity>())) {
            out.converged = true;
            // a couple of extra steps push the residual to roundoff
            if (polish++ >= 2 || r <= 1e-3 * opts.residual_tol) break;
        }
        Eigen::SparseMatrix<double> j = jt_jacobian(profile, eps, psi).sparse();
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(j);
        if (lu.info() != Eigen::Success) break;
        Eigen::VectorXd step = lu.solve(-f);
        if (!step.allFinite()) break;
        double t = 1.0;
        bool accepted = false;
        while (t >= std::ldexp(1.0, -20)) {
            Eigen::VectorXd trial = psi + t * step;
            Eigen::VectorXd ft = jt_residual(profile, eps, trial);
            const double rt = ft.lpNorm<Eigen::Infinity>();
            if (std::isfinite(rt) && rt <= (1.0 - 1e-4 * t) * r) {
                psi = std::move(trial);
                f = std::move(ft);
                r = rt;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;  // stalls at roundoff once converged
        out.iterations = it + 1;
    }
    if (!out.converged && std::isfinite(r) && r <= opts.residual_tol * std::max(1.0, psi.lpNorm<Eigen::Infinity>()))
        out.converged = true;
    out.psi = std::move(psi);
    out.residual = r;
    return out;
}

double alpha_for_separation(const BouncingField& field, double threshold) { return threshold / min_gap(field); }

double epsilon_for_alpha(double alpha) { return 1.0 / (alpha * std::exp(alpha)); }

JacobiTodaSolution finish(const CurvatureProfile& profile, const BouncingField& field, double eps,
                          NewtonResult&& nr, const std::string& method, int steps) {
    JacobiTodaSolution sol;
    sol.epsilon = eps;
    sol.alpha = lambert_alpha(eps);
    sol.length = profile.length();
    sol.psi = std::move(nr.psi);
    sol.residual_norm = nr.residual;
    sol.field = field;
    sol.newton_iterations = nr.iterations;
    sol.continuation_steps = steps;
    sol.method = method;
    sol.glue = fit_glue_parameters(profile, sol);
    return sol;
}

}  // namespace

double glue_separation(const BouncingField& field, double epsilon) {
    return lambert_alpha(epsilon) * min_gap(field);
}

Index jt_grid_size(const BouncingField& field, double epsilon) {
    const double alpha = lambert_alpha(epsilon);
    const double kappa_over_eps = alpha * field.jumps.minCoeff() / 2.0;
    const double want = std::ceil(40.0 * field.length * kappa_over_eps);
    return std::max<Index>(4096, static_cast<Index>(want));
}

std::pair<Eigen::VectorXd, GlueParameters> glue_initial_guess(const CurvatureProfile& profile,
                                                              const BouncingField& field, double epsilon,
                                                              Index grid, double threshold) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("glue_initial_guess: need 0 < eps < 1");
    if (field.n() < 1) throw DomainError("glue_initial_guess: empty field");
    const double alpha = lambert_alpha(epsilon);
    const double gap = min_gap(field);
    if (alpha * gap < threshold) throw DomainError("eps too large for gluing; use continuation entry point");
    const double cbar = interaction_constants().cbar();
    const int n = field.n();
    const double length = field.length;

    GlueParameters params;
    params.r_match = std::pow(alpha, -2.0 / 3.0);
    std::vector<double> delta(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double nj = field.jumps(j);
        GlueMinimum m;
        m.kappa = epsilon * alpha * nj / 2.0;
        m.sbar = field.points[static_cast<std::size_t>(j)];
        m.delta = -std::log(nj / cbar) / alpha;
        m.theta = 0.0;
        delta[static_cast<std::size_t>(j)] = m.delta;
        params.minima.push_back(m);
    }

    // outer part: on segment j the Jacobi field with end values 1 + delta_j, 1 + delta_{j+1}
    Eigen::VectorXd outer(grid);
    const double h = length / static_cast<double>(grid);
    const double s0 = field.points.front();
    for (int j = 0; j < n; ++j) {
        const auto& seg = field.segments[static_cast<std::size_t>(j)];
        const double va = 1.0 + delta[static_cast<std::size_t>(j)];
        const double vb = 1.0 + delta[static_cast<std::size_t>((j + 1) % n)];
        const double c = (vb - va * seg.fund.y1) / seg.fund.y2;
        std::vector<double> xs;
        std::vector<Index> ids;
        for (Index i = 0; i < grid; ++i) {
            const double s = s0 + profile.wrap(h * static_cast<double>(i) - s0);
            if (s >= seg.a && s < seg.b) {
                xs.push_back(s);
                ids.push_back(i);
            }
        }
        std::vector<Index> order(xs.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<Index>(k);
        std::sort(order.begin(), order.end(), [&](Index x, Index y) { return xs[static_cast<std::size_t>(x)] < xs[static_cast<std::size_t>(y)]; });
        std::vector<double> sorted(xs.size());
        for (std::size_t k = 0; k < order.size(); ++k) sorted[k] = xs[static_cast<std::size_t>(order[k])];
        std::vector<double> val, slope;
        sample_jacobi(profile, seg.a, va, c, sorted, val, slope);
        for (std::size_t k = 0; k < order.size(); ++k) outer(ids[static_cast<std::size_t>(order[k])]) = alpha * val[k];
    }

    // inner Toda cores blended in with a partition of unity
    const double r_blend = std::min(params.r_match, gap / 4.0);
    Eigen::VectorXd guess = outer;
    for (Index i = 0; i < grid; ++i) {
        const double s = h * static_cast<double>(i);
        for (int j = 0; j < n; ++j) {
            const auto& m = params.minima[static_cast<std::size_t>(j)];
            const double d = signed_offset(s, m.sbar, length);
            const double w = 1.0 - quintic_step(std::abs(d) / r_blend - 1.0);
            if (w <= 0.0) continue;
            TodaProfile tp{m.kappa, 0.0, epsilon, profile(m.sbar)};
            const double inner = toda_profile_eval(tp, d).value;
            guess(i) = w * inner + (1.0 - w) * outer(i);
        }
    }
    return {guess, params};
}

Eigen::VectorXd jt_residual(const CurvatureProfile& profile, double epsilon, const Eigen::VectorXd& psi) {
    const Index n = psi.size();
    const double h = profile.length() / static_cast<double>(n);
    Eigen::VectorXd k = profile.sample(n);
    Eigen::VectorXd d2 = second_derivative4(psi, h);
    const double e2 = epsilon * epsilon;
    return (-e2 * (d2.array() + k.array() * psi.array()) + cbar_sq() * (-2.0 * psi.array()).exp()).matrix();
}

BandedMatrix jt_jacobian(const CurvatureProfile& profile, double epsilon, const Eigen::VectorXd& psi) {
    const Index n = psi.size();
    if (n < 6) throw DomainError("jt_jacobian: grid too small");
    const double h = profile.length() / static_cast<double>(n);
    Eigen::VectorXd k = profile.sample(n);
    const double e2 = epsilon * epsilon;
    const double c = e2 / (12.0 * h * h);
    BandedMatrix j(n, 2, true);
    for (Index i = 0; i < n; ++i) {
        j.add(i, i, 30.0 * c - e2 * k(i) - 2.0 * cbar_sq() * std::exp(-2.0 * psi(i)));
        j.add((i + 1) % n, i, -16.0 * c);
        j.add((i + 2) % n, i, c);
    }
    return j;
}

JacobiTodaSolution solve_jacobi_toda(const CurvatureProfile& profile, const BouncingField& field, double epsilon,
                                     const std::optional<Eigen::VectorXd>& guess, const JacobiTodaOptions& opts) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("solve_jacobi_toda: need 0 < eps < 1");
    if (guess) {
        NewtonResult nr = newton(profile, epsilon, *guess, opts);
        if (!nr.converged)
            throw SolverError("solve_jacobi_toda: Newton diverged from the supplied guess (residual " +
                              std::to_string(nr.residual) + ")");
        return finish(profile, field, epsilon, std::move(nr), "guess", 0);
    }

    const double sep = glue_separation(field, epsilon);
    // the ladder starts where gluing is admissible, or below epsilon if direct gluing failed
    double start = epsilon;
    if (sep >= opts.glue_threshold) {
        const Index grid = opts.grid > 0 ? opts.grid : jt_grid_size(field, epsilon);
        auto [g, params] = glue_initial_guess(profile, field, epsilon, grid, opts.glue_threshold);
        NewtonResult nr = newton(profile, epsilon, g, opts);
        if (nr.converged) return finish(profile, field, epsilon, std::move(nr), "glue", 0);
        start = epsilon * opts.continuation_ratio;
    } else {
        start = epsilon_for_alpha(alpha_for_separation(field, opts.glue_threshold)) * (1.0 - 1e-12);
    }

    // find a glued solve at or below `start`
    NewtonResult base;
    double eps_base = start;
    for (int tries = 0; tries < 10; ++tries) {
        const Index grid = opts.grid > 0 ? opts.grid : std::max(jt_grid_size(field, eps_base), jt_grid_size(field, epsilon));
        auto [g, params] = glue_initial_guess(profile, field, eps_base, grid, opts.glue_threshold);
        base = newton(profile, eps_base, g, opts);
        if (base.converged) break;
        eps_base *= opts.continuation_ratio;
    }
    if (!base.converged) throw SolverError("solve_jacobi_toda: no glued solve converged below eps = " + std::to_string(start));

    // ladder up to epsilon in steps of 1 / ratio, shortening the step on failure
    Eigen::VectorXd psi = base.psi;
    double eps_good = eps_base;
    int steps = 0;
    NewtonResult last = base;
    double factor = 1.0 / opts.continuation_ratio;
    while (eps_good < epsilon) {
        if (steps >= opts.max_continuation)
            throw ContinuationStall("solve_jacobi_toda: continuation budget exhausted; last good eps = " +
                                        std::to_string(eps_good), eps_good);
        const double next = std::min(epsilon, eps_good * factor);
        NewtonResult nr = newton(profile, next, psi, opts);
        ++steps;
        if (nr.converged) {
            eps_good = next;
            psi = nr.psi;
            last = std::move(nr);
            factor = std::min(1.0 / opts.continuation_ratio, factor * factor);
        } else {
            factor = std::sqrt(factor);
            if (factor < 1.0 + 1e-4)
                throw ContinuationStall("solve_jacobi_toda: continuation stalled; last good eps = " +
                                        std::to_string(eps_good), eps_good);
        }
    }
    return finish(profile, field, epsilon, std::move(last), "continuation", steps);
}

JacobiTodaSolution regrid_jacobi_toda(const CurvatureProfile& profile, const JacobiTodaSolution& solution,
                                      Index grid, const JacobiTodaOptions& opts) {
    Eigen::VectorXd seed = resample_periodic(solution.psi, grid);
    JacobiTodaSolution out = solve_jacobi_toda(profile, solution.field, solution.epsilon, seed, opts);
    out.method = solution.method;
    out.continuation_steps = solution.continuation_steps;
    return out;
}

Eigen::VectorXd resample_periodic(const Eigen::VectorXd& u, Index m) {
    const Index n = u.size();
    Eigen::VectorXd out(m);
    for (Index i = 0; i < m; ++i) {
        const double x = static_cast<double>(i) * static_cast<double>(n) / static_cast<double>(m);
        const Index k = static_cast<Index>(std::floor(x));
        const double t = x - static_cast<double>(k);
        auto at = [&](Index j) { return u(((k + j) % n + n) % n); };
        out(i) = at(-1) * (-t * (t - 1.0) * (t - 2.0) / 6.0) + at(0) * ((t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0) +
                 at(1) * (-(t + 1.0) * t * (t - 2.0) / 2.0) + at(2) * ((t + 1.0) * t * (t - 1.0) / 6.0);
    }
    return out;
}

std::vector<Index> local_minima(const Eigen::VectorXd& psi) {
    const Index n = psi.size();
    std::vector<Index> out;
    for (Index i = 0; i < n; ++i) {
        const double l = psi((i + n - 1) % n), r = psi((i + 1) % n);
        if (psi(i) < l && psi(i) <= r) out.push_back(i);
    }
    return out;
}

GlueParameters fit_glue_parameters(const CurvatureProfile& profile, const JacobiTodaSolution& sol) {
    const BouncingField& field = sol.field;
    const int n = field.n();
    const Index N = sol.grid();
    const double h = sol.h();
    const double eps = sol.epsilon;
    const double alpha = sol.alpha;
    const double cbar = interaction_constants().cbar();
    GlueParameters out;
    out.r_match = std::pow(alpha, -2.0 / 3.0);

    std::vector<Index> mins = local_minima(sol.psi);
    if (static_cast<int>(mins.size()) != n) return out;  // no matching; constants stay NaN

    // minima and curvature-free Toda relations
    std::vector<double> sbar(static_cast<std::size_t>(n));
    std::vector<double> kappa(static_cast<std::size_t>(n));
    {
        // pair each minimum with the nearest field point
        std::vector<double> loc, val;
        for (Index i : mins) {
            const double l = sol.psi((i + N - 1) % N), c = sol.psi(i), r = sol.psi((i + 1) % N);
            const double den = l - 2.0 * c + r;
            const double x = den > 0.0 ? 0.5 * (l - r) / den : 0.0;
            loc.push_back(profile.wrap(h * (static_cast<double>(i) + x)));
            val.push_back(c - 0.25 * (l - r) * x);
        }
        for (int j = 0; j < n; ++j) {
            const double sj = field.points[static_cast<std::size_t>(j)];
            std::size_t best = 0;
            double bd = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < loc.size(); ++k) {
                const double d = std::abs(signed_offset(loc[k], sj, field.length));
                if (d < bd) {
                    bd = d;
                    best = k;
                }
            }
            sbar[static_cast<std::size_t>(j)] = sj + signed_offset(loc[best], sj, field.length);
            kappa[static_cast<std::size_t>(j)] = cbar * std::exp(-val[best]);
        }
    }

    // least-squares Jacobi fits of Psi / alpha on each outer stretch [sbar_j + R, sbar_{j+1} - R]
    const double gap = min_gap(field);
    const double R = std::min(2.0 * out.r_match, 0.4 * gap);
    std::vector<double> v_right(static_cast<std::size_t>(n)), p_right(static_cast<std::size_t>(n));
    std::vector<double> v_left(static_cast<std::size_t>(n)), p_left(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double a = sbar[static_cast<std::size_t>(j)];
        double b = sbar[static_cast<std::size_t>((j + 1) % n)];
        while (b <= a) b += field.length;
        std::vector<double> xs;
        std::vector<double> ys;
        const Index first = static_cast<Index>(std::ceil((a + R) / h));
        for (Index k = first; h * static_cast<double>(k) <= b - R; ++k) {
            xs.push_back(h * static_cast<double>(k));
            ys.push_back(sol.psi(((k % N) + N) % N) / alpha);
        }
        if (xs.size() < 4) return out;
        // basis solutions with (1, 0) and (0, 1) data at a; the far end is reached by extending xs
        std::vector<double> ext = xs;
        ext.push_back(b);
        std::vector<double> y1, y1p, y2, y2p;
        sample_jacobi(profile, a, 1.0, 0.0, ext, y1, y1p);
        sample_jacobi(profile, a, 0.0, 1.0, ext, y2, y2p);
        Eigen::MatrixXd m(static_cast<Index>(xs.size()), 2);
        Eigen::VectorXd rhs(static_cast<Index>(xs.size()));
        for (std::size_t k = 0; k < xs.size(); ++k) {
            m(static_cast<Index>(k), 0) = y1[k];
            m(static_cast<Index>(k), 1) = y2[k];
            rhs(static_cast<Index>(k)) = ys[k];
        }
        Eigen::Vector2d coef = m.colPivHouseholderQr().solve(rhs);
        v_right[static_cast<std::size_t>(j)] = coef(0);
        p_right[static_cast<std::size_t>(j)] = coef(1);
        const std::size_t e = ext.size() - 1;
        v_left[static_cast<std::size_t>((j + 1) % n)] = coef(0) * y1[e] + coef(1) * y2[e];
        p_left[static_cast<std::size_t>((j + 1) % n)] = coef(0) * y1p[e] + coef(1) * y2p[e];
    }

    out.c_kappa = out.c_delta = out.c_theta = out.c_sbar = 0.0;
    for (int j = 0; j < n; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        // corner of the two fitted branches near sbar_j, to first order
        const double slope_gap = p_right[jj] - p_left[jj];
        const double x = std::abs(slope_gap) > 1e-12 ? (v_left[jj] - v_right[jj]) / slope_gap : 0.0;
        GlueMinimum m;
        m.kappa = kappa[jj];
        m.sbar = sbar[jj];
        m.delta = v_right[jj] + p_right[jj] * x - 1.0;
        m.theta = p_right[jj] + p_left[jj];
        out.minima.push_back(m);
        const double nj = field.jumps(j);
        out.c_kappa = std::max(out.c_kappa, std::abs(m.kappa / eps - alpha * nj / 2.0));
        out.c_delta = std::max(out.c_delta, alpha * alpha * std::abs(m.delta + std::log(nj / cbar) / alpha));
        out.c_theta = std::max(out.c_theta, alpha * alpha * std::abs(m.theta));
        out.c_sbar = std::max(out.c_sbar, alpha * std::abs(m.sbar - field.points[jj]));
    }
    return out;
}

double outer_deviation(const CurvatureProfile& profile, const JacobiTodaSolution& sol) {
    const BouncingField& field = sol.field;
    const double cut = min_gap(field) / 4.0;
    double worst = 0.0;
    for (Index i = 0; i < sol.grid(); ++i) {
        const double s = sol.s(i);
        bool outer = true;
        for (double p : field.points)
            if (std::abs(signed_offset(s, p, field.length)) < cut) outer = false;
        if (!outer) continue;
        worst = std::max(worst, std::abs(sol.psi(i) / sol.alpha - field.phi(profile, s)));
    }
    return worst;
}

BandedMatrix jt_linearized_operator(const CurvatureProfile& profile, const JacobiTodaSolution& sol) {
    const Index n = sol.grid();
    Eigen::VectorXd k = profile.sample(n);
    const double e2 = sol.epsilon * sol.epsilon;
    Eigen::VectorXd v = -k.array() - 2.0 * cbar_sq() * (-2.0 * sol.psi.array()).exp() / e2;
    return periodic_schrodinger(v, sol.h());
}

JtSpectrum jt_linearized_spectrum(const CurvatureProfile& profile, const JacobiTodaSolution& sol,
                                  bool check_refinement) {
    const double kmax = std::max(std::abs(profile.sup()), std::abs(profile.inf()));
    auto tolerance = [&](double h) { return 4.0 * (1.0 + kmax) * (1.0 + kmax) * h * h / 12.0; };
    JtSpectrum out;
    BandedMatrix a = jt_linearized_operator(profile, sol);
    const double tol = tolerance(sol.h());
    out.zero_tolerance = tol;
    Inertia in = inertia(a, 0.0, tol / a.norm_inf());
    out.index = in.neg;
    out.nullity = in.zero;
    if (check_refinement) {
        JacobiTodaSolution fine = regrid_jacobi_toda(profile, sol, 2 * sol.grid());
        BandedMatrix af = jt_linearized_operator(profile, fine);
        out.refined = inertia(af, 0.0, tolerance(fine.h()) / af.norm_inf());
    }
    EigenOptions eo;
    eo.zero_band = tol / a.norm_inf();
    const Index k = std::min<Index>(in.neg + in.zero + 2, sol.grid() / 4);
    SpectrumReport rep = smallest_eigenpairs(a, k, eo);
    const double e2 = sol.epsilon * sol.epsilon;
    out.gap = std::numeric_limits<double>::infinity();
    for (const auto& p : rep.smallest) {
        out.eigenvalues.push_back(e2 * p.value);
        out.gap = std::min(out.gap, std::abs(p.value));
    }
    return out;
}

}  // namespace bjlab
