#include "bjlab/bouncing.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <random>

namespace bjlab {

namespace {

void check_points(const CurvatureProfile& profile, const std::vector<double>& points) {
    if (points.empty()) throw DomainError("H_n: need at least one point");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i])) throw DomainError("H_n: non-finite point");
        if (i > 0 && !(points[i] > points[i - 1])) throw DomainError("H_n: points must be strictly increasing");
    }
    if (!(points.back() - points.front() < profile.length()))
        throw DomainError("H_n: points must lie within one period");
}

std::size_t prev_index(std::size_t j, std::size_t n) { return (j + n - 1) % n; }
std::size_t next_index(std::size_t j, std::size_t n) { return (j + 1) % n; }

double min_gap(const std::vector<double>& pts, double length) {
    double g = pts.front() + length - pts.back();
    for (std::size_t i = 1; i < pts.size(); ++i) g = std::min(g, pts[i] - pts[i - 1]);
    return g;
}

/// Signed distance between two sets of n points on the circle, minimized over cyclic relabelings.
double cyclic_distance(const std::vector<double>& a, const std::vector<double>& b, double length) {
    const std::size_t n = a.size();
    double best = std::numeric_limits<double>::infinity();
    auto circ = [&](double x, double y) {
        double d = std::fmod(std::abs(x - y), length);
        return std::min(d, length - d);
    };
    for (std::size_t shift = 0; shift < n; ++shift) {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, circ(a[i], b[(i + shift) % n]));
        best = std::min(best, worst);
    }
    return best;
}

}  // namespace

HnEvaluation evaluate_hn(const CurvatureProfile& profile, const std::vector<double>& points, const OdeOptions& opts) {
    check_points(profile, points);
    const std::size_t n = points.size();
    HnEvaluation out;
    out.segments.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double a = points[j];
        const double b = (j + 1 < n) ? points[j + 1] : points[0] + profile.length();
        out.segments.push_back(segment_energy(profile, a, b, opts));
        out.value += out.segments.back().h;
    }
    return out;
}

double hn_value(const CurvatureProfile& profile, const std::vector<double>& points) {
    return evaluate_hn(profile, points).value;
}

Eigen::VectorXd hn_gradient(const HnEvaluation& eval) {
    if (!eval.finite()) throw DomainError("hn_gradient: H_n is -infinity at this configuration");
    const std::size_t n = eval.segments.size();
    Eigen::VectorXd g(static_cast<Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
        const double pp = eval.segments[j].minimizer.slope_a;
        const double pm = eval.segments[prev_index(j, n)].minimizer.slope_b;
        g(static_cast<Index>(j)) = pp * pp - pm * pm;
    }
    return g;
}

Eigen::VectorXd hn_gradient(const CurvatureProfile& profile, const std::vector<double>& points) {
    return hn_gradient(evaluate_hn(profile, points));
}

Eigen::MatrixXd hn_hessian_s(const CurvatureProfile& profile, const HnEvaluation& eval) {
    if (!eval.finite()) throw DomainError("hn_hessian: H_n is -infinity at this configuration");
    const std::size_t n = eval.segments.size();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Index>(n), static_cast<Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
        const SegmentSolution& seg = eval.segments[j].minimizer;
        const SegmentSolution& prev = eval.segments[prev_index(j, n)].minimizer;
        const double k = profile(seg.a);
        const double pp = seg.slope_a;
        const double pm = prev.slope_b;
        const auto jj = static_cast<Index>(j);
        const auto jn = static_cast<Index>(next_index(j, n));
        const auto jp = static_cast<Index>(prev_index(j, n));
        // moving an end point by ds perturbs the minimizer by a Jacobi field with end value -slope*ds
        h(jj, jj) += 2.0 * pp * (-k - pp * seg.daa()) - 2.0 * pm * (-k - pm * prev.dbb());
        h(jj, jn) += 2.0 * pp * (-seg.slope_b * seg.dab());
        h(jj, jp) += -2.0 * pm * (-prev.slope_a * prev.dba());
    }
    return h;
}

Eigen::MatrixXd hn_hessian_s(const CurvatureProfile& profile, const std::vector<double>& points) {
    return hn_hessian_s(profile, evaluate_hn(profile, points));
}

HessianReport hn_hessian(const CurvatureProfile& profile, const BouncingField& field) {
    const auto n = static_cast<std::size_t>(field.n());
    if (field.segments.size() != n || n == 0) throw DomainError("hn_hessian: incomplete field");
    const auto nn = static_cast<Index>(n);
    // column i of L: eta'(s_j-) + eta'(s_j+) for sigma = e_i
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(nn, nn);
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::VectorXd sigma = Eigen::VectorXd::Zero(nn);
        sigma(static_cast<Index>(i)) = 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            const SegmentSolution& seg = field.segments[j];
            if (seg.conjugate) throw SolverError("hn_hessian: segment Dirichlet problem is singular");
            // eta on segment j: eta(s_j+) = sigma_j, eta(s_{j+1}-) = -sigma_{j+1}
            const double ua = sigma(static_cast<Index>(j));
            const double ub = -sigma(static_cast<Index>(next_index(j, n)));
            const double da = seg.daa() * ua + seg.dab() * ub;
            const double db = seg.dba() * ua + seg.dbb() * ub;
            l(static_cast<Index>(j), static_cast<Index>(i)) += da;
            l(static_cast<Index>(next_index(j, n)), static_cast<Index>(i)) += db;
        }
    }
    HessianReport rep;
    const double scale = std::max(l.cwiseAbs().maxCoeff(), 1e-300);
    rep.asymmetry = (l - l.transpose()).cwiseAbs().maxCoeff() / scale;
    rep.matrix = -0.25 * (l + l.transpose());
    for (std::size_t j = 0; j < n; ++j)
        rep.matrix(static_cast<Index>(j), static_cast<Index>(j)) -=
            2.0 * profile(field.points[j]) / field.jumps(static_cast<Index>(j));
    return rep;
}

IndexNullity bjf_index_nullity(const CurvatureProfile& profile, const BouncingField& field, bool cross_validate) {
    HessianReport h = hn_hessian(profile, field);
    if (h.asymmetry > 1e-6) throw SolverError("bjf_index_nullity: Hessian asymmetry above 1e-6; refusing to classify");
    IndexNullity out;
    out.asymmetry = h.asymmetry;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.matrix, Eigen::EigenvaluesOnly);
    out.eigenvalues = es.eigenvalues();
    const double norm = h.matrix.cwiseAbs().rowwise().sum().maxCoeff();
    const double tol = kDefaultZeroBand * norm;
    for (Index i = 0; i < out.eigenvalues.size(); ++i) {
        if (out.eigenvalues(i) < -tol) ++out.index;
        else if (out.eigenvalues(i) <= tol) ++out.nullity;
    }
    if (cross_validate) out.q_form = q_form_inertia(profile, field);
    return out;
}

Inertia q_form_inertia(const CurvatureProfile& profile, const BouncingField& field, Index nodes,
                       double zero_tolerance) {
    const auto n = static_cast<std::size_t>(field.n());
    const Index m = nodes;
    if (m < 4) throw DomainError("q_form_inertia: need at least 4 intervals per segment");
    const Index nn = static_cast<Index>(n);
    const Index size = nn + nn * (m - 1);
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd weight = Eigen::VectorXd::Zero(size);
    for (std::size_t j = 0; j < n; ++j) {
        const double a = field.points[j];
        const double b = (j + 1 < n) ? field.points[j + 1] : field.points[0] + profile.length();
        const double h = (b - a) / static_cast<double>(m);
        const Index base = nn + static_cast<Index>(j) * (m - 1);
        // node i of the segment -> (unknown, coefficient)
        auto var = [&](Index i) -> std::pair<Index, double> {
            if (i == 0) return {static_cast<Index>(j), 1.0};
            if (i == m) return {static_cast<Index>(next_index(j, n)), -1.0};
            return {base + i - 1, 1.0};
        };
        for (Index i = 0; i < m; ++i) {
            auto [u, cu] = var(i);
            auto [v, cv] = var(i + 1);
            const double c = 1.0 / h;
            trip.emplace_back(u, u, c);
            trip.emplace_back(v, v, c);
            trip.emplace_back(u, v, -c * cu * cv);
            trip.emplace_back(v, u, -c * cu * cv);
        }
        for (Index i = 0; i <= m; ++i) {
            auto [u, cu] = var(i);
            const double w = (i == 0 || i == m) ? 0.5 * h : h;
            const double x = a + h * static_cast<double>(i);
            trip.emplace_back(u, u, -w * profile(x) * cu * cu);
            weight(u) += w;
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        const auto jj = static_cast<Index>(j);
        // (eta(s_j+) - eta(s_j-))^2 = 4 sigma_j^2
        trip.emplace_back(jj, jj, -4.0 * profile(field.points[j]) / field.jumps(jj));
    }
    Eigen::SparseMatrix<double> q(size, size);
    q.setFromTriplets(trip.begin(), trip.end());
    Eigen::VectorXd dinv = weight.cwiseSqrt().cwiseInverse();
    Eigen::SparseMatrix<double> scaled = dinv.asDiagonal() * q * dinv.asDiagonal();
    double norm = 0.0;
    for (Index c = 0; c < scaled.outerSize(); ++c) {
        double col = 0.0;
        for (Eigen::SparseMatrix<double>::InnerIterator it(scaled, c); it; ++it) col += std::abs(it.value());
        norm = std::max(norm, col);
    }
    return inertia(scaled, 0.0, zero_tolerance / norm);
}

double BouncingField::phi(const CurvatureProfile& profile, double s) const {
    const double x = points.front() + profile.wrap(s - points.front());
    std::size_t j = 0;
    while (j + 1 < points.size() && points[j + 1] <= x) ++j;
    return segments[j].value_at(profile, x);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> BouncingField::sample(const CurvatureProfile& profile,
                                                                  Index count) const {
    Eigen::VectorXd s(count);
    Eigen::VectorXd v(count);
    for (Index i = 0; i < count; ++i) {
        s(i) = length * static_cast<double>(i) / static_cast<double>(count);
        v(i) = phi(profile, s(i));
    }
    return {s, v};
}

BouncingField make_field(const CurvatureProfile& profile, const std::vector<double>& points) {
    HnEvaluation eval = evaluate_hn(profile, points);
    if (!eval.finite()) throw SolverError("make_field: H_n is -infinity at these points");
    const auto n = points.size();
    BouncingField f;
    f.length = profile.length();
    f.points = points;
    f.hn_value = eval.value;
    f.slope_plus.resize(static_cast<Index>(n));
    f.slope_minus.resize(static_cast<Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
        f.segments.push_back(eval.segments[j].minimizer);
        f.slope_plus(static_cast<Index>(j)) = eval.segments[j].minimizer.slope_a;
        f.slope_minus(static_cast<Index>(j)) = eval.segments[prev_index(j, n)].minimizer.slope_b;
    }
    f.jumps = f.slope_plus - f.slope_minus;
    f.reflection_error = (f.slope_plus + f.slope_minus).cwiseAbs().maxCoeff();
    f.gradient_norm = hn_gradient(eval).norm();
    return f;
}

BouncingField find_bjf(const CurvatureProfile& profile, int n, const std::vector<double>& seed,
                       const FindOptions& opts) {
    if (n < 1) throw DomainError("find_bjf: n must be >= 1");
    const double len = profile.length();
    std::vector<double> pts;
    if (seed.empty()) {
        for (int j = 0; j < n; ++j) pts.push_back(len * j / n);
    } else {
        if (static_cast<int>(seed.size()) != n) throw DomainError("find_bjf: seed size differs from n");
        pts = seed;
        for (double& p : pts) p = profile.wrap(p);
        std::sort(pts.begin(), pts.end());
    }
    check_points(profile, pts);
    const auto nn = static_cast<std::size_t>(n);
    const bool constant = profile.is_constant();

    // gap coordinates: q = (s_1, x_1..x_{n-1}), gaps = L softmax(x_1..x_{n-1}, 0)
    auto to_points = [&](const Eigen::VectorXd& q) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
        x.head(n - 1) = q.tail(n - 1);
        Eigen::VectorXd w = (x.array() - x.maxCoeff()).exp();
        w /= w.sum();
        std::vector<double> p(nn);
        double s = q(0);
        for (std::size_t j = 0; j < nn; ++j) {
            p[j] = s;
            s += len * w(static_cast<Index>(j));
        }
        return std::pair{p, w};
    };
    Eigen::VectorXd q(n);
    q(0) = pts[0];
    for (int j = 0; j + 1 < n; ++j) {
        double gj = pts[static_cast<std::size_t>(j) + 1] - pts[static_cast<std::size_t>(j)];
        double gn = pts[0] + len - pts.back();
        q(j + 1) = std::log(gj / gn);
    }

    auto collapse = [&](const std::vector<double>& p) {
        if (min_gap(p, len) < opts.collapse_fraction * len)
            throw SolverError("collapse: no interior maximum found from this seed");
    };

    HnEvaluation eval = evaluate_hn(profile, to_points(q).first);
    if (!eval.finite()) throw SolverError("collapse: orbit escapes; H_n is -infinity from this seed");
    double step = 1e-2;
    for (int it = 0; it < opts.ascent_iterations; ++it) {
        auto [p, w] = to_points(q);
        Eigen::VectorXd g = hn_gradient(eval);
        if (g.norm() < 1e-6) break;
        Eigen::VectorXd gq(n);
        gq(0) = g.sum();
        for (int k = 0; k + 1 < n; ++k) {
            double acc = 0.0;
            const double gk = len * w(k);
            for (int j = 0; j < n; ++j) {
                const double rel = p[static_cast<std::size_t>(j)] - p[0];
                acc += g(j) * ((k < j ? gk : 0.0) - w(k) * rel);
            }
            gq(k + 1) = acc;
        }
        const double slope = gq.squaredNorm();
        bool moved = false;
        for (int bt = 0; bt < 60; ++bt) {
            Eigen::VectorXd trial = q + step * gq;
            auto tp = to_points(trial).first;
            HnEvaluation te = evaluate_hn(profile, tp);
            if (te.finite() && te.value >= eval.value + 1e-4 * step * slope) {
                q = trial;
                eval = std::move(te);
                collapse(tp);
                moved = true;
                step *= 2.0;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }

    // Newton on the gradient in plain coordinates
    pts = to_points(q).first;
    collapse(pts);
    eval = evaluate_hn(profile, pts);
    Eigen::VectorXd g = hn_gradient(eval);
    for (int it = 0; it < opts.newton_iterations && g.norm() > opts.gradient_tol; ++it) {
        Eigen::MatrixXd h = hn_hessian_s(profile, eval);
        Eigen::VectorXd delta = Eigen::VectorXd::Zero(n);
        const int off = constant ? 1 : 0;  // gauge s_1 for constant curvature
        if (n - off > 0) {
            Eigen::MatrixXd hf = h.bottomRightCorner(n - off, n - off);
            Eigen::VectorXd gf = g.tail(n - off);
            delta.tail(n - off) = -hf.completeOrthogonalDecomposition().solve(gf);
        }
        bool improved = false;
        double t = 1.0;
        for (int bt = 0; bt < 40; ++bt, t *= 0.5) {
            std::vector<double> trial(nn);
            for (std::size_t j = 0; j < nn; ++j) trial[j] = pts[j] + t * delta(static_cast<Index>(j));
            bool ordered = true;
            for (std::size_t j = 1; j < nn; ++j) ordered = ordered && trial[j] > trial[j - 1];
            if (!ordered || !(trial.back() - trial.front() < len)) continue;
            HnEvaluation te = evaluate_hn(profile, trial);
            if (!te.finite()) continue;
            Eigen::VectorXd tg = hn_gradient(te);
            if (tg.norm() < g.norm()) {
                pts = trial;
                eval = std::move(te);
                g = tg;
                improved = true;
                break;
            }
        }
        if (!improved) break;
        collapse(pts);
    }

    if (constant) {
        const double shift = pts[0];
        for (double& p : pts) p -= shift;
    } else {
        // report in [0, L) with the lowest point first
        for (double& p : pts) p = profile.wrap(p);
        std::sort(pts.begin(), pts.end());
    }
    BouncingField field = make_field(profile, pts);
    if (field.reflection_error > 1e-8)
        throw SolverError("find_bjf: internal error, slope reflection violated at convergence");
    IndexNullity in = bjf_index_nullity(profile, field);
    field.index = in.index;
    field.nullity = in.nullity;
    return field;
}

std::vector<BouncingField> sweep_bjf(const CurvatureProfile& profile, int n, int seeds, std::uint64_t rng_seed,
                                     const FindOptions& opts) {
    std::mt19937_64 rng(rng_seed);
    auto uniform = [&]() { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
    const double len = profile.length();
    std::vector<BouncingField> found;
    auto draw = [&] {
        std::vector<double> gaps(static_cast<std::size_t>(n));
        double total = 0.0;
        for (double& g : gaps) { g = -std::log(uniform()); total += g; }
        std::vector<double> seed(static_cast<std::size_t>(n));
        double s = uniform() * len;
        for (std::size_t j = 0; j < seed.size(); ++j) {
            seed[j] = profile.wrap(s);
            s += len * gaps[j] / total;
        }
        std::sort(seed.begin(), seed.end());
        return seed;
    };
    for (int k = 0; k < seeds; ++k) {
        // starts with a conjugate point inside a gap have H_n = -inf; redraw those
        std::vector<double> seed = draw();
        for (int tries = 0; tries < 1000 && !evaluate_hn(profile, seed).finite(); ++tries) seed = draw();
        try {
            BouncingField f = find_bjf(profile, n, seed, opts);
            bool dup = false;
            for (const auto& e : found) dup = dup || cyclic_distance(e.points, f.points, len) < 1e-4;
            if (!dup) found.push_back(std::move(f));
        } catch (const SolverError&) {
            // seeds that collapse or escape simply contribute nothing
        }
    }
    std::sort(found.begin(), found.end(), [](const BouncingField& a, const BouncingField& b) {
        if (a.hn_value != b.hn_value) return a.hn_value > b.hn_value;
        return a.points < b.points;
    });
    return found;
}

BounceResult bounce_map(const CurvatureProfile& profile, double s, double p) {
    if (!(p > 0.0)) throw DomainError("bounce_map: p must be positive");
    using State6 = Eigen::Matrix<double, 6, 1>;
    auto rhs = [&](double x, const State6& y) {
        const double k = profile(x);
        State6 d;
        d << y(1), -k * y(0), y(3), -k * y(2), y(5), -k * y(4);
        return d;
    };
    State6 y0;
    y0 << 1.0, p, -p, profile(s), 0.0, 1.0;
    OdeOptions opts;
    double hit = std::numeric_limits<double>::quiet_NaN();
    double step_t0 = s;
    State6 step_y0 = y0;
    auto watch = [&](const OdeStep<State6>& st) {
        constexpr int probes = 4;
        double prev_t = st.t0;
        double prev = st.y0(0) - 1.0;
        if (prev_t == s) prev = 1.0;  // leaving Phi = 1 upward
        for (int i = 1; i <= probes; ++i) {
            const double t = st.t0 + st.h * i / probes;
            const double v = ((i == probes) ? st.y1(0) : st.eval(t)(0)) - 1.0;
            if (prev > 0.0 && v <= 0.0) {
                double lo = prev_t, hi = t;
                for (int it = 0; it < 100; ++it) {
                    double mid = 0.5 * (lo + hi);
                    if (st.eval(mid)(0) - 1.0 > 0.0) lo = mid; else hi = mid;
                }
                hit = 0.5 * (lo + hi);
                step_t0 = st.t0;
                step_y0 = st.y0;
                return false;
            }
            prev_t = t;
            prev = v;
        }
        return true;
    };
    integrate<State6>(rhs, s, y0, s + profile.length(), opts, watch);
    if (std::isnan(hit)) throw SolverError("bounce_map: orbit escapes (no return within one period)");
    State6 y = integrate<State6>(rhs, step_t0, step_y0, hit, opts);
    for (int it = 0; it < 3; ++it) {
        const double corr = (y(0) - 1.0) / y(1);
        if (std::abs(corr) < 1e-16 * std::max(1.0, std::abs(hit))) break;
        hit -= corr;
        y = integrate<State6>(rhs, step_t0, step_y0, hit, opts);
    }
    BounceResult out;
    out.s_next = hit;
    out.p_next = -y(1);
    const double k = profile(hit);
    const double ds_ds = -y(2) / y(1);
    const double ds_dp = -y(4) / y(1);
    out.jacobian << ds_ds, ds_dp, -y(3) + k * ds_ds, -y(5) + k * ds_dp;
    return out;
}

BounceCycle refine_bounce_cycle(const CurvatureProfile& profile, std::vector<double> points,
                                std::vector<double> slopes) {
    const std::size_t n = points.size();
    if (n == 0 || slopes.size() != n) throw DomainError("refine_bounce_cycle: size mismatch");
    const auto m = static_cast<Index>(2 * n);
    auto residual = [&](const std::vector<double>& s, const std::vector<double>& p, Eigen::MatrixXd* jac) {
        Eigen::VectorXd r(m);
        if (jac) jac->setZero(m, m);
        for (std::size_t j = 0; j < n; ++j) {
            BounceResult b = bounce_map(profile, s[j], p[j]);
            const std::size_t nx = (j + 1) % n;
            const double target = s[nx] + (j + 1 == n ? profile.length() : 0.0);
            const auto rj = static_cast<Index>(2 * j);
            r(rj) = b.s_next - target;
            r(rj + 1) = b.p_next - p[nx];
            if (jac) {
                jac->block(rj, static_cast<Index>(2 * j), 2, 2) += b.jacobian;
                jac->block(rj, static_cast<Index>(2 * nx), 2, 2) -= Eigen::Matrix2d::Identity();
            }
        }
        return r;
    };
    Eigen::MatrixXd jac;
    Eigen::VectorXd r = residual(points, slopes, &jac);
    BounceCycle out;
    for (std::size_t j = 0; j < n; ++j)
        out.max_slope_mismatch = std::max(out.max_slope_mismatch, std::abs(r(static_cast<Index>(2 * j + 1))));
    for (int it = 0; it < 30 && r.norm() > 1e-12; ++it) {
        Eigen::VectorXd d = -jac.completeOrthogonalDecomposition().solve(r);
        std::vector<double> s2 = points, p2 = slopes;
        for (std::size_t j = 0; j < n; ++j) {
            s2[j] += d(static_cast<Index>(2 * j));
            p2[j] += d(static_cast<Index>(2 * j + 1));
        }
        Eigen::MatrixXd jac2;
        Eigen::VectorXd r2 = residual(s2, p2, &jac2);
        if (!(r2.norm() < r.norm())) break;
        points = s2;
        slopes = p2;
        r = r2;
        jac = jac2;
    }
    out.points = points;
    out.slopes = slopes;
    out.residual = r.norm();
    return out;
}

SuperadditivityAudit superadditivity_audit(const CurvatureProfile& profile, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const double length = profile.length();
    std::uniform_real_distribution<double> start(0.0, length);
    std::uniform_real_distribution<double> gap(0.02 * length, 0.5 * length);
    SuperadditivityAudit audit;
    for (int attempt = 0; audit.tested < count && attempt < 100 * count; ++attempt) {
        const double s = start(rng);
        const double m = s + gap(rng);
        const double t = m + gap(rng);
        const double hsm = segment_energy(profile, s, m).h;
        const double hmt = segment_energy(profile, m, t).h;
        const double hst = segment_energy(profile, s, t).h;
        if (!std::isfinite(hsm) || !std::isfinite(hmt) || !std::isfinite(hst)) continue;
        ++audit.tested;
        const double margin = hsm + hmt - hst;
        audit.min_margin = std::min(audit.min_margin, margin);
        if (!(margin > 0.0)) ++audit.violations;
    }
    return audit;
}

}  // namespace bjlab
