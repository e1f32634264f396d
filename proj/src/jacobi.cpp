#include "bjlab/jacobi.hpp"

namespace bjlab {

namespace {

using State2 = Eigen::Vector2d;
using State4 = Eigen::Vector4d;

constexpr double kDegenerateTol = 1e-10;

}  // namespace

JacobiEnd jacobi_ivp(const CurvatureProfile& profile, double s0, double value, double slope, double s1,
                     const OdeOptions& opts) {
    auto rhs = [&](double s, const State2& y) { return State2(y(1), -profile(s) * y(0)); };
    State2 y = integrate<State2>(rhs, s0, State2(value, slope), s1, opts);
    return {y(0), y(1)};
}

FundamentalPair fundamental_pair(const CurvatureProfile& profile, double a, double b, const OdeOptions& opts) {
    auto rhs = [&](double s, const State4& y) {
        const double k = profile(s);
        return State4(y(1), -k * y(0), y(3), -k * y(2));
    };
    FundamentalPair out;
    double first_zero = std::numeric_limits<double>::quiet_NaN();
    auto watch = [&](const OdeStep<State4>& st) {
        // y2 has simple zeros only, so a sign change over the step (or inside it) brackets one
        const double t0 = st.t0;
        const double t1 = st.t1();
        if (t1 >= b) return true;  // a zero at the far end is judged from y2(b)
        constexpr int probes = 4;
        double prev_t = t0;
        double prev = st.y0(2);
        for (int i = 1; i <= probes; ++i) {
            const double t = t0 + (t1 - t0) * i / probes;
            const double v = (i == probes) ? st.y1(2) : st.eval(t)(2);
            if (prev_t > a && prev == 0.0) {
                first_zero = prev_t;
                return false;
            }
            if ((prev > 0.0 && v < 0.0) || (prev < 0.0 && v > 0.0)) {
                double lo = prev_t, hi = t, flo = prev;
                for (int it = 0; it < 80; ++it) {
                    double mid = 0.5 * (lo + hi);
                    double fm = st.eval(mid)(2);
                    if ((fm > 0.0) == (flo > 0.0)) { lo = mid; flo = fm; } else { hi = mid; }
                }
                first_zero = 0.5 * (lo + hi);
                return false;
            }
            prev_t = t;
            prev = v;
        }
        return true;
    };
    State4 y = integrate<State4>(rhs, a, State4(1.0, 0.0, 0.0, 1.0), b, opts, watch);
    if (!std::isnan(first_zero)) {
        out.conjugate_point = first_zero;
        return out;
    }
    out.y1 = y(0);
    out.y1p = y(1);
    out.y2 = y(2);
    out.y2p = y(3);
    if (out.y2 < 0.0) {
        // zero slipped past the probes within the last step
        out.conjugate_point = b;
    }
    return out;
}

SegmentEnergy segment_energy(const CurvatureProfile& profile, double s1, double s2, const OdeOptions& opts) {
    if (!(s1 < s2)) throw DomainError("segment_energy: need s1 < s2");
    SegmentEnergy out;
    SegmentSolution& seg = out.minimizer;
    seg.a = s1;
    seg.b = s2;
    seg.fund = fundamental_pair(profile, s1, s2, opts);
    if (seg.fund.has_conjugate_point()) {
        seg.conjugate = true;
        out.h = -std::numeric_limits<double>::infinity();
        return out;
    }
    // y2 > 0 on (a, b]; near zero at b means a conjugate point at the end
    if (seg.fund.y2 <= kDegenerateTol * std::max(1.0, std::abs(seg.fund.y2p)) * std::min(1.0, s2 - s1)) {
        seg.degenerate = true;
        seg.conjugate = true;
        out.h = -std::numeric_limits<double>::infinity();
        return out;
    }
    const double c = (1.0 - seg.fund.y1) / seg.fund.y2;
    seg.slope_a = c;
    seg.slope_b = seg.fund.y1p + c * seg.fund.y2p;
    out.h = seg.slope_b - seg.slope_a;
    return out;
}

void SegmentSolution::sample(const CurvatureProfile& profile, Index points, Eigen::VectorXd& s,
                             Eigen::VectorXd& phi) const {
    if (points < 2) throw DomainError("SegmentSolution::sample: need at least 2 points");
    s = Eigen::VectorXd::LinSpaced(points, a, b);
    phi.resize(points);
    phi(0) = 1.0;
    auto rhs = [&](double x, const State2& y) { return State2(y(1), -profile(x) * y(0)); };
    State2 y(1.0, slope_a);
    for (Index i = 1; i < points; ++i) {
        y = integrate<State2>(rhs, s(i - 1), y, s(i));
        phi(i) = y(0);
    }
}

double SegmentSolution::value_at(const CurvatureProfile& profile, double s) const {
    if (s == a) return 1.0;
    return jacobi_ivp(profile, a, 1.0, slope_a, s).value;
}

BandedMatrix jacobi_operator(const CurvatureProfile& profile, Index n) {
    const double h = profile.length() / static_cast<double>(n);
    Eigen::VectorXd pot = -profile.sample(n);
    return periodic_schrodinger(pot, h);
}

SpectrumReport geodesic_index(const CurvatureProfile& profile, const GeodesicIndexOptions& opts) {
    auto at = [&](Index n) {
        BandedMatrix a = jacobi_operator(profile, n);
        const double h = profile.length() / static_cast<double>(n);
        const double kmax = std::max(std::abs(profile.sup()), std::abs(profile.inf()));
        // eigenvalues near zero have frequency ~ sqrt(K); the stencil shifts them by ~ w^4 h^2 / 12
        double tol = opts.zero_tolerance > 0.0 ? opts.zero_tolerance
                                               : 4.0 * (1.0 + kmax) * (1.0 + kmax) * h * h / 12.0;
        return std::pair{inertia(a, 0.0, tol / a.norm_inf()), tol};
    };
    const auto [coarse, tol_c] = at(opts.grid);
    const auto [fine, tol_f] = at(2 * opts.grid);
    if (coarse.neg != fine.neg || coarse.zero != fine.zero) throw SolverError("geodesic_index: unresolved spectrum, refine");

    BandedMatrix a = jacobi_operator(profile, opts.grid);
    EigenOptions eo;
    eo.zero_band = tol_c / a.norm_inf();
    Index k = std::min<Index>(std::max<Index>(opts.eigenpairs, coarse.neg + coarse.zero + 1), opts.grid / 4);
    SpectrumReport rep = smallest_eigenpairs(a, k, eo);
    rep.neg_count = coarse.neg;
    rep.zero_count = coarse.zero;
    rep.pos_count = coarse.pos;
    rep.zero_tolerance = tol_c;
    return rep;
}

}  // namespace bjlab
