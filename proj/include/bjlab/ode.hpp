#pragma once

#include "bjlab/numerics.hpp"

#include <array>

namespace bjlab {

struct OdeOptions {
    double rtol = 1e-13;
    double atol = 1e-14;
    double initial_step = 0.0;  // 0: pick from the local derivative scale
    double max_step = 0.0;      // 0: unbounded
    long max_steps = 2'000'000;
};

/// One accepted Dormand-Prince step, with the 4th-order continuous extension.
template <typename State>
struct OdeStep {
    using Scalar = typename State::Scalar;
    Scalar t0{};
    Scalar h{};
    State y0;
    State y1;
    std::array<State, 7> k;

    Scalar t1() const { return t0 + h; }

    State eval(Scalar t) const {
        // continuous extension coefficients of the 5(4) pair
        static constexpr double P[7][4] = {
            {1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0, -12715105075.0 / 11282082432.0},
            {0.0, 0.0, 0.0, 0.0},
            {0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0, 87487479700.0 / 32700410799.0},
            {0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0, -10690763975.0 / 1880347072.0},
            {0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0, 701980252875.0 / 199316789632.0},
            {0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0, -1453857185.0 / 822651844.0},
            {0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0, 69997945.0 / 29380423.0}};
        const Scalar th = (t - t0) / h;
        const Scalar pw[4] = {th, th * th, th * th * th, th * th * th * th};
        State y = y0;
        for (int s = 0; s < 7; ++s) {
            Scalar c = Scalar(0);
            for (int j = 0; j < 4; ++j) c += Scalar(P[s][j]) * pw[j];
            y += (h * c) * k[static_cast<std::size_t>(s)];
        }
        return y;
    }
};

/// Adaptive Dormand-Prince 5(4) from t0 to t1 (either direction). `observer(step)` sees every
/// accepted step and may return false to stop early; the state at the stop point is returned.
template <typename State, typename Rhs, typename Observer>
State integrate(const Rhs& f, typename State::Scalar t0, State y, typename State::Scalar t1,
                const OdeOptions& opts, Observer&& observer) {
    using Scalar = typename State::Scalar;
    using std::abs;
    using std::max;
    using std::min;
    using std::pow;
    static constexpr double c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
    static constexpr double a[7][6] = {
        {0, 0, 0, 0, 0, 0},
        {1.0 / 5, 0, 0, 0, 0, 0},
        {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
        {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
        {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
    static constexpr double e[7] = {-71.0 / 57600, 0.0, 71.0 / 16695, -71.0 / 1920,
                                    17253.0 / 339200, -22.0 / 525, 1.0 / 40};

    const Scalar span = t1 - t0;
    if (span == Scalar(0)) return y;
    const Scalar dir = span > Scalar(0) ? Scalar(1) : Scalar(-1);

    OdeStep<State> step;
    step.k[0] = f(t0, y);
    Scalar h;
    if (opts.initial_step > 0.0) {
        h = Scalar(opts.initial_step);
    } else {
        const Scalar d0 = y.cwiseAbs().maxCoeff() + Scalar(opts.atol);
        const Scalar d1 = step.k[0].cwiseAbs().maxCoeff() + Scalar(opts.atol);
        h = Scalar(0.01) * d0 / d1 * pow(Scalar(opts.rtol) / Scalar(1e-6), Scalar(0.2));
    }
    h = min(h, abs(span));
    if (opts.max_step > 0.0) h = min(h, Scalar(opts.max_step));
    Scalar t = t0;
    for (long n = 0; n < opts.max_steps; ++n) {
        const Scalar remaining = abs(t1 - t);
        bool last = false;
        if (h >= remaining * Scalar(1 - 1e-12)) {
            h = remaining;
            last = true;
        }
        const Scalar hs = dir * h;
        for (int s = 1; s < 7; ++s) {
            State ys = y;
            for (int j = 0; j < s; ++j)
                if (a[s][j] != 0.0) ys += (hs * Scalar(a[s][j])) * step.k[static_cast<std::size_t>(j)];
            step.k[static_cast<std::size_t>(s)] = f(t + Scalar(c[s]) * hs, ys);
        }
        State ynew = y;
        for (int j = 0; j < 6; ++j)
            if (a[6][j] != 0.0) ynew += (hs * Scalar(a[6][j])) * step.k[static_cast<std::size_t>(j)];
        State err = State::Zero(y.size());
        for (int j = 0; j < 7; ++j) err += (hs * Scalar(e[j])) * step.k[static_cast<std::size_t>(j)];
        Scalar enorm = Scalar(0);
        for (Index i = 0; i < y.size(); ++i) {
            Scalar sc = Scalar(opts.atol) + Scalar(opts.rtol) * max(abs(y(i)), abs(ynew(i)));
            enorm = max(enorm, abs(err(i)) / sc);
        }
        if (!(enorm == enorm)) throw SolverError("integrate: non-finite state");
        if (enorm <= Scalar(1)) {
            step.t0 = t;
            step.h = hs;
            step.y0 = y;
            step.y1 = ynew;
            const Scalar tn = last ? t1 : t + hs;
            const bool go_on = observer(static_cast<const OdeStep<State>&>(step));
            t = tn;
            y = ynew;
            // first-same-as-last
            step.k[0] = step.k[6];
            if (!go_on || last) return y;
            Scalar fac = enorm > Scalar(0) ? Scalar(0.9) * pow(enorm, Scalar(-0.2)) : Scalar(5);
            h *= min(Scalar(5), max(Scalar(0.2), fac));
        } else {
            Scalar fac = Scalar(0.9) * pow(enorm, Scalar(-0.2));
            h *= max(Scalar(0.1), fac);
        }
        if (opts.max_step > 0.0) h = min(h, Scalar(opts.max_step));
        if (h <= abs(t) * Scalar(1e-15) + Scalar(1e-300)) throw SolverError("integrate: step size underflow");
    }
    throw SolverError("integrate: step budget exhausted");
}

template <typename State, typename Rhs>
State integrate(const Rhs& f, typename State::Scalar t0, State y, typename State::Scalar t1,
                const OdeOptions& opts = {}) {
    return integrate(f, t0, std::move(y), t1, opts, [](const OdeStep<State>&) { return true; });
}

}  // namespace bjlab
