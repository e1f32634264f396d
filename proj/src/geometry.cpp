#include "bjlab/geometry.hpp"

#include <numbers>

namespace bjlab {

using std::numbers::pi;

PeriodicFunction::PeriodicFunction(double length, double a0, std::vector<double> ak, std::vector<double> bk)
    : length_(length), a0_(a0), ak_(std::move(ak)), bk_(std::move(bk)) {
    if (!(length > 0.0) || !std::isfinite(length)) throw DomainError("profile: length must be positive");
    if (bk_.size() < ak_.size()) bk_.resize(ak_.size(), 0.0);
    if (ak_.size() < bk_.size()) ak_.resize(bk_.size(), 0.0);
    // drop trailing zero modes so is_constant and mode counts are honest
    while (!ak_.empty() && ak_.back() == 0.0 && bk_.back() == 0.0) {
        ak_.pop_back();
        bk_.pop_back();
    }
}

PeriodicFunction PeriodicFunction::from_samples(double length, const Eigen::VectorXd& samples) {
    const Index n = samples.size();
    if (n < 1) throw DomainError("profile: need at least one sample");
    const Index m = n / 2;
    std::vector<double> ak(static_cast<std::size_t>(m), 0.0);
    std::vector<double> bk(static_cast<std::size_t>(m), 0.0);
    const double a0 = samples.mean();
    for (Index k = 1; k <= m; ++k) {
        double c = 0.0;
        double s = 0.0;
        for (Index i = 0; i < n; ++i) {
            double ph = 2.0 * pi * static_cast<double>(k * i % n) / static_cast<double>(n);
            c += samples(i) * std::cos(ph);
            s += samples(i) * std::sin(ph);
        }
        double w = (2 * k == n) ? 1.0 / static_cast<double>(n) : 2.0 / static_cast<double>(n);
        ak[static_cast<std::size_t>(k - 1)] = w * c;
        // the Nyquist sine is invisible on the grid; keep the interpolant real and minimal
        bk[static_cast<std::size_t>(k - 1)] = (2 * k == n) ? 0.0 : w * s;
    }
    return {length, a0, ak, bk};
}

bool PeriodicFunction::is_constant() const { return ak_.empty(); }

double PeriodicFunction::wrap(double s) const {
    double r = std::fmod(s, length_);
    if (r < 0.0) r += length_;
    if (r >= length_) r = 0.0;
    return r;
}

double PeriodicFunction::value(double s) const {
    const double w = 2.0 * pi * wrap(s) / length_;
    double v = a0_;
    for (std::size_t k = 0; k < ak_.size(); ++k) {
        double ph = static_cast<double>(k + 1) * w;
        v += ak_[k] * std::cos(ph) + bk_[k] * std::sin(ph);
    }
    return v;
}

double PeriodicFunction::derivative(double s) const {
    const double w = 2.0 * pi * wrap(s) / length_;
    double v = 0.0;
    for (std::size_t k = 0; k < ak_.size(); ++k) {
        double om = 2.0 * pi * static_cast<double>(k + 1) / length_;
        double ph = static_cast<double>(k + 1) * w;
        v += om * (-ak_[k] * std::sin(ph) + bk_[k] * std::cos(ph));
    }
    return v;
}

double PeriodicFunction::second_derivative(double s) const {
    const double w = 2.0 * pi * wrap(s) / length_;
    double v = 0.0;
    for (std::size_t k = 0; k < ak_.size(); ++k) {
        double om = 2.0 * pi * static_cast<double>(k + 1) / length_;
        double ph = static_cast<double>(k + 1) * w;
        v -= om * om * (ak_[k] * std::cos(ph) + bk_[k] * std::sin(ph));
    }
    return v;
}

Eigen::VectorXd PeriodicFunction::sample(Index n) const {
    Eigen::VectorXd out(n);
    for (Index i = 0; i < n; ++i) out(i) = value(length_ * static_cast<double>(i) / static_cast<double>(n));
    return out;
}

double PeriodicFunction::extremum(bool want_max) const {
    if (is_constant()) return a0_;
    const Index n = std::max<Index>(1024, 64 * static_cast<Index>(ak_.size() + 1));
    const double h = length_ / static_cast<double>(n);
    const double sign = want_max ? 1.0 : -1.0;
    Eigen::VectorXd v = sample(n);
    double best = sign * v(0);
    for (Index i = 0; i < n; ++i) best = std::max(best, sign * v(i));
    // Newton polish on f' around every grid-local extremum
    for (Index i = 0; i < n; ++i) {
        double prev = sign * v((i + n - 1) % n);
        double next = sign * v((i + 1) % n);
        double cur = sign * v(i);
        if (cur < prev || cur < next) continue;
        double s = h * static_cast<double>(i);
        for (int it = 0; it < 30; ++it) {
            double d2 = second_derivative(s);
            if (d2 == 0.0) break;
            double ds = derivative(s) / d2;
            ds = std::clamp(ds, -h, h);
            s -= ds;
            if (std::abs(ds) < 1e-15 * length_) break;
        }
        best = std::max(best, sign * value(s));
    }
    return sign * best;
}

double PeriodicFunction::sup() const { return extremum(true); }
double PeriodicFunction::inf() const { return extremum(false); }

CurvatureProfile constant_profile(double length, double k) { return {length, k, {}, {}}; }

TubeMetric::TubeMetric(CurvatureProfile profile, double half_width) : profile_(std::move(profile)), tau_(half_width) {
    if (!(half_width > 0.0)) throw DomainError("tube: half width must be positive");
    double kmax = std::max(std::abs(profile_.sup()), std::abs(profile_.inf()));
    if (kmax * half_width * half_width > kTubeCurvatureLimit * (1.0 + 1e-12))
        throw DomainError("tube: sup|K| tau^2 exceeds 0.3; narrow the tube");
}

double gauss_curvature_of_tube(const TubeMetric& metric, double s, double t) {
    if (std::abs(t) > metric.half_width()) throw DomainError("gauss_curvature_of_tube: |t| > tau");
    const double k = metric.profile()(s);
    if (t == 0.0) return k;
    return k / (1.0 - 0.5 * k * t * t);
}

double curvature_derivative_under_perturbation(const MetricPerturbation& perturbation, double s) {
    return -perturbation.zdot(s);
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Exists: return "Exists";
        case Verdict::CannotExist: return "CannotExist";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

Verdict existence_precheck(const CurvatureProfile& profile, int n) {
    if (n < 1) throw DomainError("existence_precheck: n must be >= 1");
    const double lhs = pi * pi * static_cast<double>(n) * static_cast<double>(n);
    const double l2 = profile.length() * profile.length();
    const double kmin = profile.inf();
    const double kmax = profile.sup();
    if (kmin > 0.0 && lhs > l2 * kmax) return Verdict::Exists;
    if (lhs < l2 * kmin) return Verdict::CannotExist;
    return Verdict::Inconclusive;
}

}  // namespace bjlab
