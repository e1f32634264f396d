#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace bjlab {

using Index = Eigen::Index;

/// Input outside the domain an operation is defined on.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// A numerical procedure failed to reach its target (divergence, stagnation, breakdown).
class SolverError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Inertia {
    Index neg = 0;
    Index zero = 0;
    Index pos = 0;

    Index size() const { return neg + zero + pos; }
    friend bool operator==(const Inertia&, const Inertia&) = default;
};

/// Symmetric band matrix with an optional wrap-around corner block.
///
/// Only the lower band is stored: `band(d, j) = A(j + d, j)` for `0 <= d <= p`.
/// With `periodic` set, entries coupling index `i` to `j` with `|i - j| > p` are
/// legal when they wrap around the end (distance `n - |i - j| <= p`); they live
/// in a dense `p x p` corner holding `A(n - p + r, c)`.
template <typename Scalar>
class BandedSymmetricMatrix {
  public:
    using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    BandedSymmetricMatrix(Index size, Index half_bandwidth, bool periodic = false)
        : n_(size), p_(half_bandwidth), periodic_(periodic),
          band_(Dense::Zero(half_bandwidth + 1, size)),
          corner_(Dense::Zero(periodic ? half_bandwidth : 0, periodic ? half_bandwidth : 0)) {
        if (size <= 0 || half_bandwidth < 0)
            throw DomainError("BandedSymmetricMatrix: bad dimensions");
        if (periodic && size <= 2 * half_bandwidth + 1)
            throw DomainError("BandedSymmetricMatrix: periodic size must exceed 2p+1");
    }

    Index size() const { return n_; }
    Index half_bandwidth() const { return p_; }
    bool periodic() const { return periodic_; }
    const Dense& bands() const { return band_; }
    const Dense& corner() const { return corner_; }

    /// Adds `value` to A(i, j) and, off the diagonal, to A(j, i). Indices wrap when periodic.
    void add(Index i, Index j, Scalar value) { ref(i, j) += value; }
    void set(Index i, Index j, Scalar value) { ref(i, j) = value; }

    Scalar operator()(Index i, Index j) const {
        return const_cast<BandedSymmetricMatrix*>(this)->ref_or_null(i, j);
    }

    void add_diagonal(const Vector& d) { band_.row(0) += d.transpose(); }
    void add_identity(Scalar s) { band_.row(0).array() += s; }

    bool has_corner() const { return periodic_ && p_ > 0 && corner_.cwiseAbs().maxCoeff() != Scalar(0); }

    Vector apply(const Vector& x) const {
        Vector y = band_.row(0).transpose().cwiseProduct(x);
        for (Index d = 1; d <= p_; ++d)
            for (Index j = 0; j + d < n_; ++j) {
                y(j + d) += band_(d, j) * x(j);
                y(j) += band_(d, j) * x(j + d);
            }
        if (periodic_)
            for (Index r = 0; r < p_; ++r)
                for (Index c = 0; c < p_; ++c) {
                    Index i = n_ - p_ + r;
                    if (i - c <= p_) continue;
                    y(i) += corner_(r, c) * x(c);
                    y(c) += corner_(r, c) * x(i);
                }
        return y;
    }

    Dense dense() const {
        Dense a = Dense::Zero(n_, n_);
        for (Index d = 0; d <= p_; ++d)
            for (Index j = 0; j + d < n_; ++j) {
                a(j + d, j) = band_(d, j);
                a(j, j + d) = band_(d, j);
            }
        if (periodic_)
            for (Index r = 0; r < p_; ++r)
                for (Index c = 0; c < p_; ++c) {
                    Index i = n_ - p_ + r;
                    if (i - c <= p_) continue;
                    a(i, c) = corner_(r, c);
                    a(c, i) = corner_(r, c);
                }
        return a;
    }

    Eigen::SparseMatrix<Scalar> sparse() const {
        std::vector<Eigen::Triplet<Scalar>> trip;
        trip.reserve(static_cast<std::size_t>(n_ * (2 * p_ + 1)));
        for (Index d = 0; d <= p_; ++d)
            for (Index j = 0; j + d < n_; ++j) {
                Scalar v = band_(d, j);
                if (v == Scalar(0) && d > 0) continue;
                trip.emplace_back(j + d, j, v);
                if (d > 0) trip.emplace_back(j, j + d, v);
            }
        if (periodic_)
            for (Index r = 0; r < p_; ++r)
                for (Index c = 0; c < p_; ++c) {
                    Index i = n_ - p_ + r;
                    if (i - c <= p_ || corner_(r, c) == Scalar(0)) continue;
                    trip.emplace_back(i, c, corner_(r, c));
                    trip.emplace_back(c, i, corner_(r, c));
                }
        Eigen::SparseMatrix<Scalar> s(n_, n_);
        s.setFromTriplets(trip.begin(), trip.end());
        return s;
    }

    /// Max absolute row sum.
    Scalar norm_inf() const {
        Vector ones = Vector::Ones(n_);
        BandedSymmetricMatrix abs_copy = *this;
        abs_copy.band_ = band_.cwiseAbs();
        abs_copy.corner_ = corner_.cwiseAbs();
        return abs_copy.apply(ones).maxCoeff();
    }

    /// Gershgorin enclosure of the spectrum.
    std::pair<Scalar, Scalar> gershgorin() const {
        Vector ones = Vector::Ones(n_);
        BandedSymmetricMatrix off = *this;
        off.band_ = band_.cwiseAbs();
        off.band_.row(0).setZero();
        off.corner_ = corner_.cwiseAbs();
        Vector radius = off.apply(ones);
        Vector diag = band_.row(0).transpose();
        return {(diag - radius).minCoeff(), (diag + radius).maxCoeff()};
    }

  private:
    Scalar& ref(Index i, Index j) {
        Scalar* r = locate(i, j);
        if (r == nullptr) throw DomainError("BandedSymmetricMatrix: entry outside band");
        return *r;
    }

    Scalar ref_or_null(Index i, Index j) {
        Scalar* r = locate(i, j);
        return r ? *r : Scalar(0);
    }

    Scalar* locate(Index i, Index j) {
        if (periodic_) {
            i = ((i % n_) + n_) % n_;
            j = ((j % n_) + n_) % n_;
        } else if (i < 0 || j < 0 || i >= n_ || j >= n_) {
            return nullptr;
        }
        if (i < j) std::swap(i, j);
        Index d = i - j;
        if (d <= p_) return &band_(d, j);
        if (periodic_ && n_ - d <= p_) {
            // wrapped: i is near the end, j near the start
            Index r = i - (n_ - p_);
            if (r < 0 || j >= p_) return nullptr;
            return &corner_(r, j);
        }
        return nullptr;
    }

    Index n_;
    Index p_;
    bool periodic_;
    Dense band_;
    Dense corner_;
};

using BandedMatrix = BandedSymmetricMatrix<double>;

/// Relative width of the band of eigenvalues treated as zero: |lambda| <= rel * ||A||_inf.
inline constexpr double kDefaultZeroBand = 1e-6;

/// Number of eigenvalues of `a` strictly below `shift` via banded LDL^T with the
/// wrap-around columns moved into a dense border (Haynsworth inertia additivity).
/// Throws SolverError when a pivot lands within 1e-12 * scale of zero.
Index count_below(const BandedMatrix& a, double shift);

/// Sylvester inertia of (A - shift I); "zero" collects eigenvalues within
/// `zero_band * ||A||_inf` of the shift.
Inertia inertia(const BandedMatrix& a, double shift, double zero_band = kDefaultZeroBand);

/// Eigenvalues strictly below `shift` for a general sparse symmetric matrix, from the
/// pivots of a fill-reducing sparse LDL^T of (A - shift I).
Index count_below(const Eigen::SparseMatrix<double>& a, double shift);
Inertia inertia(const Eigen::SparseMatrix<double>& a, double shift, double zero_band = kDefaultZeroBand);

struct Eigenpair {
    double value = 0.0;
    Eigen::VectorXd vector;
    double residual = 0.0;
};

struct SpectrumReport {
    Index neg_count = 0;
    Index zero_count = 0;
    Index pos_count = 0;
    std::vector<Eigenpair> smallest;
    /// smallest |lambda| over the returned pairs divided by the caller's scale
    double gap = std::numeric_limits<double>::quiet_NaN();
    double lambda_max_estimate = 0.0;
    double zero_tolerance = 0.0;
};

struct EigenOptions {
    double zero_band = kDefaultZeroBand;
    Index block_size = 0;  // 0: choose max(2, k)
    Index max_basis = 600;
    double residual_tol = 1e-8;
    std::uint64_t seed = 0;
};

/// The k eigenpairs of `a` closest to `sigma`, by block shift-invert Lanczos with full
/// reorthogonalization. Eigenvalues are Rayleigh quotients against `a` itself.
/// Throws SolverError with the Ritz residuals if the basis budget runs out.
std::vector<Eigenpair> eigenpairs_near(const Eigen::SparseMatrix<double>& a, double sigma, Index k,
                                       const EigenOptions& opts = {});

/// The k algebraically smallest eigenpairs; the shift is placed just under the spectrum by
/// inertia bisection. Counts come from the exact inertia at 0 and are checked against the
/// returned values.
SpectrumReport smallest_eigenpairs(const Eigen::SparseMatrix<double>& a, Index k,
                                   const EigenOptions& opts = {});
SpectrumReport smallest_eigenpairs(const BandedMatrix& a, Index k, const EigenOptions& opts = {});

/// alpha with alpha * exp(alpha) = 1 / epsilon, 0 < epsilon < 1.
template <typename Scalar>
Scalar lambert_alpha(Scalar epsilon) {
    using std::abs;
    using std::exp;
    using std::log;
    if (!(epsilon > Scalar(0)) || !(epsilon < Scalar(1)))
        throw DomainError("lambert_alpha: epsilon must lie in (0, 1)");
    // g(a) = a + ln a - ln(1/eps) is increasing and concave
    const Scalar target = -log(epsilon);
    // Newton from either side lands left of the root, then climbs monotonically
    Scalar lo = Scalar(0);
    Scalar hi = std::max(Scalar(1), target);
    Scalar a = target > Scalar(1) ? target - log(target) : Scalar(0.5);
    if (a <= lo || a >= hi) a = Scalar(0.5) * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        Scalar g = a + log(a) - target;
        if (g > 0) hi = a; else lo = a;
        Scalar step = g / (Scalar(1) + Scalar(1) / a);
        Scalar next = a - step;
        if (!(next > lo && next < hi)) next = Scalar(0.5) * (lo + hi);
        if (abs(next - a) <= std::numeric_limits<Scalar>::epsilon() * abs(next)) {
            a = next;
            break;
        }
        a = next;
    }
    return a;
}

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = false;
    int intervals = 0;
};

struct QuadratureOptions {
    int max_intervals = 4000;
    /// known exponential decay rate of the integrand envelope (used for infinite limits)
    double decay_rate = std::sqrt(2.0);
    /// amplitude bound A for the envelope A * exp(-rate |x|)
    double envelope = 128.0;
};

/// Adaptive 15-point Gauss-Kronrod on an absolute tolerance. An infinite limit is cut at
/// the X where the envelope tail A exp(-rate X) / rate drops below tol / 16; the tail
/// bound is added to the reported error.
QuadratureResult adaptive_quadrature(const std::function<double(double)>& f, double a, double b,
                                     double tol, const QuadratureOptions& opts = {});

/// Truncation point used for infinite limits (exposed for tests).
double quadrature_cutoff(double tol, const QuadratureOptions& opts = {});

/// Second-order periodic stencil of -d^2/ds^2 + potential on a uniform grid of spacing h.
BandedMatrix periodic_schrodinger(const Eigen::VectorXd& potential, double h);

/// Second-order Dirichlet stencil of -d^2/dx^2 + potential on interior nodes.
BandedMatrix dirichlet_schrodinger(const Eigen::VectorXd& potential, double h);

}  // namespace bjlab
