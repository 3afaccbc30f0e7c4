#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <ostream>
#include <utility>
#include <vector>

#include "exitlab/error.hpp"
#include "exitlab/format.hpp"
#include "exitlab/point.hpp"
#include "exitlab/potentials.hpp"

namespace exitlab {

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Anything that can enumerate (point, probability weight) atoms and report
/// its mean. Implemented by EmpiricalMeasure, GridDensity and AtomList.
template <class M, std::size_t Dim>
concept AtomicMeasure = requires(const M& m, void (*visit)(const Point<Dim>&, double)) {
    m.for_each_atom(visit);
    { m.mean() } -> std::convertible_to<Point<Dim>>;
};

/// A finite weighted point set; weights are normalized on construction.
template <std::size_t Dim>
class AtomList {
public:
    AtomList() = default;
    AtomList(std::vector<Point<Dim>> points, std::vector<double> weights)
        : points_(std::move(points)), weights_(std::move(weights)) {
        if (points_.size() != weights_.size()) throw InvalidParameter("atom list: points and weights differ in size");
        if (points_.empty()) throw EmptyMeasure();
        double total = 0.0;
        for (double w : weights_) {
            if (!(w >= 0.0)) throw InvalidParameter("atom list: negative weight");
            total += w;
        }
        if (!(total > 0.0)) throw EmptyMeasure();
        for (double& w : weights_) w /= total;
    }

    static AtomList dirac(const Point<Dim>& at) { return AtomList({at}, {1.0}); }

    static AtomList uniform(std::vector<Point<Dim>> points) {
        std::vector<double> w(points.size(), 1.0);
        return AtomList(std::move(points), std::move(w));
    }

    template <class Fn>
    void for_each_atom(Fn&& fn) const {
        for (std::size_t i = 0; i < points_.size(); ++i) fn(points_[i], weights_[i]);
    }

    Point<Dim> mean() const {
        Point<Dim> m = zero_point<Dim>();
        for_each_atom([&](const Point<Dim>& p, double w) { m += w * p; });
        return m;
    }

    std::size_t size() const noexcept { return points_.size(); }
    const std::vector<Point<Dim>>& points() const noexcept { return points_; }
    const std::vector<double>& weights() const noexcept { return weights_; }

private:
    std::vector<Point<Dim>> points_;
    std::vector<double> weights_;
};

/// Streaming occupation measure mu_t = (1/t) int_0^t delta_{X_s} ds.
///
/// Two parts are kept separately:
///  * exact time integrals of X and of |X - reference|^(2j), j = 1..moment_order,
///    which never depend on the thinning;
///  * a bounded reservoir of at most `capacity` atoms. Every stride-th sample
///    opens a new atom and the samples in between extend the last atom's
///    duration. When the reservoir overflows, adjacent atoms are merged
///    pairwise (position of the earlier atom, summed duration) and the stride
///    doubles, so every atom but the last spans the same amount of time.
template <std::size_t Dim>
class EmpiricalMeasure {
public:
    using Pt = Point<Dim>;

    static constexpr std::size_t kDefaultCapacity = 4096;

    explicit EmpiricalMeasure(std::size_t capacity = kDefaultCapacity, const Pt& reference = zero_point<Dim>(),
                              int moment_order = 2)
        : capacity_(capacity), reference_(reference), raw_moments_(static_cast<std::size_t>(moment_order)) {
        if (capacity_ < 2) throw InvalidParameter("reservoir capacity must be at least 2");
        if (moment_order < 1) throw InvalidParameter("moment order must be at least 1");
        points_.reserve(capacity_ + 1);
        durations_.reserve(capacity_ + 1);
    }

    /// Adds the path segment X_s = x for s in [t, t + dt).
    void update(const Pt& x, double dt) {
        if (!(dt > 0.0)) throw InvalidParameter("occupation update needs dt > 0");
        if (!is_finite(x)) throw NumericalBlowup("non-finite point entering occupation measure", updates_);

        elapsed_.add(dt);
        for (std::size_t i = 0; i < Dim; ++i) position_integral_[i].add(x[i] * dt);
        const double r2 = squared_norm(x - reference_);
        double power = r2;
        for (auto& m : raw_moments_) {
            m.add(power * dt);
            power *= r2;
        }

        if (updates_ % stride_ == 0) {
            points_.push_back(x);
            durations_.push_back(dt);
            if (points_.size() > capacity_) compact();
        } else {
            durations_.back() += dt;
        }
        duration_total_.add(dt);
        ++updates_;
    }

    double elapsed_time() const noexcept { return elapsed_.value(); }
    bool empty() const noexcept { return updates_ == 0; }
    std::int64_t update_count() const noexcept { return updates_; }
    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t size() const noexcept { return points_.size(); }
    std::int64_t stride() const noexcept { return stride_; }
    const Pt& reference() const noexcept { return reference_; }
    int moment_order() const noexcept { return static_cast<int>(raw_moments_.size()); }

    /// Exact time average of the path.
    Pt mean() const {
        if (empty()) throw EmptyMeasure();
        Pt m{};
        const double t = elapsed_time();
        for (std::size_t i = 0; i < Dim; ++i) m[i] = position_integral_[i].value() / t;
        return m;
    }

    /// Exact time average of |X_s - reference|^(2j).
    double raw_moment(int j) const {
        if (empty()) throw EmptyMeasure();
        if (j < 1 || j > moment_order()) throw InvalidParameter("raw moment order out of range");
        return raw_moments_[static_cast<std::size_t>(j - 1)].value() / elapsed_time();
    }

    double weight(std::size_t i) const { return durations_[i] / duration_total_.value(); }

    template <class Fn>
    void for_each_atom(Fn&& fn) const {
        if (empty()) throw EmptyMeasure();
        const double inv = 1.0 / duration_total_.value();
        for (std::size_t i = 0; i < points_.size(); ++i) fn(points_[i], durations_[i] * inv);
    }

    const std::vector<Pt>& points() const noexcept { return points_; }

private:
    void compact() {
        std::size_t out = 0;
        for (std::size_t i = 0; i < points_.size(); i += 2, ++out) {
            points_[out] = points_[i];
            durations_[out] = durations_[i] + (i + 1 < points_.size() ? durations_[i + 1] : 0.0);
        }
        points_.resize(out);
        durations_.resize(out);
        stride_ *= 2;
    }

    std::size_t capacity_;
    Pt reference_;
    CompensatedSum elapsed_;
    CompensatedSum duration_total_;
    std::array<CompensatedSum, Dim> position_integral_{};
    std::vector<CompensatedSum> raw_moments_;
    std::vector<Pt> points_;
    std::vector<double> durations_;
    std::int64_t stride_ = 1;
    std::int64_t updates_ = 0;
};

/// Density on a uniform grid of cells; values are per unit volume.
template <std::size_t Dim>
struct GridDensity {
    using Pt = Point<Dim>;

    Pt origin{};  // lower corner of the first cell
    double spacing = 0.0;
    std::array<std::size_t, Dim> counts{};
    std::vector<double> values;

    static GridDensity zeros(const Pt& lower, const Pt& upper, double h) {
        if (!(h > 0.0)) throw InvalidParameter("grid spacing must be positive");
        GridDensity g;
        g.origin = lower;
        g.spacing = h;
        std::size_t total = 1;
        for (std::size_t i = 0; i < Dim; ++i) {
            if (!(upper[i] > lower[i])) throw InvalidParameter("grid upper bound must exceed lower bound");
            g.counts[i] = static_cast<std::size_t>(std::ceil((upper[i] - lower[i]) / h - 1e-9));
            total *= g.counts[i];
        }
        g.values.assign(total, 0.0);
        return g;
    }

    /// Same geometry, new values.
    GridDensity with_values(std::vector<double> v) const {
        GridDensity g = *this;
        g.values = std::move(v);
        return g;
    }

    std::size_t size() const noexcept { return values.size(); }
    double cell_volume() const noexcept { return std::pow(spacing, static_cast<double>(Dim)); }

    std::array<std::size_t, Dim> index(std::size_t flat) const {
        std::array<std::size_t, Dim> idx{};
        for (std::size_t k = Dim; k-- > 0;) {
            idx[k] = flat % counts[k];
            flat /= counts[k];
        }
        return idx;
    }

    Pt center(std::size_t flat) const {
        const auto idx = index(flat);
        Pt c{};
        for (std::size_t k = 0; k < Dim; ++k) c[k] = origin[k] + (static_cast<double>(idx[k]) + 0.5) * spacing;
        return c;
    }

    Pt upper() const {
        Pt u{};
        for (std::size_t k = 0; k < Dim; ++k) u[k] = origin[k] + static_cast<double>(counts[k]) * spacing;
        return u;
    }

    bool on_edge(std::size_t flat) const {
        const auto idx = index(flat);
        for (std::size_t k = 0; k < Dim; ++k)
            if (idx[k] == 0 || idx[k] + 1 == counts[k]) return true;
        return false;
    }

    double total_mass() const {
        CompensatedSum s;
        for (double v : values) s.add(v);
        return s.value() * cell_volume();
    }

    void normalize() {
        const double m = total_mass();
        if (!(m > 0.0) || !std::isfinite(m)) throw SolverFailure("grid density has no finite positive mass");
        for (double& v : values) v /= m;
    }

    template <class Fn>
    void for_each_atom(Fn&& fn) const {
        const double vol = cell_volume();
        for (std::size_t i = 0; i < values.size(); ++i)
            if (values[i] != 0.0) fn(center(i), values[i] * vol);
    }

    Pt mean() const {
        Pt m = zero_point<Dim>();
        for_each_atom([&](const Pt& p, double w) { m += w * p; });
        return m;
    }

    /// Central second moment tensor trace, sum_i w_i |p_i - mean|^2.
    double variance() const {
        const Pt mu = mean();
        double v = 0.0;
        for_each_atom([&](const Pt& p, double w) { v += w * squared_norm(p - mu); });
        return v;
    }

    /// h^Dim * sum |a - b|.
    double l1_distance(const GridDensity& other) const {
        if (other.values.size() != values.size()) throw InvalidParameter("grid shapes differ");
        CompensatedSum s;
        for (std::size_t i = 0; i < values.size(); ++i) s.add(std::abs(values[i] - other.values[i]));
        return s.value() * cell_volume();
    }
};

/// sum_i w_i grad W(x - p_i). For quadratic W the exact running mean is used:
/// grad W * mu (x) = strength (x - mean - minimizer_W).
template <std::size_t Dim, AtomicMeasure<Dim> M>
Point<Dim> convolved_gradient(const M& measure, const Potential<Dim>& W, const Point<Dim>& x) {
    if (W.is_quadratic()) return W.strength * (x - measure.mean() - W.minimizer);
    Point<Dim> g = zero_point<Dim>();
    measure.for_each_atom([&](const Point<Dim>& p, double w) { g += w * W.gradient(x - p); });
    return g;
}

/// sum_i w_i W(x - p_i).
template <std::size_t Dim, AtomicMeasure<Dim> M>
double convolved_value(const M& measure, const Potential<Dim>& W, const Point<Dim>& x) {
    double v = 0.0;
    measure.for_each_atom([&](const Point<Dim>& p, double w) { v += w * W.evaluate(x - p); });
    return v;
}

template <std::size_t Dim, AtomicMeasure<Dim> M>
Matrix<Dim> convolved_hessian(const M& measure, const Potential<Dim>& W, const Point<Dim>& x) {
    Matrix<Dim> h{};
    if (W.is_quadratic()) {
        for (std::size_t i = 0; i < Dim; ++i) h[i][i] = W.strength;
        return h;
    }
    measure.for_each_atom([&](const Point<Dim>& p, double w) {
        const auto hw = W.hessian(x - p);
        for (std::size_t i = 0; i < Dim; ++i)
            for (std::size_t j = 0; j < Dim; ++j) h[i][j] += w * hw[i][j];
    });
    return h;
}

namespace detail {

template <std::size_t Dim>
Point<Dim> solve_linear(const Matrix<Dim>& a, const Point<Dim>& b) {
    if constexpr (Dim == 1) {
        return {b[0] / a[0][0]};
    } else {
        static_assert(Dim == 2, "solve_linear supports Dim 1 and 2");
        const double det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        return {(a[1][1] * b[0] - a[0][1] * b[1]) / det, (a[0][0] * b[1] - a[1][0] * b[0]) / det};
    }
}

}  // namespace detail

/// Root c of grad V + grad W * mu. Damped Newton on the strictly monotone
/// field, with bisection (1-D) or gradient descent (2-D) if Newton stalls.
template <std::size_t Dim, AtomicMeasure<Dim> M>
Point<Dim> center_of(const M& measure, const Potential<Dim>& V, const Potential<Dim>& W, double tol = 1e-10,
                     int max_iter = 200) {
    using Pt = Point<Dim>;
    auto field = [&](const Pt& c) { return V.gradient(c) + convolved_gradient<Dim>(measure, W, c); };

    Pt c = V.minimizer;
    Pt f = field(c);
    double fn = norm(f);
    int iter = 0;
    for (; iter < max_iter && fn > tol; ++iter) {
        Matrix<Dim> jac = V.hessian(c);
        const Matrix<Dim> hw = convolved_hessian<Dim>(measure, W, c);
        for (std::size_t i = 0; i < Dim; ++i)
            for (std::size_t j = 0; j < Dim; ++j) jac[i][j] += hw[i][j];
        const Pt step = detail::solve_linear<Dim>(jac, f);
        if (!is_finite(step)) break;
        double lambda = 1.0;
        bool improved = false;
        for (int k = 0; k < 40; ++k, lambda *= 0.5) {
            const Pt trial = c - lambda * step;
            const Pt ft = field(trial);
            const double ftn = norm(ft);
            if (ftn < fn) {
                c = trial;
                f = ft;
                fn = ftn;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    if (fn <= tol) return c;

    // Fallbacks share the remaining iteration budget.
    if constexpr (Dim == 1) {
        double lo = c[0] - 1.0, hi = c[0] + 1.0;
        for (int k = 0; k < 60 && field(Pt{lo})[0] > 0.0; ++k) lo -= (hi - lo);
        for (int k = 0; k < 60 && field(Pt{hi})[0] < 0.0; ++k) hi += (hi - lo);
        for (; iter < max_iter; ++iter) {
            const double mid = 0.5 * (lo + hi);
            const double fm = field(Pt{mid})[0];
            if (std::abs(fm) <= tol) return Pt{mid};
            if (fm > 0.0)
                hi = mid;
            else
                lo = mid;
            if (hi - lo <= 0.0) break;
        }
    } else {
        // Descent on V + W*mu; the field is its gradient.
        const double lip = spectral_norm(V.hessian(c)) + spectral_norm(convolved_hessian<Dim>(measure, W, c));
        const double eta = lip > 0.0 ? 1.0 / lip : 1e-3;
        for (; iter < max_iter; ++iter) {
            c = c - eta * f;
            f = field(c);
            if (norm(f) <= tol) return c;
        }
    }
    throw SolverFailure("center_of did not reach |field| <= tol within " + std::to_string(max_iter) + " iterations");
}

/// Piecewise-constant quantile function of a 1-D measure.
class QuantileFunction {
public:
    /// Sorted distinct support with cumulative weights; the last is exactly 1.
    QuantileFunction(std::vector<double> support, std::vector<double> cumulative)
        : support_(std::move(support)), cumulative_(std::move(cumulative)) {}

    template <std::size_t Dim, AtomicMeasure<Dim> M>
    static QuantileFunction from_measure(const M& measure) {
        if constexpr (Dim != 1) {
            (void)measure;
            throw UnsupportedDimension("quantile coupling is defined for 1-D measures only, got dimension " +
                                       std::to_string(Dim));
        } else {
            std::vector<std::pair<double, double>> atoms;
            measure.for_each_atom([&](const Point<1>& p, double w) {
                if (w > 0.0) atoms.emplace_back(p[0], w);
            });
            return from_atoms(std::move(atoms));
        }
    }

    static QuantileFunction from_atoms(std::vector<std::pair<double, double>> atoms) {
        if (atoms.empty()) throw EmptyMeasure();
        std::sort(atoms.begin(), atoms.end());
        std::vector<double> support, mass;
        for (const auto& [x, w] : atoms) {
            if (!support.empty() && support.back() == x)
                mass.back() += w;
            else {
                support.push_back(x);
                mass.push_back(w);
            }
        }
        double total = 0.0;
        for (double w : mass) total += w;
        std::vector<double> cum(mass.size());
        double run = 0.0;
        for (std::size_t i = 0; i < mass.size(); ++i) {
            run += mass[i];
            cum[i] = run / total;
        }
        cum.back() = 1.0;
        return QuantileFunction(std::move(support), std::move(cum));
    }

    /// Right-continuous: smallest support point whose cumulative weight exceeds u.
    double operator()(double u) const {
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                                    support_.size() - 1);
        return support_[i];
    }

    const std::vector<double>& support() const noexcept { return support_; }
    const std::vector<double>& cumulative() const noexcept { return cumulative_; }

private:
    std::vector<double> support_;
    std::vector<double> cumulative_;
};

/// (int_0^1 |Q_a(u) - Q_b(u)|^order du)^(1/order), exact on step functions.
inline double wasserstein_1d(const QuantileFunction& a, const QuantileFunction& b, int order) {
    if (order < 2 || order % 2 != 0) throw InvalidParameter("Wasserstein order must be an even integer >= 2");
    const auto& xa = a.support();
    const auto& xb = b.support();
    const auto& ca = a.cumulative();
    const auto& cb = b.cumulative();
    std::size_t i = 0, j = 0;
    double prev = 0.0;
    CompensatedSum cost;
    while (i < xa.size() && j < xb.size()) {
        const double next = std::min(ca[i], cb[j]);
        cost.add((next - prev) * std::pow(std::abs(xa[i] - xb[j]), order));
        prev = next;
        if (ca[i] == next) ++i;
        if (cb[j] == next) ++j;
    }
    return std::pow(std::max(0.0, cost.value()), 1.0 / order);
}

template <std::size_t Dim, AtomicMeasure<Dim> A, AtomicMeasure<Dim> B>
double wasserstein_1d(const A& a, const B& b, int order) {
    return wasserstein_1d(QuantileFunction::from_measure<Dim>(a), QuantileFunction::from_measure<Dim>(b), order);
}

/// W_order(mu, delta_m) = (int |x - m|^order dmu)^(1/order); exact in any
/// dimension since the only coupling with a point mass is the product one.
template <std::size_t Dim, AtomicMeasure<Dim> M>
double wasserstein_to_dirac(const M& measure, const Point<Dim>& m, int order) {
    if (order < 2 || order % 2 != 0) throw InvalidParameter("Wasserstein order must be an even integer >= 2");
    if constexpr (std::same_as<M, EmpiricalMeasure<Dim>>) {
        if (measure.empty()) throw EmptyMeasure();
        if (measure.reference() == m && order / 2 <= measure.moment_order())
            return std::pow(std::max(0.0, measure.raw_moment(order / 2)), 1.0 / order);
    }
    CompensatedSum s;
    measure.for_each_atom([&](const Point<Dim>& p, double w) { s.add(w * std::pow(squared_norm(p - m), order / 2)); });
    return std::pow(std::max(0.0, s.value()), 1.0 / order);
}

/// Tail masses mu(|y - center| > R_j) and a log-linear fit C e^{-alpha R}.
struct TailProfile {
    std::vector<double> radii;
    std::vector<double> masses;
    double alpha = std::numeric_limits<double>::infinity();
    double C = 0.0;
    bool fitted = false;

    /// Membership test for the class of measures with tails below C e^{-alpha R}
    /// at the measured radii.
    bool within_bound(double a, double c) const {
        for (std::size_t i = 0; i < radii.size(); ++i)
            if (!(masses[i] < c * std::exp(-a * radii[i]))) return false;
        return true;
    }
};

/// Ordinary least squares y = intercept + slope x.
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    std::size_t n = 0;
};

inline LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InsufficientData("linear fit needs at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw InsufficientData("linear fit needs distinct abscissae");
    LinearFit f;
    f.n = x.size();
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (x.size() > 2) {
        double sse = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - f.intercept - f.slope * x[i];
            sse += r * r;
        }
        f.slope_stderr = std::sqrt(sse / (n - 2.0) / sxx);
    }
    return f;
}

namespace detail {

template <std::size_t Dim, AtomicMeasure<Dim> M>
double tail_mass(const M& measure, const Point<Dim>& center, double radius) {
    CompensatedSum s;
    measure.for_each_atom([&](const Point<Dim>& p, double w) {
        if (norm(p - center) > radius) s.add(w);
    });
    return s.value();
}

// 1-D grids: cells are uniform on their extent, so partial cells count by overlap.
inline double tail_mass(const GridDensity<1>& g, const Point<1>& center, double radius) {
    const double left = center[0] - radius, right = center[0] + radius;
    CompensatedSum s;
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        const double a = g.origin[0] + static_cast<double>(i) * g.spacing;
        const double b = a + g.spacing;
        const double outside = std::max(0.0, std::min(b, left) - a) + std::max(0.0, b - std::max(a, right));
        if (outside > 0.0) s.add(g.values[i] * outside);
    }
    return s.value();
}

}  // namespace detail

template <std::size_t Dim, AtomicMeasure<Dim> M>
TailProfile tail_profile(const M& measure, const Point<Dim>& center, const std::vector<double>& radii) {
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0)) throw InvalidParameter("tail radii must be positive");
        if (i > 0 && !(radii[i] > radii[i - 1])) throw InvalidParameter("tail radii must be strictly increasing");
    }
    TailProfile tp;
    tp.radii = radii;
    for (double r : radii) {
        double m = detail::tail_mass(measure, center, r);
        if (!tp.masses.empty()) m = std::min(m, tp.masses.back());
        tp.masses.push_back(m);
    }
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < radii.size(); ++i)
        if (tp.masses[i] > 0.0) {
            xs.push_back(radii[i]);
            ys.push_back(std::log(tp.masses[i]));
        }
    if (xs.size() >= 2) {
        const LinearFit fit = least_squares(xs, ys);
        tp.alpha = -fit.slope;
        tp.C = std::exp(fit.intercept);
        tp.fitted = true;
    }
    return tp;
}

template <std::size_t Dim, AtomicMeasure<Dim> M>
void write_measure_csv(std::ostream& out, const M& measure) {
    for (std::size_t i = 0; i < Dim; ++i) out << "x" << i << ",";
    out << "weight\n";
    measure.for_each_atom([&](const Point<Dim>& p, double w) {
        for (double c : p) put(out, c) << ",";
        put(out, w) << "\n";
    });
}

template <std::size_t Dim>
void write_density_csv(std::ostream& out, const GridDensity<Dim>& g) {
    for (std::size_t i = 0; i < Dim; ++i) out << "x" << i << ",";
    out << "density\n";
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        for (double c : g.center(i)) put(out, c) << ",";
        put(out, g.values[i]) << "\n";
    }
}

}  // namespace exitlab
