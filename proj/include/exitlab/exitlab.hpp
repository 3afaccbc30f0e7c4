#pragma once

// Domains, exit costs, exit-time Monte Carlo, Arrhenius regression,
// stabilization time of the occupation measure, exit-location statistics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "exitlab/dynamics.hpp"
#include "exitlab/error.hpp"
#include "exitlab/measures.hpp"
#include "exitlab/parallel.hpp"
#include "exitlab/point.hpp"
#include "exitlab/potentials.hpp"
#include "exitlab/rng.hpp"

namespace exitlab {

enum class DomainKind { level_set, ball, box, predicate };

namespace detail {

template <std::size_t Dim>
bool same_potential(const Potential<Dim>& a, const Potential<Dim>& b) {
    if (a.kind == PotentialKind::custom || b.kind == PotentialKind::custom) return false;
    return a.kind == b.kind && a.strength == b.strength && a.beta == b.beta && a.minimizer == b.minimizer;
}

template <std::size_t Dim>
Point<Dim> unit_direction(double theta) {
    Point<Dim> v = zero_point<Dim>();
    if constexpr (Dim == 1) {
        v[0] = theta < std::numbers::pi ? 1.0 : -1.0;
    } else {
        v[0] = std::cos(theta);
        v[1] = std::sin(theta);
    }
    return v;
}

}  // namespace detail

/// Open bounded region containing an anchor point (usually m), star-shaped
/// about the anchor. Boundary points are found along rays from the anchor.
template <std::size_t Dim>
class Domain {
public:
    using Pt = Point<Dim>;
    static constexpr double kUnboundedRadius = 1e6;

    /// {x : V(x) + W(x - m) - V(m) < height}.
    static Domain level_set(const Potential<Dim>& V, const Potential<Dim>& W, const Pt& m, double height) {
        if (!(height > 0.0) || !std::isfinite(height)) throw InvalidDomain("level-set height must be positive");
        Domain d(DomainKind::level_set, m);
        d.V_ = V;
        d.W_ = W;
        d.height_ = height;
        d.validate();
        return d;
    }

    static Domain ball(const Pt& center, double radius) {
        if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidDomain("ball radius must be positive");
        Domain d(DomainKind::ball, center);
        d.radius_ = radius;
        return d;
    }

    /// Open box; in 1-D this is the interval (lo, hi).
    static Domain box(const Pt& lo, const Pt& hi, std::optional<Pt> anchor = std::nullopt) {
        for (std::size_t i = 0; i < Dim; ++i)
            if (!(lo[i] < hi[i])) throw InvalidDomain("box needs lo < hi in every coordinate");
        Domain d(DomainKind::box, anchor ? *anchor : 0.5 * (lo + hi));
        d.lo_ = lo;
        d.hi_ = hi;
        d.validate();
        return d;
    }

    static Domain predicate(std::function<bool(const Pt&)> inside, const Pt& anchor) {
        if (!inside) throw InvalidDomain("predicate domain needs a membership test");
        Domain d(DomainKind::predicate, anchor);
        d.inside_ = std::move(inside);
        d.validate();
        return d;
    }

    DomainKind kind() const noexcept { return kind_; }
    const Pt& anchor() const noexcept { return anchor_; }
    std::optional<double> height() const {
        return kind_ == DomainKind::level_set ? std::optional<double>(height_) : std::nullopt;
    }

    double effective(const Pt& x) const { return V_.evaluate(x) + W_.evaluate(x - anchor_) - V_.evaluate(anchor_); }

    bool contains(const Pt& x) const {
        switch (kind_) {
            case DomainKind::level_set:
                return effective(x) < height_;
            case DomainKind::ball:
                return squared_norm(x - anchor_) < radius_ * radius_;
            case DomainKind::box:
                for (std::size_t i = 0; i < Dim; ++i)
                    if (!(x[i] > lo_[i] && x[i] < hi_[i])) return false;
                return true;
            case DomainKind::predicate:
                return inside_(x);
        }
        return false;
    }

    /// Boundary point on the ray anchor + r v, |v| = 1. Exact for balls and
    /// boxes, bisection otherwise.
    Pt boundary_along(const Pt& v) const {
        if (kind_ == DomainKind::ball) return anchor_ + radius_ * v;
        if (kind_ == DomainKind::box) {
            double t = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < Dim; ++i) {
                if (v[i] > 0.0) t = std::min(t, (hi_[i] - anchor_[i]) / v[i]);
                if (v[i] < 0.0) t = std::min(t, (lo_[i] - anchor_[i]) / v[i]);
            }
            return anchor_ + t * v;
        }
        double lo = 0.0, hi = 1.0;
        while (contains(anchor_ + hi * v)) {
            lo = hi;
            hi *= 2.0;
            if (hi > kUnboundedRadius) throw InvalidDomain("domain is unbounded along a sampled ray");
        }
        for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
            const double mid = 0.5 * (lo + hi);
            (contains(anchor_ + mid * v) ? lo : hi) = mid;
        }
        return anchor_ + (0.5 * (lo + hi)) * v;
    }

    Pt boundary_at_angle(double theta) const { return boundary_along(detail::unit_direction<Dim>(theta)); }

    /// Boundary samples: both endpoints in 1-D, n equally spaced angles in 2-D.
    std::vector<Pt> boundary_samples(std::size_t n = 1024) const {
        std::vector<Pt> out;
        if constexpr (Dim == 1) {
            out.push_back(boundary_along(Pt{-1.0}));
            out.push_back(boundary_along(Pt{1.0}));
        } else {
            for (std::size_t i = 0; i < n; ++i)
                out.push_back(boundary_at_angle(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n)));
        }
        return out;
    }

    /// Outward unit normal at a boundary point.
    Pt outward_normal(const Pt& x) const {
        Pt g{};
        switch (kind_) {
            case DomainKind::level_set:
                g = V_.gradient(x) + W_.gradient(x - anchor_);
                break;
            case DomainKind::ball:
                g = x - anchor_;
                break;
            case DomainKind::box: {
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < Dim; ++i) {
                    if (x[i] - lo_[i] < best) {
                        best = x[i] - lo_[i];
                        g = zero_point<Dim>();
                        g[i] = -1.0;
                    }
                    if (hi_[i] - x[i] < best) {
                        best = hi_[i] - x[i];
                        g = zero_point<Dim>();
                        g[i] = 1.0;
                    }
                }
                break;
            }
            case DomainKind::predicate:
                g = x - anchor_;
                break;
        }
        const double n = norm(g);
        if (!(n > 0.0)) throw InvalidDomain("degenerate boundary normal");
        return (1.0 / n) * g;
    }

    /// The field x -> -grad V(x) - grad W(x - m) points strictly inward at
    /// every boundary sample.
    bool positively_invariant(const Potential<Dim>& V, const Potential<Dim>& W, const Pt& m,
                              std::size_t samples = 1024) const {
        for (const Pt& b : boundary_samples(samples)) {
            const Pt field = -(V.gradient(b) + W.gradient(b - m));
            if (!(dot(field, outward_normal(b)) < 0.0)) return false;
        }
        return true;
    }

    const Potential<Dim>& level_V() const { return V_; }
    const Potential<Dim>& level_W() const { return W_; }

private:
    Domain(DomainKind k, const Pt& anchor) : kind_(k), anchor_(anchor) {}

    void validate() const {
        if (!contains(anchor_)) throw InvalidDomain("anchor point is not inside the domain");
        boundary_samples(16);
    }

    DomainKind kind_;
    Pt anchor_;
    Potential<Dim> V_{}, W_{};
    double height_ = 0.0;
    double radius_ = 0.0;
    Pt lo_{}, hi_{};
    std::function<bool(const Pt&)> inside_;
};

/// U(x) = V(x) + W(x - m) - V(m).
template <std::size_t Dim>
double effective_potential(const Point<Dim>& x, const Potential<Dim>& V, const Potential<Dim>& W, const Point<Dim>& m) {
    return V.evaluate(x) + W.evaluate(x - m) - V.evaluate(m);
}

/// H = inf over the boundary of U. Level sets of the same U return their
/// height; otherwise the minimum over boundary samples (first index on ties),
/// refined in 2-D by golden-section search in the angle.
template <std::size_t Dim>
double exit_cost(const Domain<Dim>& domain, const Potential<Dim>& V, const Potential<Dim>& W, const Point<Dim>& m,
                 std::size_t samples = 1024) {
    if (domain.kind() == DomainKind::level_set && domain.anchor() == m && detail::same_potential(domain.level_V(), V) &&
        detail::same_potential(domain.level_W(), W))
        return *domain.height();

    const auto pts = domain.boundary_samples(samples);
    std::size_t best = 0;
    double h = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double u = effective_potential(pts[i], V, W, m);
        if (u < h) {
            h = u;
            best = i;
        }
    }
    if constexpr (Dim == 2) {
        const double step = 2.0 * std::numbers::pi / static_cast<double>(pts.size());
        auto f = [&](double th) { return effective_potential(domain.boundary_at_angle(th), V, W, m); };
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = step * (static_cast<double>(best) - 1.0), b = step * (static_cast<double>(best) + 1.0);
        double c = b - phi * (b - a), d = a + phi * (b - a);
        double fc = f(c), fd = f(d);
        for (int it = 0; it < 80; ++it) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - phi * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + phi * (b - a);
                fd = f(d);
            }
        }
        h = std::min({h, fc, fd});
    }
    return h;
}

template <std::size_t Dim>
struct ResizedDomain {
    Domain<Dim> domain;
    double height = 0.0;
    /// Smallest distance between sampled boundary points of the two domains
    /// along common rays.
    double distance = 0.0;
};

namespace detail {

template <std::size_t Dim>
double boundary_gap(const Domain<Dim>& a, const Domain<Dim>& b, std::size_t samples) {
    const auto pa = a.boundary_samples(samples);
    const auto pb = b.boundary_samples(samples);
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pa.size(); ++i) gap = std::min(gap, norm(pa[i] - pb[i]));
    return gap;
}

template <std::size_t Dim>
ResizedDomain<Dim> resize(const Domain<Dim>& domain, const Potential<Dim>& V, const Potential<Dim>& W,
                          const Point<Dim>& m, double delta, double sign, std::size_t samples) {
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw InvalidParameter("delta must be finite and >= 0");
    const double H = exit_cost(domain, V, W, m, samples);
    const double target = H + sign * 0.5 * delta;
    if (!(target > 0.0))
        throw EmptyDomain("contraction to height " + std::to_string(target) + " is empty; decrease delta");
    if (delta == 0.0) return {domain, H, 0.0};
    Domain<Dim> out = Domain<Dim>::level_set(V, W, m, target);
    return {out, target, boundary_gap(domain, out, samples)};
}

}  // namespace detail

/// Level set at height H + delta/2, H the exit cost of `domain` for (V, W, m).
template <std::size_t Dim>
ResizedDomain<Dim> make_enlarged(const Domain<Dim>& domain, const Potential<Dim>& V, const Potential<Dim>& W,
                                 const Point<Dim>& m, double delta, std::size_t samples = 1024) {
    return detail::resize(domain, V, W, m, delta, +1.0, samples);
}

/// Level set at height H - delta/2; empty-domain error if that is not positive.
template <std::size_t Dim>
ResizedDomain<Dim> make_contracted(const Domain<Dim>& domain, const Potential<Dim>& V, const Potential<Dim>& W,
                                   const Point<Dim>& m, double delta, std::size_t samples = 1024) {
    return detail::resize(domain, V, W, m, delta, -1.0, samples);
}

/// Level-set overloads that reuse the potentials the domain was built from.
template <std::size_t Dim>
ResizedDomain<Dim> make_enlarged(const Domain<Dim>& domain, double delta) {
    if (domain.kind() != DomainKind::level_set) throw InvalidDomain("enlargement without potentials needs a level set");
    return make_enlarged(domain, domain.level_V(), domain.level_W(), domain.anchor(), delta);
}

template <std::size_t Dim>
ResizedDomain<Dim> make_contracted(const Domain<Dim>& domain, double delta) {
    if (domain.kind() != DomainKind::level_set) throw InvalidDomain("contraction without potentials needs a level set");
    return make_contracted(domain, domain.level_V(), domain.level_W(), domain.anchor(), delta);
}

enum class Process { self_interacting, frozen };

inline const char* process_name(Process p) { return p == Process::frozen ? "frozen" : "self_interacting"; }

template <std::size_t Dim>
struct ExitRecord {
    double sigma = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    double tau = 0.0;
    Point<Dim> exit_point{};
    Point<Dim> last_inside{};
    bool capped = false;
    std::int64_t steps = 0;
};

/// exp((2H + 10) / sigma^2), the default horizon.
inline double default_horizon(double exit_cost_value, double sigma) {
    if (sigma == 0.0) return std::numeric_limits<double>::infinity();
    return std::exp((2.0 * exit_cost_value + 10.0) / (sigma * sigma));
}

namespace detail {

/// Point on [inside, outside] where the domain is left, by bisection.
template <std::size_t Dim>
Point<Dim> crossing_point(const Domain<Dim>& domain, const Point<Dim>& inside, const Point<Dim>& outside) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (domain.contains(inside + mid * (outside - inside)) ? lo : hi) = mid;
    }
    return inside + (0.5 * (lo + hi)) * (outside - inside);
}

}  // namespace detail

/// One exit time. Exits are detected at grid times; the exit point is where
/// the segment between the last inside and first outside positions crosses
/// the boundary. The frozen process uses m = V.minimizer. When
/// params.horizon_cap is infinite the cap is exp((2H + 10)/sigma^2),
/// in all cases truncated by params.max_steps.
template <std::size_t Dim>
ExitRecord<Dim> run_exit_trial(const SimulationParams& params, const Domain<Dim>& domain, const Potential<Dim>& V,
                               const Potential<Dim>& W, const Point<Dim>& x0, std::uint64_t stream = 0,
                               Process process = Process::self_interacting) {
    params.validate();
    ExitRecord<Dim> rec;
    rec.sigma = params.sigma;
    rec.seed = params.seed;
    rec.stream = stream;
    rec.exit_point = x0;
    rec.last_inside = x0;
    if (!domain.contains(x0)) return rec;

    double cap = params.horizon_cap;
    if (!std::isfinite(cap) && params.sigma > 0.0) cap = default_horizon(exit_cost(domain, V, W, V.minimizer), params.sigma);
    const std::int64_t budget = params.steps_for(cap);
    const Point<Dim> m = V.minimizer;

    auto finish = [&](const Point<Dim>& before, const Point<Dim>& after, std::int64_t step) {
        rec.steps = step;
        rec.tau = static_cast<double>(step) * params.dt;
        rec.last_inside = before;
        rec.exit_point = detail::crossing_point(domain, before, after);
    };

    if (process == Process::self_interacting) {
        auto s = DiffusionState<Dim>::start_at(x0, params, stream, m, wasserstein_half_order(V, W));
        while (s.step < budget) {
            const Point<Dim> before = s.position;
            step_self_interacting(s, V, W, params);
            if (!domain.contains(s.position)) {
                finish(before, s.position, s.step);
                return rec;
            }
        }
        rec.last_inside = rec.exit_point = s.position;
    } else {
        ReplicaRng rng(params.seed, stream);
        Point<Dim> y = x0;
        for (std::int64_t k = 1; k <= budget; ++k) {
            const Point<Dim> noise = params.sigma != 0.0 ? rng.normal_vector<Dim>() : zero_point<Dim>();
            const Point<Dim> next = step_frozen(y, m, V, W, params, noise, k);
            if (!domain.contains(next)) {
                finish(y, next, k);
                return rec;
            }
            y = next;
        }
        rec.last_inside = rec.exit_point = y;
    }
    rec.capped = true;
    rec.steps = budget;
    rec.tau = cap;
    return rec;
}

enum class LawStatistic { median, mean };

inline const char* statistic_name(LawStatistic s) { return s == LawStatistic::median ? "median" : "mean"; }

struct ScanOptions {
    Process process = Process::self_interacting;
    std::size_t replicas = 200;
    /// Half-width of the window [exp(2(H - delta)/sigma^2), exp(2(H + delta)/sigma^2)].
    double delta = 0.3;
    LawStatistic statistic = LawStatistic::median;
    int threads = 0;
    /// Called once per finished level.
    std::function<void(double sigma)> on_level;
};

struct LevelSummary {
    double sigma = 0.0;
    std::size_t records = 0;
    std::size_t capped = 0;
    double mean_log_tau = 0.0;
    double median_tau = 0.0;
    double mean_scaled = 0.0;    // mean of (sigma^2/2) log tau
    double median_scaled = 0.0;  // median of (sigma^2/2) log tau
    double sd_log_tau = 0.0;
    double in_window_fraction = 0.0;
};

template <std::size_t Dim>
struct ArrheniusFit {
    std::vector<double> sigmas;
    std::vector<LevelSummary> levels;
    LawStatistic statistic = LawStatistic::median;
    Process process = Process::self_interacting;
    double exit_cost = 0.0;
    double delta = 0.0;
    /// log(stat tau) = intercept + slope * 2/sigma^2; slope estimates H.
    double slope = 0.0;
    double intercept = 0.0;
    double half_width = 0.0;  // 1.96 standard errors
    std::vector<ExitRecord<Dim>> records;
};

namespace detail {

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

/// Exit times over a decreasing sigma ladder. Replica r uses generator stream
/// r at every level, so the levels share their noise sequences. Only
/// uncapped records enter the regression.
template <std::size_t Dim>
ArrheniusFit<Dim> arrhenius_scan(const SimulationParams& base, const Domain<Dim>& domain, const Potential<Dim>& V,
                                 const Potential<Dim>& W, const Point<Dim>& x0, const std::vector<double>& ladder,
                                 const ScanOptions& opts = {}) {
    if (ladder.size() < 3) throw InvalidParameter("sigma ladder needs at least three levels");
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        if (!(ladder[i] > 0.0)) throw InvalidParameter("sigma ladder entries must be positive");
        if (i > 0 && !(ladder[i] < ladder[i - 1])) throw InvalidParameter("sigma ladder must be strictly decreasing");
    }
    if (opts.replicas < 50) throw InvalidParameter("arrhenius scan needs at least 50 replicas");

    ArrheniusFit<Dim> fit;
    fit.sigmas = ladder;
    fit.statistic = opts.statistic;
    fit.process = opts.process;
    fit.delta = opts.delta;
    fit.exit_cost = exit_cost(domain, V, W, V.minimizer);
    const unsigned threads = resolve_threads(opts.threads);

    std::vector<double> xs, ys;
    for (double sigma : ladder) {
        SimulationParams p = base;
        p.sigma = sigma;
        if (!std::isfinite(p.horizon_cap)) p.horizon_cap = default_horizon(fit.exit_cost, sigma);
        auto recs = parallel_map(opts.replicas, threads,
                                 [&](std::size_t r) { return run_exit_trial(p, domain, V, W, x0, r, opts.process); });

        LevelSummary lvl;
        lvl.sigma = sigma;
        lvl.records = recs.size();
        const double scale = 0.5 * sigma * sigma;
        const double lo = std::exp((fit.exit_cost - opts.delta) / scale);
        const double hi = std::exp((fit.exit_cost + opts.delta) / scale);
        std::vector<double> taus, logs;
        std::size_t in_window = 0;
        for (const auto& r : recs) {
            if (r.tau >= lo && r.tau <= hi) ++in_window;
            if (r.capped) {
                ++lvl.capped;
                continue;
            }
            if (r.tau > 0.0) {
                taus.push_back(r.tau);
                logs.push_back(std::log(r.tau));
            }
        }
        lvl.in_window_fraction = static_cast<double>(in_window) / static_cast<double>(recs.size());
        if (taus.empty())
            throw InsufficientData("every record is capped at sigma = " + std::to_string(sigma));
        CompensatedSum sum;
        for (double l : logs) sum.add(l);
        lvl.mean_log_tau = sum.value() / static_cast<double>(logs.size());
        double ss = 0.0;
        for (double l : logs) ss += (l - lvl.mean_log_tau) * (l - lvl.mean_log_tau);
        lvl.sd_log_tau = logs.size() > 1 ? std::sqrt(ss / static_cast<double>(logs.size() - 1)) : 0.0;
        lvl.median_tau = detail::median_of(taus);
        lvl.mean_scaled = scale * lvl.mean_log_tau;
        lvl.median_scaled = scale * detail::median_of(logs);

        xs.push_back(1.0 / scale);
        ys.push_back(opts.statistic == LawStatistic::median ? std::log(lvl.median_tau) : lvl.mean_log_tau);
        fit.levels.push_back(lvl);
        fit.records.insert(fit.records.end(), recs.begin(), recs.end());
        if (opts.on_level) opts.on_level(sigma);
    }
    const LinearFit lf = least_squares(xs, ys);
    fit.slope = lf.slope;
    fit.intercept = lf.intercept;
    fit.half_width = 1.96 * lf.slope_stderr;
    return fit;
}

struct StabilizationEstimate {
    double kappa = 0.0;
    double sigma = 0.0;
    int order = 2;  // 2k
    bool reached = false;
    double T_kappa = std::numeric_limits<double>::infinity();
    double resolution = 0.0;
    std::vector<double> times;
    std::vector<double> curve;  // Monte Carlo mean of W_2k(mu_t, delta_m)
};

/// T_kappa(sigma) = first grid time after which the replica average of
/// W_2k(mu_t, delta_m) stays <= kappa up to the end of the window.
template <std::size_t Dim>
StabilizationEstimate estimate_T_kappa(const SimulationParams& params, const Potential<Dim>& V,
                                       const Potential<Dim>& W, const Point<Dim>& m, double kappa,
                                       std::size_t replicas, double window, std::optional<Point<Dim>> x0 = std::nullopt,
                                       double resolution = 0.5, int threads = 0) {
    params.validate();
    if (!(kappa > 0.0)) throw InvalidParameter("kappa must be positive");
    if (!(window >= 10.0)) throw InvalidParameter("stabilization window must be at least 10 time units");
    if (replicas < 1) throw InvalidParameter("need at least one replica");
    if (!(resolution >= params.dt)) throw InvalidParameter("time grid resolution must be >= dt");

    const int k = wasserstein_half_order(V, W);
    const auto every = std::max<std::int64_t>(1, std::llround(resolution / params.dt));
    const std::int64_t n = params.steps_for(window);
    const Point<Dim> start = x0 ? *x0 : m;

    auto curves = parallel_map(replicas, resolve_threads(threads), [&](std::size_t r) {
        auto s = DiffusionState<Dim>::start_at(start, params, r, m, k);
        std::vector<double> c;
        while (s.step < n) {
            step_self_interacting(s, V, W, params);
            if (s.step % every == 0) c.push_back(wasserstein_to_dirac<Dim>(s.measure, m, 2 * k));
        }
        return c;
    });

    StabilizationEstimate est;
    est.kappa = kappa;
    est.sigma = params.sigma;
    est.order = 2 * k;
    est.resolution = static_cast<double>(every) * params.dt;
    const std::size_t points = curves.front().size();
    for (std::size_t j = 0; j < points; ++j) {
        CompensatedSum acc;
        for (const auto& c : curves) acc.add(c[j]);
        est.times.push_back(static_cast<double>((j + 1) * static_cast<std::size_t>(every)) * params.dt);
        est.curve.push_back(acc.value() / static_cast<double>(replicas));
    }
    std::size_t first = points;
    while (first > 0 && est.curve[first - 1] <= kappa) --first;
    if (first < points) {
        est.reached = true;
        est.T_kappa = first == 0 ? 0.0 : est.times[first];
    }
    return est;
}

/// Fraction of replicas leaving the domain before time T. The domain must be
/// positively invariant for -grad V - grad W(. - m) and the zero-noise orbit
/// of x0 must stay inside on [0, T].
template <std::size_t Dim>
double pre_stabilization_exit_probability(const SimulationParams& params, const Domain<Dim>& domain,
                                          const Potential<Dim>& V, const Potential<Dim>& W, const Point<Dim>& x0,
                                          double T, std::size_t replicas, int threads = 0) {
    params.validate();
    if (replicas < 1) throw InvalidParameter("need at least one replica");
    if (!domain.positively_invariant(V, W, V.minimizer))
        throw InvalidDomain("domain is not positively invariant for the frozen drift");
    const auto flow = integrate_flow(x0, V, W, params, T);
    for (std::size_t i = 0; i < flow.positions.size(); ++i)
        if (!domain.contains(flow.positions[i]))
            throw FlowOrbitOutsideDomain("zero-noise orbit leaves the domain at t = " + std::to_string(flow.times[i]));
    if (params.sigma == 0.0) return 0.0;

    SimulationParams p = params;
    p.horizon_cap = T;
    const auto recs = parallel_map(replicas, resolve_threads(threads),
                                   [&](std::size_t r) { return run_exit_trial(p, domain, V, W, x0, r); });
    std::size_t exits = 0;
    for (const auto& r : recs)
        if (!r.capped) ++exits;
    return static_cast<double>(exits) / static_cast<double>(replicas);
}

template <std::size_t Dim>
struct BoundaryArc {
    std::string name;
    std::function<bool(const Point<Dim>&)> contains;
};

/// 1-D: the boundary points left and right of m.
inline std::vector<BoundaryArc<1>> half_line_arcs(const Point<1>& m) {
    const double c = m[0];
    return {{"left", [c](const Point<1>& x) { return x[0] < c; }},
            {"right", [c](const Point<1>& x) { return x[0] > c; }}};
}

/// 2-D: n equal angular sectors around m, [2 pi i/n, 2 pi (i+1)/n).
inline std::vector<BoundaryArc<2>> angular_arcs(const Point<2>& m, std::size_t n) {
    if (n < 1) throw InvalidParameter("need at least one arc");
    std::vector<BoundaryArc<2>> arcs;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
        const double b = 2.0 * std::numbers::pi * static_cast<double>(i + 1) / static_cast<double>(n);
        arcs.push_back({"sector_" + std::to_string(i), [m, a, b](const Point<2>& x) {
                            double th = std::atan2(x[1] - m[1], x[0] - m[0]);
                            if (th < 0.0) th += 2.0 * std::numbers::pi;
                            return th >= a && th < b;
                        }});
    }
    return arcs;
}

struct ArcStatistic {
    std::string name;
    std::size_t count = 0;
    double frequency = 0.0;
    double min_cost = std::numeric_limits<double>::infinity();  // inf of U over the arc
    bool high_cost = false;                                       // min_cost > H
};

struct ExitLocationHistogram {
    double exit_cost = 0.0;
    std::size_t used = 0;
    std::size_t capped = 0;
    std::vector<ArcStatistic> arcs;
};

/// Bins uncapped exit points by arc (first matching arc wins) and reports the
/// minimum of U over the sampled boundary points of each arc.
template <std::size_t Dim>
ExitLocationHistogram exit_location_histogram(const std::vector<ExitRecord<Dim>>& records, const Domain<Dim>& domain,
                                              const Potential<Dim>& V, const Potential<Dim>& W, const Point<Dim>& m,
                                              const std::vector<BoundaryArc<Dim>>& arcs, double cost_tolerance = 1e-6) {
    if (arcs.empty()) throw InvalidParameter("partition needs at least one arc");
    ExitLocationHistogram h;
    h.exit_cost = exit_cost(domain, V, W, m);
    for (const auto& a : arcs) h.arcs.push_back({a.name});
    for (const auto& b : domain.boundary_samples())
        for (std::size_t i = 0; i < arcs.size(); ++i)
            if (arcs[i].contains(b)) {
                h.arcs[i].min_cost = std::min(h.arcs[i].min_cost, effective_potential(b, V, W, m));
                break;
            }
    for (const auto& r : records) {
        if (r.capped) {
            ++h.capped;
            continue;
        }
        std::size_t i = 0;
        while (i < arcs.size() && !arcs[i].contains(r.exit_point)) ++i;
        if (i == arcs.size()) throw PartitionCoverage("an exit point lies on no arc");
        ++h.arcs[i].count;
        ++h.used;
    }
    for (auto& a : h.arcs) {
        a.frequency = h.used > 0 ? static_cast<double>(a.count) / static_cast<double>(h.used) : 0.0;
        a.high_cost = a.min_cost > h.exit_cost + cost_tolerance;
    }
    return h;
}

}  // namespace exitlab
