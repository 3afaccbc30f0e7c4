#pragma once

// Equilibrium map Pi(mu) = Z^-1 exp(-2 (V + W*mu) / sigma^2) on a grid, its
// self-consistent fixed point, the discretized measure flow, the free
// energy, and the sigma-uniform tail-decay check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "exitlab/error.hpp"
#include "exitlab/measures.hpp"
#include "exitlab/point.hpp"
#include "exitlab/potentials.hpp"

namespace exitlab {

template <std::size_t Dim>
struct GridSpec {
    double spacing = 0.01;
    /// Explicit bounds; when absent the grid is centred on the center of mu
    /// and extends until the log-weight drops `log_range` below its maximum.
    std::optional<Box<Dim>> bounds;
    double log_range = 40.0;
    /// Largest mass allowed in the outermost layer of cells.
    double edge_mass_tolerance = 1e-8;
};

template <std::size_t Dim>
struct GibbsMapResult {
    GridDensity<Dim> density;
    double log_partition = 0.0;  // log Z(mu, sigma)
};

namespace detail {

/// x -> V(x) + W*mu(x) on arbitrary points. Quadratic W uses
/// W*mu(x) = s/2 (|x - mean - m_W|^2 + sum_i w_i |p_i - mean|^2).
template <std::size_t Dim, AtomicMeasure<Dim> M>
std::function<double(const Point<Dim>&)> effective_potential(const M& mu, const Potential<Dim>& V,
                                                             const Potential<Dim>& W) {
    if (W.is_quadratic()) {
        const Point<Dim> mean = mu.mean();
        double spread = 0.0;
        mu.for_each_atom([&](const Point<Dim>& p, double w) { spread += w * squared_norm(p - mean); });
        const Point<Dim> shift = mean + W.minimizer;
        const double s = W.strength;
        return [&V, shift, spread, s](const Point<Dim>& x) {
            return V.evaluate(x) + 0.5 * s * (squared_norm(x - shift) + spread);
        };
    }
    std::vector<Point<Dim>> pts;
    std::vector<double> ws;
    mu.for_each_atom([&](const Point<Dim>& p, double w) {
        pts.push_back(p);
        ws.push_back(w);
    });
    return [&V, &W, pts = std::move(pts), ws = std::move(ws)](const Point<Dim>& x) {
        double acc = V.evaluate(x);
        for (std::size_t i = 0; i < pts.size(); ++i) acc += ws[i] * W.evaluate(x - pts[i]);
        return acc;
    };
}

template <std::size_t Dim>
std::vector<Point<Dim>> probe_directions() {
    std::vector<Point<Dim>> dirs;
    if constexpr (Dim == 1) {
        dirs = {Point<1>{1.0}, Point<1>{-1.0}};
    } else {
        for (int k = 0; k < 16; ++k) {
            const double th = 2.0 * std::numbers::pi * k / 16.0;
            Point<Dim> v = zero_point<Dim>();
            v[0] = std::cos(th);
            v[1] = std::sin(th);
            dirs.push_back(v);
        }
    }
    return dirs;
}

/// Half-width L (a multiple of h) such that the log-weight at c + L v is at
/// least `log_range` below its value at c in every probe direction.
template <std::size_t Dim>
double auto_half_width(const std::function<double(const Point<Dim>&)>& energy, const Point<Dim>& c, double sigma,
                       double h, double log_range) {
    const double e0 = energy(c);
    double L = std::max(8.0 * h, 0.25);
    for (int k = 0; k < 60; ++k, L *= 1.5) {
        bool ok = true;
        for (const auto& v : probe_directions<Dim>())
            if (2.0 * (energy(c + L * v) - e0) / (sigma * sigma) < log_range) ok = false;
        if (ok) break;
    }
    return h * std::ceil(L / h);
}

template <std::size_t Dim>
Box<Dim> centred_box(const Point<Dim>& c, double half_width) {
    Box<Dim> b;
    for (std::size_t i = 0; i < Dim; ++i) {
        b.lo[i] = c[i] - half_width;
        b.hi[i] = c[i] + half_width;
    }
    return b;
}

template <std::size_t Dim>
GibbsMapResult<Dim> gibbs_on_box(const std::function<double(const Point<Dim>&)>& energy, double sigma,
                                 const Box<Dim>& box, double h, double edge_tol) {
    GridDensity<Dim> g = GridDensity<Dim>::zeros(box.lo, box.hi, h);
    const double scale = -2.0 / (sigma * sigma);
    double lmax = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.values[i] = scale * energy(g.center(i));
        lmax = std::max(lmax, g.values[i]);
    }
    if (!std::isfinite(lmax)) throw SolverFailure("equilibrium log-weights are not finite");
    CompensatedSum z;
    for (double& v : g.values) {
        v = std::exp(v - lmax);
        z.add(v);
    }
    const double mass = z.value() * g.cell_volume();
    for (double& v : g.values) v /= mass;

    CompensatedSum edge;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.on_edge(i)) edge.add(g.values[i]);
    if (edge.value() * g.cell_volume() >= edge_tol)
        throw GridCoverage("mass " + std::to_string(edge.value() * g.cell_volume()) + " in edge cells");
    return {std::move(g), lmax + std::log(mass)};
}

}  // namespace detail

/// Pi(mu) on a grid, computed in the log domain.
template <std::size_t Dim, AtomicMeasure<Dim> M>
GibbsMapResult<Dim> gibbs_map(const M& mu, const Potential<Dim>& V, const Potential<Dim>& W, double sigma,
                              const GridSpec<Dim>& spec = {}) {
    if (!(sigma > 0.0)) throw InvalidParameter("gibbs_map needs sigma > 0");
    const auto energy = detail::effective_potential<Dim>(mu, V, W);
    if (spec.bounds) return detail::gibbs_on_box<Dim>(energy, sigma, *spec.bounds, spec.spacing, spec.edge_mass_tolerance);

    const Point<Dim> c = center_of<Dim>(mu, V, W);
    double L = detail::auto_half_width<Dim>(energy, c, sigma, spec.spacing, spec.log_range);
    for (int attempt = 0;; ++attempt) {
        try {
            return detail::gibbs_on_box<Dim>(energy, sigma, detail::centred_box(c, L), spec.spacing,
                                             spec.edge_mass_tolerance);
        } catch (const GridCoverage&) {
            if (attempt >= 10) throw;
            L = spec.spacing * std::ceil(1.5 * L / spec.spacing);
        }
    }
}

struct GibbsSolveReport {
    int iterations = 0;
    double residual = std::numeric_limits<double>::infinity();
    double damping = 0.5;
    bool converged = false;
    std::vector<double> residual_history;
    /// Diagnostic only: sum h^d |Pi(rho) - rho| (1 + |x|^2k).
    double weighted_residual = 0.0;
};

template <std::size_t Dim>
struct FixedPointOptions {
    double damping = 0.5;
    double tol = 1e-10;
    int max_iter = 500;
    /// Starting density; default Pi(delta_m) on the auto grid.
    std::optional<GridDensity<Dim>> initial;
    /// Called with (iteration, current density) before each update.
    std::function<void(int, const GridDensity<Dim>&)> observer;
};

/// Damped Picard iteration rho <- (1 - d) rho + d Pi(rho) with the grid L1
/// residual |Pi(rho) - rho|_1 as stopping rule. The returned density is the
/// iterate whose residual is reported.
template <std::size_t Dim>
std::pair<GridDensity<Dim>, GibbsSolveReport> solve_fixed_point(const Potential<Dim>& V, const Potential<Dim>& W,
                                                                double sigma, const GridSpec<Dim>& spec = {},
                                                                const FixedPointOptions<Dim>& opts = {}) {
    if (!(opts.damping > 0.0 && opts.damping <= 1.0)) throw InvalidParameter("damping must lie in (0, 1]");
    if (!(opts.tol > 0.0)) throw InvalidParameter("tolerance must be positive");
    if (opts.max_iter < 1) throw InvalidParameter("max_iter must be positive");

    GridDensity<Dim> rho = opts.initial ? *opts.initial
                                        : gibbs_map<Dim>(AtomList<Dim>::dirac(V.minimizer), V, W, sigma, spec).density;
    GridSpec<Dim> fixed = spec;
    int degree = std::max(V.growth_degree, W.growth_degree);

    for (int expansion = 0;; ++expansion) {
        fixed.bounds = Box<Dim>{rho.origin, rho.upper()};
        GibbsSolveReport rep;
        rep.damping = opts.damping;
        try {
            for (int it = 1; it <= opts.max_iter; ++it) {
                if (opts.observer) opts.observer(it - 1, rho);
                const GridDensity<Dim> target = gibbs_map<Dim>(rho, V, W, sigma, fixed).density;
                rep.iterations = it;
                rep.residual = rho.l1_distance(target);
                rep.residual_history.push_back(rep.residual);
                if (rep.residual <= opts.tol) {
                    double wr = 0.0;
                    for (std::size_t i = 0; i < rho.size(); ++i)
                        wr += std::abs(target.values[i] - rho.values[i]) *
                              (1.0 + std::pow(norm(rho.center(i)), degree));
                    rep.weighted_residual = wr * rho.cell_volume();
                    rep.converged = true;
                    return {std::move(rho), std::move(rep)};
                }
                for (std::size_t i = 0; i < rho.size(); ++i)
                    rho.values[i] = (1.0 - opts.damping) * rho.values[i] + opts.damping * target.values[i];
            }
            throw NonConvergence("fixed point iteration hit max_iter = " + std::to_string(opts.max_iter),
                                 rep.residual);
        } catch (const GridCoverage&) {
            if (expansion >= 5 || spec.bounds) throw;
            // Restart on a wider grid.
            const Point<Dim> c = rho.mean();
            const double half = 0.75 * rho.spacing * static_cast<double>(rho.counts[0]);
            GridSpec<Dim> wide = spec;
            wide.bounds = detail::centred_box(c, rho.spacing * std::ceil(2.0 * half / rho.spacing));
            rho = gibbs_map<Dim>(AtomList<Dim>::dirac(V.minimizer), V, W, sigma, wide).density;
        }
    }
}

template <std::size_t Dim>
struct MeasureFlow {
    std::vector<double> times;  // T_n = n^{3/2}, n = 1..n_knots
    std::vector<GridDensity<Dim>> knots;
    std::size_t clamped_cells = 0;
};

/// Knot discretization of mu' = (1/t)(Pi(mu) - mu):
///   mu_{n+1} = mu_n + ((T_{n+1} - T_n) / T_{n+1}) (Pi(mu_n) - mu_n),  T_n = n^{3/2}.
/// Negative cells from rounding are clamped to zero and the knot renormalized.
template <std::size_t Dim>
MeasureFlow<Dim> measure_flow_evolve(const GridDensity<Dim>& mu0, const Potential<Dim>& V, const Potential<Dim>& W,
                                     double sigma, int n_knots) {
    if (n_knots < 2) throw InvalidParameter("measure flow needs at least two knots");
    GridSpec<Dim> spec;
    spec.spacing = mu0.spacing;
    spec.bounds = Box<Dim>{mu0.origin, mu0.upper()};

    MeasureFlow<Dim> flow;
    flow.times.push_back(1.0);
    flow.knots.push_back(mu0);
    for (int n = 1; n < n_knots; ++n) {
        const double tn = std::pow(static_cast<double>(n), 1.5);
        const double tn1 = std::pow(static_cast<double>(n + 1), 1.5);
        const double gamma = (tn1 - tn) / tn1;
        const GridDensity<Dim>& cur = flow.knots.back();
        const GridDensity<Dim> target = gibbs_map<Dim>(cur, V, W, sigma, spec).density;
        GridDensity<Dim> next = cur;
        bool clamped = false;
        for (std::size_t i = 0; i < next.size(); ++i) {
            next.values[i] = cur.values[i] + gamma * (target.values[i] - cur.values[i]);
            if (next.values[i] < 0.0) {
                next.values[i] = 0.0;
                ++flow.clamped_cells;
                clamped = true;
            }
        }
        if (clamped) next.normalize();
        flow.times.push_back(tn1);
        flow.knots.push_back(std::move(next));
    }
    return flow;
}

enum class FreeEnergyMode {
    full,         // -(s^2/2) H + int V dmu + 1/2 int int W(x-y) dmu dmu
    small_parts,  // -(s^2/2) H + int (V + W*mu) dmu, with W*mu frozen
};

/// Free energy of a grid density; entropy H = -sum h^d v log v with 0 log 0 = 0.
/// The interaction double integral is a direct sum over cell pairs.
template <std::size_t Dim>
double free_energy(const GridDensity<Dim>& mu, const Potential<Dim>& V, const Potential<Dim>& W, double sigma,
                   FreeEnergyMode mode = FreeEnergyMode::full) {
    const double vol = mu.cell_volume();
    CompensatedSum entropy, confinement, interaction;
    std::vector<Point<Dim>> centers;
    std::vector<double> masses;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const double v = mu.values[i];
        if (v <= 0.0) continue;
        entropy.add(-vol * v * std::log(v));
        const Point<Dim> c = mu.center(i);
        confinement.add(vol * v * V.evaluate(c));
        centers.push_back(c);
        masses.push_back(vol * v);
    }
    for (std::size_t i = 0; i < centers.size(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < centers.size(); ++j) row += masses[j] * W.evaluate(centers[i] - centers[j]);
        interaction.add(masses[i] * row);
    }
    const double pair = mode == FreeEnergyMode::full ? 0.5 : 1.0;
    return -0.5 * sigma * sigma * entropy.value() + confinement.value() + pair * interaction.value();
}

/// Tail decay of Pi(mu) around its center at one noise level.
struct TailDecayLevel {
    double sigma = 0.0;
    std::vector<double> radii;
    /// Pi(|x - c| >= R) / Pi(|x - c| <= core_radius).
    std::vector<double> ratios;
    /// Fit log ratio = log C_Pi - (2 / sigma^2) C R.
    double decay_rate = 0.0;  // C, in the sigma-free scale
    double prefactor = 0.0;   // C_Pi
    /// Raw slope of log ratio in R (scales like 1/sigma^2).
    double raw_slope = 0.0;
    /// Convexity prediction for C: smallest directional derivative of
    /// V + W*mu at distance core_radius from the center.
    double predicted_rate = 0.0;
};

struct TailDecayReport {
    std::vector<TailDecayLevel> levels;
    double stability_ratio = 0.0;  // max / min decay rate over the ladder
    bool passed = false;
};

/// Ratio of tail mass to core mass of Pi(mu), centred at c_mu, across a sigma
/// ladder. The exponent is fitted as 2 C R / sigma^2 so that C is on the
/// sigma-free scale; the check passes when max/min of C over the ladder is at
/// most `max_ratio`.
template <std::size_t Dim, AtomicMeasure<Dim> M>
TailDecayReport verify_tail_decay(const M& mu, const Potential<Dim>& V, const Potential<Dim>& W,
                                  const std::vector<double>& sigmas, const std::vector<double>& radii,
                                  double spacing = 0.005, double core_radius = 2.0, double max_ratio = 1.5) {
    if (sigmas.empty()) throw InvalidParameter("tail decay needs a sigma ladder");
    if (radii.size() < 2) throw InvalidParameter("tail decay needs at least two radii");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] >= core_radius)) throw InvalidParameter("tail radii must be >= the core radius");
        if (i > 0 && !(radii[i] > radii[i - 1])) throw InvalidParameter("tail radii must be strictly increasing");
    }

    const Point<Dim> c = center_of<Dim>(mu, V, W);
    const auto energy = detail::effective_potential<Dim>(mu, V, W);
    const double reach = radii.back() + 1.0;

    TailDecayReport rep;
    for (double sigma : sigmas) {
        if (!(sigma > 0.0)) throw InvalidParameter("sigma ladder entries must be positive");
        GridSpec<Dim> spec;
        spec.spacing = spacing;
        spec.bounds = detail::centred_box(c, spacing * std::ceil(reach / spacing));
        const GridDensity<Dim> pi = gibbs_map<Dim>(mu, V, W, sigma, spec).density;

        TailDecayLevel lvl;
        lvl.sigma = sigma;
        lvl.radii = radii;
        CompensatedSum core;
        const double vol = pi.cell_volume();
        for (std::size_t i = 0; i < pi.size(); ++i)
            if (norm(pi.center(i) - c) <= core_radius) core.add(pi.values[i] * vol);
        std::vector<double> logs;
        for (double R : radii) {
            CompensatedSum tail;
            for (std::size_t i = 0; i < pi.size(); ++i)
                if (norm(pi.center(i) - c) >= R) tail.add(pi.values[i] * vol);
            const double ratio = tail.value() / core.value();
            if (!(ratio > 0.0))
                throw GridCoverage("tail mass beyond R = " + std::to_string(R) + " underflows at sigma = " +
                                   std::to_string(sigma));
            lvl.ratios.push_back(ratio);
            logs.push_back(std::log(ratio));
        }
        const LinearFit fit = least_squares(radii, logs);
        lvl.raw_slope = fit.slope;
        lvl.decay_rate = -0.5 * sigma * sigma * fit.slope;
        lvl.prefactor = std::exp(fit.intercept);

        double pred = std::numeric_limits<double>::infinity();
        constexpr double fd = 1e-6;
        for (const auto& v : detail::probe_directions<Dim>()) {
            const Point<Dim> at = c + core_radius * v;
            const double deriv = (energy(at + fd * v) - energy(at - fd * v)) / (2.0 * fd);
            pred = std::min(pred, deriv);
        }
        lvl.predicted_rate = pred;
        rep.levels.push_back(std::move(lvl));
    }

    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& l : rep.levels) {
        lo = std::min(lo, l.decay_rate);
        hi = std::max(hi, l.decay_rate);
    }
    rep.stability_ratio = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    rep.passed = rep.stability_ratio <= max_ratio;
    return rep;
}

}  // namespace exitlab
