#pragma once

// Confinement and interaction potentials, and sampled verification of the
// standing hypotheses (positivity, polynomial domination, uniform convexity,
// Laplacian growth, radial symmetry of the interaction).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "exitlab/error.hpp"
#include "exitlab/point.hpp"
#include "exitlab/rng.hpp"

namespace exitlab {

enum class PotentialKind { quadratic, quartic_convex, custom };

/// V below this value is excluded from the Laplacian growth check.
inline constexpr double kGrowthCheckFloor = 1e-6;

/// A confinement (V) or interaction (W) potential on R^Dim.
///
/// Builtins are strength*|x-m|^2/2 and rho*|x-m|^2/2 + beta*|x-m|^4/4. The
/// evaluation is a switch on the kind, so the hot loops in the integrators
/// stay free of indirect calls. Custom potentials carry their own callables
/// and must be gated through check_hypotheses before use.
template <std::size_t Dim>
struct Potential {
    using Pt = Point<Dim>;

    PotentialKind kind = PotentialKind::quadratic;
    double strength = 1.0;  // rho of the quadratic part
    double beta = 0.0;      // quartic coefficient
    Pt minimizer = zero_point<Dim>();

    double convexity_lower_bound = 1.0;
    int growth_degree = 2;
    double growth_constant_a = 0.0;
    /// C in the domination bound |f| + |grad f| + ||hess f|| <= C (1 + |x|^growth_degree).
    double domination_constant = 0.0;

    std::function<double(const Pt&)> custom_value;
    std::function<Pt(const Pt&)> custom_gradient;
    std::function<double(double)> radial_profile;

    bool is_quadratic() const noexcept { return kind == PotentialKind::quadratic; }

    double evaluate(const Pt& x) const {
        switch (kind) {
            case PotentialKind::quadratic:
                return 0.5 * strength * squared_norm(x - minimizer);
            case PotentialKind::quartic_convex: {
                const double r2 = squared_norm(x - minimizer);
                return 0.5 * strength * r2 + 0.25 * beta * r2 * r2;
            }
            case PotentialKind::custom:
                break;
        }
        return custom_value(x);
    }

    Pt gradient(const Pt& x) const {
        switch (kind) {
            case PotentialKind::quadratic:
                return strength * (x - minimizer);
            case PotentialKind::quartic_convex: {
                const Pt y = x - minimizer;
                return (strength + beta * squared_norm(y)) * y;
            }
            case PotentialKind::custom:
                break;
        }
        if (custom_gradient) return custom_gradient(x);
        return finite_difference_gradient(x);
    }

    Matrix<Dim> hessian(const Pt& x) const {
        Matrix<Dim> h{};
        switch (kind) {
            case PotentialKind::quadratic:
                for (std::size_t i = 0; i < Dim; ++i) h[i][i] = strength;
                return h;
            case PotentialKind::quartic_convex: {
                // Hessian of beta|y|^4/4 is beta(|y|^2 I + 2 y y^T).
                const Pt y = x - minimizer;
                const double r2 = squared_norm(y);
                for (std::size_t i = 0; i < Dim; ++i)
                    for (std::size_t j = 0; j < Dim; ++j)
                        h[i][j] = (i == j ? strength + beta * r2 : 0.0) + 2.0 * beta * y[i] * y[j];
                return h;
            }
            case PotentialKind::custom:
                break;
        }
        constexpr double step = 1e-5;
        for (std::size_t j = 0; j < Dim; ++j) {
            Pt xp = x, xm = x;
            xp[j] += step;
            xm[j] -= step;
            const Pt gp = gradient(xp), gm = gradient(xm);
            for (std::size_t i = 0; i < Dim; ++i) h[i][j] = (gp[i] - gm[i]) / (2.0 * step);
        }
        for (std::size_t i = 0; i < Dim; ++i)
            for (std::size_t j = i + 1; j < Dim; ++j) h[i][j] = h[j][i] = 0.5 * (h[i][j] + h[j][i]);
        return h;
    }

    double laplacian(const Pt& x) const {
        const auto h = hessian(x);
        double tr = 0.0;
        for (std::size_t i = 0; i < Dim; ++i) tr += h[i][i];
        return tr;
    }

private:
    Pt finite_difference_gradient(const Pt& x) const {
        constexpr double step = 1e-6;
        Pt g{};
        for (std::size_t i = 0; i < Dim; ++i) {
            Pt xp = x, xm = x;
            xp[i] += step;
            xm[i] -= step;
            g[i] = (custom_value(xp) - custom_value(xm)) / (2.0 * step);
        }
        return g;
    }
};

namespace detail {

// Bound on sum over the builtin's terms of c_j |x-m|^j by C(1 + |x|^deg),
// using |x-m| <= |x| + |m| and the elementary inequalities
// (a+b)^j <= 2^(j-1)(a^j + b^j) and |x|^i <= 1 + |x|^deg for i <= deg.
inline double polynomial_domination(const std::vector<double>& coeffs, double shift) {
    double c = 0.0;
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
        if (coeffs[j] == 0.0) continue;
        if (j == 0) {
            c += coeffs[j];
            continue;
        }
        const double split = std::pow(2.0, static_cast<double>(j) - 1.0);
        c += coeffs[j] * split * (1.0 + std::pow(shift, static_cast<double>(j)));
    }
    return c;
}

}  // namespace detail

/// V(x) = strength |x - minimizer|^2 / 2.
template <std::size_t Dim>
Potential<Dim> make_quadratic(double strength, const Point<Dim>& minimizer = zero_point<Dim>()) {
    if (!(strength > 0.0) || !std::isfinite(strength))
        throw InvalidParameter("quadratic strength must be positive, got " + std::to_string(strength));
    if (!is_finite(minimizer)) throw InvalidParameter("quadratic minimizer must be finite");
    Potential<Dim> p;
    p.kind = PotentialKind::quadratic;
    p.strength = strength;
    p.minimizer = minimizer;
    p.convexity_lower_bound = strength;
    p.growth_degree = 2;
    // Laplacian is strength*Dim everywhere; sup of Lap/V over {V >= floor}.
    p.growth_constant_a = strength * static_cast<double>(Dim) / kGrowthCheckFloor;
    // value + gradient + hessian: s/2 u^2 + s u + s.
    p.domination_constant = detail::polynomial_domination({strength, strength, 0.5 * strength}, norm(minimizer));
    if (squared_norm(minimizer) == 0.0) {
        p.radial_profile = [strength](double r) { return 0.5 * strength * r * r; };
    }
    return p;
}

/// V(x) = rho |x - m|^2 / 2 + beta |x - m|^4 / 4.
template <std::size_t Dim>
Potential<Dim> make_quartic_convex(double rho, double beta, const Point<Dim>& minimizer = zero_point<Dim>()) {
    if (!(rho > 0.0) || !std::isfinite(rho))
        throw InvalidParameter("quartic rho must be positive, got " + std::to_string(rho));
    if (!(beta >= 0.0) || !std::isfinite(beta))
        throw InvalidParameter("quartic beta must be non-negative, got " + std::to_string(beta));
    if (!is_finite(minimizer)) throw InvalidParameter("quartic minimizer must be finite");
    Potential<Dim> p;
    p.kind = PotentialKind::quartic_convex;
    p.strength = rho;
    p.beta = beta;
    p.minimizer = minimizer;
    p.convexity_lower_bound = rho;
    p.growth_degree = beta > 0.0 ? 4 : 2;
    // Lap V / V is decreasing in r = |x-m|, so its sup over {V >= floor} is at
    // the radius where V equals the floor.
    const double d = static_cast<double>(Dim);
    const double r2 = beta > 0.0 ? (-rho + std::sqrt(rho * rho + 4.0 * beta * kGrowthCheckFloor)) / beta
                                 : 2.0 * kGrowthCheckFloor / rho;
    p.growth_constant_a = (rho * d + (d + 2.0) * beta * r2) / kGrowthCheckFloor * (1.0 + 1e-9);
    // value: rho/2 u^2 + beta/4 u^4, gradient: rho u + beta u^3, hessian: rho + 3 beta u^2.
    p.domination_constant = detail::polynomial_domination(
        {rho, rho, 0.5 * rho + 3.0 * beta, beta, 0.25 * beta}, norm(minimizer));
    if (squared_norm(minimizer) == 0.0) {
        p.radial_profile = [rho, beta](double r) { return 0.5 * rho * r * r + 0.25 * beta * r * r * r * r; };
    }
    return p;
}

/// User-supplied potential. Metadata is declared by the caller and verified
/// only by check_hypotheses.
template <std::size_t Dim>
Potential<Dim> make_custom(std::function<double(const Point<Dim>&)> value,
                           std::function<Point<Dim>(const Point<Dim>&)> gradient, double convexity_lower_bound,
                           const Point<Dim>& minimizer, int growth_degree, double growth_constant_a,
                           double domination_constant, std::function<double(double)> radial_profile = {}) {
    if (!value) throw InvalidParameter("custom potential needs a value function");
    Potential<Dim> p;
    p.kind = PotentialKind::custom;
    p.custom_value = std::move(value);
    p.custom_gradient = std::move(gradient);
    p.convexity_lower_bound = convexity_lower_bound;
    p.minimizer = minimizer;
    p.growth_degree = growth_degree;
    p.growth_constant_a = growth_constant_a;
    p.domination_constant = domination_constant;
    p.radial_profile = std::move(radial_profile);
    return p;
}

/// Axis-aligned sampling region.
template <std::size_t Dim>
struct Box {
    Point<Dim> lo;
    Point<Dim> hi;

    bool contains(const Point<Dim>& x) const {
        for (std::size_t i = 0; i < Dim; ++i)
            if (x[i] < lo[i] || x[i] > hi[i]) return false;
        return true;
    }
};

template <std::size_t Dim>
struct ConditionCheck {
    std::string name;
    bool passed = true;
    /// Smallest observed slack; negative means violated.
    double worst_margin = std::numeric_limits<double>::infinity();
    Point<Dim> witness{};
};

template <std::size_t Dim>
struct HypothesisReport {
    ConditionCheck<Dim> positivity{"positivity"};
    ConditionCheck<Dim> domination{"domination"};
    ConditionCheck<Dim> laplacian_growth{"laplacian_growth"};
    ConditionCheck<Dim> convexity{"convexity"};
    ConditionCheck<Dim> minimizer{"minimizer"};
    ConditionCheck<Dim> symmetry{"symmetry"};

    bool all_passed() const {
        return positivity.passed && domination.passed && laplacian_growth.passed && convexity.passed &&
               minimizer.passed && symmetry.passed;
    }

    template <class Fn>
    void for_each(Fn&& fn) const {
        fn(positivity);
        fn(domination);
        fn(laplacian_growth);
        fn(convexity);
        fn(minimizer);
        fn(symmetry);
    }
};

namespace detail {

template <std::size_t Dim>
void record(ConditionCheck<Dim>& c, double margin, const Point<Dim>& at) {
    if (margin < c.worst_margin) {
        c.worst_margin = margin;
        c.witness = at;
    }
}

}  // namespace detail

/// Spot-checks the hypotheses on `samples` uniform points of `box`.
/// Failures are reported with a witness point, never thrown.
template <std::size_t Dim>
HypothesisReport<Dim> check_hypotheses(const Potential<Dim>& V, const Potential<Dim>& W, const Box<Dim>& box,
                                       std::size_t samples, std::uint64_t seed) {
    if (samples < 100) throw InvalidParameter("check_hypotheses needs at least 100 samples");
    if (!box.contains(V.minimizer)) throw InvalidParameter("sampling box must contain the minimizer of V");

    using Pt = Point<Dim>;
    HypothesisReport<Dim> rep;
    ReplicaRng rng(seed, 0);
    auto draw = [&] {
        Pt x{};
        for (std::size_t i = 0; i < Dim; ++i) x[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * rng.uniform();
        return x;
    };
    auto direction = [&] {
        Pt v = rng.normal_vector<Dim>();
        const double n = norm(v);
        return n > 0.0 ? (1.0 / n) * v : zero_point<Dim>() + Pt{1.0};
    };

    const int degree = std::max(V.growth_degree, W.growth_degree);
    // 1 + |x|^i <= 2 (1 + |x|^degree) for i <= degree.
    const double dom_c = V.domination_constant * (V.growth_degree < degree ? 2.0 : 1.0) +
                         W.domination_constant * (W.growth_degree < degree ? 2.0 : 1.0);
    constexpr double fd_step = 1e-3;

    for (std::size_t s = 0; s < samples; ++s) {
        const Pt x = draw();
        const double v = V.evaluate(x);
        const double w = W.evaluate(x);

        detail::record(rep.positivity, std::min(v, w), x);

        const double lhs = std::abs(w) + norm(W.gradient(x)) + spectral_norm(W.hessian(x)) + std::abs(v) +
                           norm(V.gradient(x)) + spectral_norm(V.hessian(x));
        const double bound = dom_c * (1.0 + std::pow(norm(x), degree));
        detail::record(rep.domination, (bound - lhs) / std::max(bound, 1.0), x);

        if (v >= kGrowthCheckFloor) {
            const double lap = V.laplacian(x);
            detail::record(rep.laplacian_growth, (V.growth_constant_a * v - lap) / std::max(std::abs(lap), 1.0), x);
        }

        // Central second differences along random unit directions.
        const Pt u = direction();
        for (const Potential<Dim>* p : {&V, &W}) {
            const double second = (p->evaluate(x + fd_step * u) - 2.0 * p->evaluate(x) + p->evaluate(x - fd_step * u)) /
                                  (fd_step * fd_step);
            detail::record(rep.convexity, second - p->convexity_lower_bound, x);
        }

        // Radial symmetry: against the declared profile when present, else
        // against a reflected / rotated copy of x.
        if (W.radial_profile) {
            detail::record(rep.symmetry, -std::abs(w - W.radial_profile(norm(x))), x);
        } else {
            Pt y{};
            if constexpr (Dim == 1) {
                y[0] = -x[0];
            } else {
                const double r = norm(x);
                const Pt e = direction();
                y = r * e;
            }
            detail::record(rep.symmetry, -std::abs(w - W.evaluate(y)), x);
        }
    }

    const double gmin = norm(V.gradient(V.minimizer));
    detail::record(rep.minimizer, 1e-10 - gmin, V.minimizer);

    rep.positivity.passed = rep.positivity.worst_margin >= 0.0;
    rep.domination.passed = rep.domination.worst_margin >= 0.0;
    rep.laplacian_growth.passed = rep.laplacian_growth.worst_margin >= 0.0;
    rep.convexity.passed = rep.convexity.worst_margin >= -1e-6;
    rep.minimizer.passed = rep.minimizer.worst_margin >= 0.0;
    rep.symmetry.passed = rep.symmetry.worst_margin >= -1e-12;
    return rep;
}

}  // namespace exitlab
