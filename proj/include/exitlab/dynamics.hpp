#pragma once

// Euler-Maruyama integrators for the self-interacting diffusion
//   dX = sigma dB - (grad V(X) + grad W * mu_t (X)) dt,
// the frozen-measure diffusion Y (mu_t replaced by delta_m), and the
// zero-noise flow psi. X and psi share one update routine, so a zero-noise
// run of X reproduces psi bit for bit.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <vector>

#include "exitlab/error.hpp"
#include "exitlab/format.hpp"
#include "exitlab/measures.hpp"
#include "exitlab/point.hpp"
#include "exitlab/potentials.hpp"
#include "exitlab/rng.hpp"

namespace exitlab {

struct SimulationParams {
    double sigma = 0.0;
    double dt = 1e-3;
    /// Pre-drift window t0; non-positive means 10 * dt.
    double t_warmup = 0.0;
    double horizon_cap = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;
    std::size_t reservoir_capacity = EmpiricalMeasure<1>::kDefaultCapacity;
    /// Hard step budget applied on top of horizon_cap.
    std::int64_t max_steps = 1'000'000'000;

    double warmup() const noexcept { return t_warmup > 0.0 ? t_warmup : 10.0 * dt; }

    void validate() const {
        if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidParameter("sigma must be finite and >= 0");
        if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidParameter("dt must be positive");
        if (!(dt < warmup())) throw InvalidParameter("dt must be smaller than t_warmup");
        if (!(horizon_cap > 0.0)) throw InvalidParameter("horizon_cap must be positive");
        if (reservoir_capacity < 2) throw InvalidParameter("reservoir capacity must be at least 2");
        if (max_steps < 1) throw InvalidParameter("max_steps must be positive");
    }

    /// Steps needed to reach time t, clamped by max_steps.
    std::int64_t steps_for(double t) const {
        const double n = t / dt;
        if (!(n < static_cast<double>(max_steps))) return max_steps;
        return std::llround(n);
    }
};

/// Moment order k such that W_{2k} is the natural distance: half the largest
/// growth degree of V and W.
template <std::size_t Dim>
int wasserstein_half_order(const Potential<Dim>& V, const Potential<Dim>& W) {
    return std::max(1, std::max(V.growth_degree, W.growth_degree) / 2);
}

template <std::size_t Dim>
struct DiffusionState {
    using Pt = Point<Dim>;

    Pt position{};
    Pt start{};
    std::int64_t step = 0;
    double time = 0.0;
    EmpiricalMeasure<Dim> measure;
    ReplicaRng rng;

    /// Fresh state at x0. The occupation measure keeps exact moments around
    /// `reference` (usually the minimizer m) up to order 2 * moment_order.
    static DiffusionState start_at(const Pt& x0, const SimulationParams& params, std::uint64_t stream,
                                   const Pt& reference, int moment_order = 1) {
        if (!is_finite(x0)) throw InvalidParameter("initial position must be finite");
        return DiffusionState{x0, x0, 0, 0.0, EmpiricalMeasure<Dim>(params.reservoir_capacity, reference, moment_order),
                              ReplicaRng(params.seed, stream)};
    }
};

/// grad V(x) + grad W * mu_t(x), with mu_t read as delta_{x0} during warmup.
template <std::size_t Dim>
Point<Dim> self_interacting_drift(const DiffusionState<Dim>& s, const Potential<Dim>& V, const Potential<Dim>& W,
                                  double t_warmup) {
    if (s.time < t_warmup) return V.gradient(s.position) + W.gradient(s.position - s.start);
    return V.gradient(s.position) + convolved_gradient<Dim>(s.measure, W, s.position);
}

/// One Euler-Maruyama step with a caller-supplied standard Gaussian vector.
/// The occupation measure receives the pre-step position (Ito convention).
template <std::size_t Dim>
void step_self_interacting(DiffusionState<Dim>& s, const Potential<Dim>& V, const Potential<Dim>& W,
                           const SimulationParams& params, const Point<Dim>& noise) {
    const Point<Dim> drift = self_interacting_drift(s, V, W, params.warmup());
    s.measure.update(s.position, params.dt);
    Point<Dim> next = s.position - params.dt * drift;
    if (params.sigma != 0.0) next += (params.sigma * std::sqrt(params.dt)) * noise;
    ++s.step;
    s.time = static_cast<double>(s.step) * params.dt;
    if (!is_finite(next)) throw NumericalBlowup("self-interacting diffusion left the finite range", s.step);
    s.position = next;
}

/// Same step, drawing the increment from the state's own generator.
template <std::size_t Dim>
Point<Dim> step_self_interacting(DiffusionState<Dim>& s, const Potential<Dim>& V, const Potential<Dim>& W,
                                 const SimulationParams& params) {
    const Point<Dim> noise = params.sigma != 0.0 ? s.rng.template normal_vector<Dim>() : zero_point<Dim>();
    step_self_interacting(s, V, W, params, noise);
    return noise;
}

/// y <- y - (grad V(y) + grad W(y - m)) dt + sigma sqrt(dt) noise.
template <std::size_t Dim>
Point<Dim> step_frozen(const Point<Dim>& y, const Point<Dim>& m, const Potential<Dim>& V, const Potential<Dim>& W,
                       const SimulationParams& params, const Point<Dim>& noise, std::int64_t step_index = 0) {
    Point<Dim> next = y - params.dt * (V.gradient(y) + W.gradient(y - m));
    if (params.sigma != 0.0) next += (params.sigma * std::sqrt(params.dt)) * noise;
    if (!is_finite(next)) throw NumericalBlowup("frozen diffusion left the finite range", step_index);
    return next;
}

/// V(x) + sum_i w_i W(x - p_i): the Lyapunov functional of the non-explosion argument.
template <std::size_t Dim>
double lyapunov_energy(const Point<Dim>& x, const EmpiricalMeasure<Dim>& measure, const Potential<Dim>& V,
                       const Potential<Dim>& W) {
    if (measure.empty()) throw EmptyMeasure();
    return V.evaluate(x) + convolved_value<Dim>(measure, W, x);
}

template <std::size_t Dim>
double lyapunov_energy(const DiffusionState<Dim>& s, const Potential<Dim>& V, const Potential<Dim>& W) {
    return lyapunov_energy(s.position, s.measure, V, W);
}

template <std::size_t Dim>
struct FlowTrajectory {
    std::vector<double> times;
    std::vector<Point<Dim>> positions;
    EmpiricalMeasure<Dim> measure;
};

/// Explicit Euler on psi' = -grad V(psi) - (1/t) int_0^t grad W(psi_t - psi_s) ds,
/// with the same warmup rule and bookkeeping as the diffusion. Knots are
/// stored every `record_every` steps (and always at t = 0 and t = T);
/// `on_step` sees the full state after every step.
template <std::size_t Dim>
FlowTrajectory<Dim> integrate_flow(const Point<Dim>& x0, const Potential<Dim>& V, const Potential<Dim>& W,
                                   const SimulationParams& base, double T, std::int64_t record_every = 1,
                                   const std::function<void(const DiffusionState<Dim>&)>& on_step = {}) {
    if (!(T > base.dt)) throw InvalidParameter("flow horizon must exceed dt");
    if (record_every < 1) throw InvalidParameter("record_every must be positive");
    SimulationParams params = base;
    params.sigma = 0.0;
    params.validate();

    auto s = DiffusionState<Dim>::start_at(x0, params, 0, V.minimizer, wasserstein_half_order(V, W));
    const std::int64_t n = params.steps_for(T);
    FlowTrajectory<Dim> out{{0.0}, {x0}, EmpiricalMeasure<Dim>()};
    for (std::int64_t k = 0; k < n; ++k) {
        step_self_interacting(s, V, W, params, zero_point<Dim>());
        if (on_step) on_step(s);
        if (s.step % record_every == 0 || s.step == n) {
            out.times.push_back(s.time);
            out.positions.push_back(s.position);
        }
    }
    out.measure = std::move(s.measure);
    return out;
}

template <std::size_t Dim>
struct CoupledPair {
    bool shared_increments = true;
    DiffusionState<Dim> x;
    Point<Dim> y{};
    double coupling_start = 0.0;
    double sup_distance = 0.0;     // sup |X_t - Y_t| over the coupled window
    double sup_y_to_m = 0.0;       // sup |Y_t - m| over the coupled window
    bool identical_before_start = true;
};

/// Runs X alone until T_coupling_start, then X and Y = frozen diffusion with
/// the same Gaussian increments until T_end. `observer(t, x, y)` is called
/// after every step when provided.
template <std::size_t Dim>
CoupledPair<Dim> run_coupled(
    const SimulationParams& params, const Potential<Dim>& V, const Potential<Dim>& W, const Point<Dim>& m,
    const Point<Dim>& x0, double coupling_start, double t_end, std::uint64_t stream,
    const std::function<void(double, const Point<Dim>&, const Point<Dim>&)>& observer = {}) {
    params.validate();
    if (!(coupling_start <= t_end)) throw InvalidParameter("coupling start must not exceed T_end");
    if (!(t_end <= params.horizon_cap)) throw InvalidParameter("T_end exceeds horizon_cap");

    CoupledPair<Dim> pair{true, DiffusionState<Dim>::start_at(x0, params, stream, m, wasserstein_half_order(V, W)),
                          x0, coupling_start};
    const std::int64_t n_start = params.steps_for(coupling_start);
    const std::int64_t n_end = params.steps_for(t_end);
    auto& x = pair.x;
    while (x.step < n_start) {
        step_self_interacting(x, V, W, params);
        pair.y = x.position;
        pair.identical_before_start = pair.identical_before_start && (pair.y == x.position);
        if (observer) observer(x.time, x.position, pair.y);
    }
    pair.sup_y_to_m = norm(pair.y - m);
    while (x.step < n_end) {
        const Point<Dim> noise = params.sigma != 0.0 ? x.rng.template normal_vector<Dim>() : zero_point<Dim>();
        pair.y = step_frozen(pair.y, m, V, W, params, noise, x.step + 1);
        step_self_interacting(x, V, W, params, noise);
        pair.sup_distance = std::max(pair.sup_distance, norm(x.position - pair.y));
        pair.sup_y_to_m = std::max(pair.sup_y_to_m, norm(pair.y - m));
        if (observer) observer(x.time, x.position, pair.y);
    }
    return pair;
}

/// sup_{t <= T} |X_t - psi_t|^2 for one replica; X and psi advance in lockstep.
template <std::size_t Dim>
double sup_squared_distance_to_flow(const SimulationParams& params, const Potential<Dim>& V, const Potential<Dim>& W,
                                    const Point<Dim>& x0, double T, std::uint64_t stream) {
    params.validate();
    SimulationParams flow_params = params;
    flow_params.sigma = 0.0;
    const int k = wasserstein_half_order(V, W);
    auto x = DiffusionState<Dim>::start_at(x0, params, stream, V.minimizer, k);
    auto psi = DiffusionState<Dim>::start_at(x0, flow_params, stream, V.minimizer, k);
    const std::int64_t n = params.steps_for(T);
    double sup = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        step_self_interacting(x, V, W, params);
        step_self_interacting(psi, V, W, flow_params, zero_point<Dim>());
        sup = std::max(sup, squared_norm(x.position - psi.position));
    }
    return sup;
}

/// Decimated trajectory dump: t, x..., lyapunov_energy, reservoir_size.
template <std::size_t Dim>
class TrajectoryWriter {
public:
    TrajectoryWriter(std::ostream& out, std::int64_t stride) : out_(out), stride_(std::max<std::int64_t>(1, stride)) {
        out_ << "t,";
        for (std::size_t i = 0; i < Dim; ++i) out_ << "x" << i << ",";
        out_ << "lyapunov_energy,reservoir_size\n";
    }

    void maybe_record(const DiffusionState<Dim>& s, const Potential<Dim>& V, const Potential<Dim>& W) {
        if (s.step == 0 || s.step % stride_ != 0) return;
        put(out_, s.time) << ",";
        for (double c : s.position) put(out_, c) << ",";
        put(out_, lyapunov_energy(s, V, W)) << "," << s.measure.size() << "\n";
    }

private:
    std::ostream& out_;
    std::int64_t stride_;
};

}  // namespace exitlab
