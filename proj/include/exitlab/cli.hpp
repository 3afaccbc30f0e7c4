#pragma once

// JSON experiment configs and the subcommands of the exitlab tool. Every
// subcommand is a function of (config, seed); outputs carry the hash of the
// effective config.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "exitlab/dynamics.hpp"
#include "exitlab/error.hpp"
#include "exitlab/exitlab.hpp"
#include "exitlab/format.hpp"
#include "exitlab/gibbs.hpp"
#include "exitlab/measures.hpp"
#include "exitlab/parallel.hpp"
#include "exitlab/potentials.hpp"

namespace exitlab::cli {

using json = nlohmann::json;

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// A parsed config that remembers its source text so that validation errors
/// can point at a line.
class Config {
public:
    static Config parse(const std::string& text, const std::string& origin = "config") {
        Config c;
        c.text_ = text;
        c.origin_ = origin;
        try {
            c.doc_ = json::parse(text);
        } catch (const json::parse_error& e) {
            const auto [line, col] = c.position(e.byte);
            throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON (" +
                              e.what() + ")");
        }
        if (!c.doc_.is_object()) throw ConfigError(origin + ":1:1: top level must be a JSON object");
        return c;
    }

    static Config load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file " + path.string());
        std::stringstream ss;
        ss << in.rdbuf();
        return parse(ss.str(), path.string());
    }

    json& doc() { return doc_; }
    const json& doc() const { return doc_; }
    bool has(const std::string& key) const { return doc_.contains(key) && !doc_.at(key).is_null(); }

    /// 1-based line of the first occurrence of "key" in the source (after
    /// the first occurrence of "parent" when given), 0 if absent.
    int line_of(const std::string& key, const std::string& parent = {}) const {
        std::size_t from = 0;
        if (!parent.empty()) {
            from = text_.find("\"" + parent + "\"");
            if (from == std::string::npos) from = 0;
        }
        const auto at = text_.find("\"" + key + "\"", from);
        if (at == std::string::npos) return 0;
        return static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(at), '\n')) + 1;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& msg, const std::string& parent = {}) const {
        const int line = line_of(key, parent);
        const std::string name = parent.empty() ? key : parent + "." + key;
        throw ConfigError(origin_ + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": '" + name + "' " + msg);
    }

    template <class T>
    T get(const json& node, const std::string& key, const T& fallback) const {
        if (!node.contains(key) || node.at(key).is_null()) return fallback;
        return convert<T>(node.at(key), key);
    }

    template <class T>
    T require(const json& node, const std::string& key) const {
        if (!node.contains(key) || node.at(key).is_null()) fail(key, "is required");
        return convert<T>(node.at(key), key);
    }

    template <class T>
    T get(const std::string& key, const T& fallback) const { return get<T>(doc_, key, fallback); }
    template <class T>
    T require(const std::string& key) const { return require<T>(doc_, key); }

    template <std::size_t Dim>
    Point<Dim> point(const json& node, const std::string& key) const {
        Point<Dim> p{};
        if (node.is_number() && Dim == 1) {
            p[0] = node.get<double>();
            return p;
        }
        if (!node.is_array() || node.size() != Dim)
            fail(key, "must be an array of " + std::to_string(Dim) + " numbers");
        for (std::size_t i = 0; i < Dim; ++i) {
            if (!node[i].is_number()) fail(key, "must contain numbers only");
            p[i] = node[i].get<double>();
        }
        return p;
    }

    template <std::size_t Dim>
    Point<Dim> point(const json& parent, const std::string& key, const Point<Dim>& fallback) const {
        if (!parent.contains(key) || parent.at(key).is_null()) return fallback;
        return point<Dim>(parent.at(key), key);
    }

    /// FNV-1a of the canonical dump (sorted keys), excluding the output location.
    std::string hash() const {
        json copy = doc_;
        copy.erase("out_dir");
        std::ostringstream os;
        os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(copy.dump());
        return os.str();
    }

    const std::string& origin() const { return origin_; }

private:
    template <class T>
    T convert(const json& v, const std::string& key) const {
        try {
            return v.get<T>();
        } catch (const json::exception&) {
            fail(key, "has the wrong type");
        }
    }

    std::pair<int, int> position(std::size_t byte) const {
        int line = 1, col = 1;
        const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text_.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (text_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        return {line, col};
    }

    json doc_;
    std::string text_;
    std::string origin_;
};

struct RunOptions {
    std::filesystem::path out_dir = "out";
    int threads = 0;
    bool allow_unverified = false;
    std::ostream* log = &std::cout;
};

template <std::size_t Dim>
Potential<Dim> parse_potential(const Config& cfg, const std::string& key) {
    if (!cfg.has(key)) cfg.fail(key, "is required");
    const json& node = cfg.doc().at(key);
    if (!node.is_object()) cfg.fail(key, "must be an object");
    const auto kind = cfg.require<std::string>(node, "kind");
    const auto m = cfg.point<Dim>(node, "minimizer", zero_point<Dim>());
    try {
        if (kind == "quadratic") return make_quadratic<Dim>(cfg.require<double>(node, "strength"), m);
        if (kind == "quartic_convex") {
            const double rho = node.contains("rho") ? cfg.require<double>(node, "rho") : cfg.require<double>(node, "strength");
            return make_quartic_convex<Dim>(rho, cfg.get<double>(node, "beta", 0.0), m);
        }
    } catch (const InvalidParameter& e) {
        cfg.fail(key, e.what());
    }
    cfg.fail("kind", "must be \"quadratic\" or \"quartic_convex\", got \"" + kind + "\"", key);
}

template <std::size_t Dim>
Domain<Dim> parse_domain(const Config& cfg, const Potential<Dim>& V, const Potential<Dim>& W) {
    if (!cfg.has("domain")) cfg.fail("domain", "is required");
    const json& node = cfg.doc().at("domain");
    const auto kind = cfg.require<std::string>(node, "kind");
    const Point<Dim> m = V.minimizer;
    try {
        if (kind == "box")
            return Domain<Dim>::box(cfg.point<Dim>(node.at("lo"), "lo"), cfg.point<Dim>(node.at("hi"), "hi"), m);
        if (kind == "ball")
            return Domain<Dim>::ball(cfg.point<Dim>(node, "center", m), cfg.require<double>(node, "radius"));
        if (kind == "level_set") return Domain<Dim>::level_set(V, W, m, cfg.require<double>(node, "height"));
    } catch (const json::out_of_range&) {
        cfg.fail("domain", "box needs both \"lo\" and \"hi\"");
    } catch (const InvalidDomain& e) {
        cfg.fail("domain", e.what());
    }
    cfg.fail("kind", "must be \"box\", \"ball\" or \"level_set\", got \"" + kind + "\"", "domain");
}

inline SimulationParams parse_params(const Config& cfg) {
    SimulationParams p;
    p.sigma = cfg.get<double>("sigma", 0.0);
    p.dt = cfg.get<double>("dt", 1e-3);
    p.t_warmup = cfg.get<double>("t_warmup", 0.0);
    p.horizon_cap = cfg.get<double>("horizon_cap", std::numeric_limits<double>::infinity());
    p.seed = cfg.get<std::uint64_t>("seed", 0);
    p.reservoir_capacity = cfg.get<std::size_t>("reservoir_capacity", EmpiricalMeasure<1>::kDefaultCapacity);
    p.max_steps = cfg.get<std::int64_t>("max_steps", 1'000'000'000);
    try {
        p.validate();
    } catch (const InvalidParameter& e) {
        const std::string msg = e.what();
        const std::string key = msg.find("sigma") != std::string::npos       ? "sigma"
                                : msg.find("warmup") != std::string::npos    ? "t_warmup"
                                : msg.find("dt") != std::string::npos        ? "dt"
                                : msg.find("horizon") != std::string::npos   ? "horizon_cap"
                                : msg.find("reservoir") != std::string::npos ? "reservoir_capacity"
                                                                             : "max_steps";
        cfg.fail(key, msg);
    }
    return p;
}

inline std::vector<double> parse_ladder(const Config& cfg) {
    std::vector<double> ladder;
    if (cfg.has("sigma_ladder")) {
        ladder = cfg.require<std::vector<double>>("sigma_ladder");
        if (ladder.empty()) cfg.fail("sigma_ladder", "must not be empty");
    } else if (cfg.has("sigma")) {
        ladder = {cfg.require<double>("sigma")};
    } else {
        cfg.fail("sigma_ladder", "is required");
    }
    return ladder;
}

/// Opens out_dir/name and writes the config-hash comment line.
inline std::ofstream open_csv(const Config& cfg, const RunOptions& opt, const std::string& name) {
    std::filesystem::create_directories(opt.out_dir);
    std::ofstream out(opt.out_dir / name);
    if (!out) throw ConfigError("cannot write " + (opt.out_dir / name).string());
    out << "# config_hash=" << cfg.hash() << "\n";
    return out;
}

inline void write_json(const Config& cfg, const RunOptions& opt, const std::string& name, json j) {
    std::filesystem::create_directories(opt.out_dir);
    j["config_hash"] = cfg.hash();
    std::ofstream out(opt.out_dir / name);
    if (!out) throw ConfigError("cannot write " + (opt.out_dir / name).string());
    out << j.dump(2) << "\n";
}

template <std::size_t Dim>
json to_json(const Point<Dim>& p) {
    return json(std::vector<double>(p.begin(), p.end()));
}

template <std::size_t Dim>
struct Experiment {
    Potential<Dim> V;
    Potential<Dim> W;
    Point<Dim> x0{};
    SimulationParams params;
};

/// Potentials, x0 and integrator settings, gated by the hypothesis check.
template <std::size_t Dim>
Experiment<Dim> load_experiment(const Config& cfg, const RunOptions& opt) {
    Experiment<Dim> e{parse_potential<Dim>(cfg, "V"), parse_potential<Dim>(cfg, "W"), {}, parse_params(cfg)};
    e.x0 = cfg.point<Dim>(cfg.doc(), "x0", e.V.minimizer);
    if (!opt.allow_unverified) {
        Box<Dim> box;
        for (std::size_t i = 0; i < Dim; ++i) {
            box.lo[i] = e.V.minimizer[i] - 5.0;
            box.hi[i] = e.V.minimizer[i] + 5.0;
        }
        const auto rep = check_hypotheses(e.V, e.W, box, 1000, e.params.seed);
        if (!rep.all_passed()) {
            std::string failed;
            rep.for_each([&](const auto& c) {
                if (!c.passed) failed += (failed.empty() ? "" : ", ") + c.name;
            });
            cfg.fail("V", "and W fail the hypothesis check (" + failed + "); pass --allow-unverified to run anyway");
        }
    }
    return e;
}

template <std::size_t Dim>
int cmd_simulate(const Config& cfg, const RunOptions& opt) {
    auto e = load_experiment<Dim>(cfg, opt);
    const double T = cfg.require<double>("T");
    if (!(T > e.params.dt)) cfg.fail("T", "must exceed dt");
    const auto stride = cfg.get<std::int64_t>("record_stride", 100);
    if (stride < 1) cfg.fail("record_stride", "must be positive");
    const int k = wasserstein_half_order(e.V, e.W);
    const Point<Dim> m = e.V.minimizer;

    auto out = open_csv(cfg, opt, "trajectory.csv");
    TrajectoryWriter<Dim> writer(out, stride);
    auto s = DiffusionState<Dim>::start_at(e.x0, e.params, 0, m, k);
    const std::int64_t n = e.params.steps_for(T);
    while (s.step < n) {
        step_self_interacting(s, e.V, e.W, e.params);
        writer.maybe_record(s, e.V, e.W);
    }
    const double dist = wasserstein_to_dirac<Dim>(s.measure, m, 2 * k);
    write_json(cfg, opt, "summary.json",
               {{"t", s.time},
                {"steps", s.step},
                {"sigma", e.params.sigma},
                {"position", to_json(s.position)},
                {"lyapunov_energy", lyapunov_energy(s, e.V, e.W)},
                {"wasserstein_order", 2 * k},
                {"distance_to_minimizer_dirac", dist},
                {"reservoir_size", s.measure.size()}});
    *opt.log << "simulate: t = " << s.time << ", W_" << 2 * k << "(mu_t, delta_m) = " << dist << "\n";
    return 0;
}

template <std::size_t Dim>
int cmd_flow_compare(const Config& cfg, const RunOptions& opt) {
    auto e = load_experiment<Dim>(cfg, opt);
    const double T = cfg.require<double>("T");
    if (!(T > e.params.dt)) cfg.fail("T", "must exceed dt");
    const auto ladder = parse_ladder(cfg);
    const auto replicas = cfg.get<std::size_t>("replicas", 200);
    if (replicas < 1) cfg.fail("replicas", "must be positive");
    const auto stride = cfg.get<std::int64_t>("record_stride", 100);
    if (stride < 1) cfg.fail("record_stride", "must be positive");

    {
        auto flow_out = open_csv(cfg, opt, "flow.csv");
        TrajectoryWriter<Dim> writer(flow_out, stride);
        integrate_flow<Dim>(e.x0, e.V, e.W, e.params, T, stride,
                            [&](const DiffusionState<Dim>& s) { writer.maybe_record(s, e.V, e.W); });
    }

    auto out = open_csv(cfg, opt, "closeness.csv");
    out << "sigma,replicas,mean_sup_sq_distance,ratio_to_previous\n";
    double prev = std::numeric_limits<double>::quiet_NaN();
    const unsigned threads = resolve_threads(opt.threads);
    for (double sigma : ladder) {
        if (!(sigma >= 0.0)) cfg.fail("sigma_ladder", "entries must be >= 0");
        SimulationParams p = e.params;
        p.sigma = sigma;
        const auto sups = parallel_map(replicas, threads, [&](std::size_t r) {
            return sup_squared_distance_to_flow<Dim>(p, e.V, e.W, e.x0, T, r);
        });
        CompensatedSum acc;
        for (double v : sups) acc.add(v);
        const double mean = acc.value() / static_cast<double>(replicas);
        put(out, sigma) << "," << replicas << ",";
        put(out, mean) << ",";
        put(out, prev / mean) << "\n";
        *opt.log << "flow-compare: sigma = " << sigma << ", mean sup |X - psi|^2 = " << mean << "\n";
        prev = mean;
    }
    return 0;
}

template <std::size_t Dim>
json location_json(const ExitLocationHistogram& h) {
    json arcs = json::array();
    for (const auto& a : h.arcs)
        arcs.push_back({{"arc", a.name},
                        {"count", a.count},
                        {"frequency", a.frequency},
                        {"min_cost", a.min_cost},
                        {"high_cost", a.high_cost}});
    return {{"used", h.used}, {"capped", h.capped}, {"arcs", arcs}};
}

template <std::size_t Dim>
int cmd_exit_scan(const Config& cfg, const RunOptions& opt) {
    auto e = load_experiment<Dim>(cfg, opt);
    const auto domain = parse_domain<Dim>(cfg, e.V, e.W);
    if (!cfg.has("sigma_ladder")) cfg.fail("sigma_ladder", "is required");
    const auto ladder = parse_ladder(cfg);

    ScanOptions so;
    so.replicas = cfg.get<std::size_t>("replicas", 200);
    so.delta = cfg.get<double>("delta", 0.3);
    so.threads = opt.threads;
    const auto process = cfg.get<std::string>("process", "self_interacting");
    if (process == "frozen") so.process = Process::frozen;
    else if (process != "self_interacting") cfg.fail("process", "must be \"self_interacting\" or \"frozen\"");
    const auto statistic = cfg.get<std::string>("statistic", "median");
    if (statistic == "mean") so.statistic = LawStatistic::mean;
    else if (statistic != "median") cfg.fail("statistic", "must be \"median\" or \"mean\"");
    so.on_level = [&](double sigma) { *opt.log << "exit-scan: finished sigma = " << sigma << "\n"; };

    ArrheniusFit<Dim> fit;
    try {
        fit = arrhenius_scan<Dim>(e.params, domain, e.V, e.W, e.x0, ladder, so);
    } catch (const InvalidParameter& err) {
        const std::string msg = err.what();
        cfg.fail(msg.find("replicas") != std::string::npos ? "replicas" : "sigma_ladder", msg);
    }

    auto out = open_csv(cfg, opt, "records.csv");
    out << "sigma,seed,stream,tau,";
    for (std::size_t i = 0; i < Dim; ++i) out << "exit_x" << i << ",";
    out << "capped,steps\n";
    for (const auto& r : fit.records) {
        put(out, r.sigma) << "," << r.seed << "," << r.stream << ",";
        put(out, r.tau) << ",";
        for (double c : r.exit_point) put(out, c) << ",";
        out << (r.capped ? 1 : 0) << "," << r.steps << "\n";
    }

    std::vector<BoundaryArc<Dim>> arcs;
    if constexpr (Dim == 1) arcs = half_line_arcs(e.V.minimizer);
    else arcs = angular_arcs(e.V.minimizer, 8);
    json levels = json::array();
    std::size_t offset = 0;
    for (const auto& l : fit.levels) {
        std::vector<ExitRecord<Dim>> recs(fit.records.begin() + static_cast<std::ptrdiff_t>(offset),
                                          fit.records.begin() + static_cast<std::ptrdiff_t>(offset + l.records));
        offset += l.records;
        levels.push_back({{"sigma", l.sigma},
                          {"records", l.records},
                          {"capped", l.capped},
                          {"mean_log_tau", l.mean_log_tau},
                          {"median_tau", l.median_tau},
                          {"mean_scaled_log_tau", l.mean_scaled},
                          {"median_scaled_log_tau", l.median_scaled},
                          {"sd_log_tau", l.sd_log_tau},
                          {"in_window_fraction", l.in_window_fraction},
                          {"exit_location",
                           location_json<Dim>(exit_location_histogram(recs, domain, e.V, e.W, e.V.minimizer, arcs))}});
    }
    write_json(cfg, opt, "fit.json",
               {{"sigma_ladder", fit.sigmas},
                {"process", process_name(fit.process)},
                {"statistic", statistic_name(fit.statistic)},
                {"exit_cost", fit.exit_cost},
                {"delta", fit.delta},
                {"slope", fit.slope},
                {"intercept", fit.intercept},
                {"half_width", fit.half_width},
                {"levels", levels}});
    *opt.log << "exit-scan: slope = " << fit.slope << " +- " << fit.half_width << " (H = " << fit.exit_cost << ")\n";
    return 0;
}

template <std::size_t Dim>
int cmd_gibbs(const Config& cfg, const RunOptions& opt) {
    auto e = load_experiment<Dim>(cfg, opt);
    const double sigma = cfg.require<double>("sigma");
    if (!(sigma > 0.0)) cfg.fail("sigma", "must be positive for the equilibrium map");
    GridSpec<Dim> grid;
    FixedPointOptions<Dim> fp;
    if (cfg.has("grid")) {
        const json& g = cfg.doc().at("grid");
        grid.spacing = cfg.get<double>(g, "spacing", grid.spacing);
        if (!(grid.spacing > 0.0)) cfg.fail("spacing", "must be positive");
        if (g.contains("lo") || g.contains("hi"))
            grid.bounds = Box<Dim>{cfg.point<Dim>(g.at("lo"), "lo"), cfg.point<Dim>(g.at("hi"), "hi")};
    }
    fp.damping = cfg.get<double>("damping", fp.damping);
    fp.tol = cfg.get<double>("tol", fp.tol);
    fp.max_iter = cfg.get<int>("max_iter", fp.max_iter);
    if (!(fp.damping > 0.0 && fp.damping <= 1.0)) cfg.fail("damping", "must lie in (0, 1]");
    if (!(fp.tol > 0.0)) cfg.fail("tol", "must be positive");
    if (fp.max_iter < 1) cfg.fail("max_iter", "must be positive");

    auto [rho, rep] = solve_fixed_point<Dim>(e.V, e.W, sigma, grid, fp);
    auto out = open_csv(cfg, opt, "density.csv");
    write_density_csv(out, rho);
    write_json(cfg, opt, "report.json",
               {{"iterations", rep.iterations},
                {"residual", rep.residual},
                {"damping", rep.damping},
                {"converged", rep.converged},
                {"weighted_residual", rep.weighted_residual},
                {"residual_history", rep.residual_history},
                {"mean", to_json(rho.mean())},
                {"free_energy", free_energy(rho, e.V, e.W, sigma)}});
    *opt.log << "gibbs: converged in " << rep.iterations << " iterations, residual " << rep.residual << "\n";
    return 0;
}

template <std::size_t Dim>
int cmd_coupling_check(const Config& cfg, const RunOptions& opt) {
    auto e = load_experiment<Dim>(cfg, opt);
    const double start = cfg.require<double>("coupling_start");
    const double end = cfg.require<double>("T_end");
    if (!(start >= 0.0 && start <= end)) cfg.fail("coupling_start", "must lie in [0, T_end]");
    const auto replicas = cfg.get<std::size_t>("replicas", 100);
    if (replicas < 1) cfg.fail("replicas", "must be positive");
    const double threshold = cfg.get<double>("threshold", 0.5);
    const Point<Dim> m = e.V.minimizer;

    const auto pairs = parallel_map(replicas, resolve_threads(opt.threads), [&](std::size_t r) {
        const auto c = run_coupled<Dim>(e.params, e.V, e.W, m, e.x0, start, end, r);
        return std::pair{c.sup_distance, c.sup_y_to_m};
    });
    auto out = open_csv(cfg, opt, "coupling.csv");
    out << "replica,sup_distance,sup_y_to_m\n";
    std::vector<double> d;
    std::size_t below = 0;
    for (std::size_t r = 0; r < pairs.size(); ++r) {
        out << r << ",";
        put(out, pairs[r].first) << ",";
        put(out, pairs[r].second) << "\n";
        d.push_back(pairs[r].first);
        if (pairs[r].first <= threshold) ++below;
    }
    std::sort(d.begin(), d.end());
    const auto idx = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(d.size()))) - 1;
    *opt.log << "coupling-check: " << below << "/" << replicas << " replicas with sup |X - Y| <= " << threshold
             << ", 95th percentile " << d[idx] << "\n";
    return 0;
}

template <std::size_t Dim>
int cmd_check_hypotheses(const Config& cfg, const RunOptions& opt) {
    const auto V = parse_potential<Dim>(cfg, "V");
    const auto W = parse_potential<Dim>(cfg, "W");
    Box<Dim> box;
    for (std::size_t i = 0; i < Dim; ++i) {
        box.lo[i] = V.minimizer[i] - 5.0;
        box.hi[i] = V.minimizer[i] + 5.0;
    }
    if (cfg.has("hypothesis_box")) {
        const json& b = cfg.doc().at("hypothesis_box");
        box.lo = cfg.point<Dim>(b, "lo", box.lo);
        box.hi = cfg.point<Dim>(b, "hi", box.hi);
    }
    const auto samples = cfg.get<std::size_t>("hypothesis_samples", 1000);
    HypothesisReport<Dim> rep;
    try {
        rep = check_hypotheses(V, W, box, samples, cfg.get<std::uint64_t>("seed", 0));
    } catch (const InvalidParameter& e) {
        cfg.fail(cfg.has("hypothesis_box") ? "hypothesis_box" : "hypothesis_samples", e.what());
    }
    auto out = open_csv(cfg, opt, "hypotheses.csv");
    out << "condition,passed,worst_margin";
    for (std::size_t i = 0; i < Dim; ++i) out << ",witness_x" << i;
    out << "\n";
    rep.for_each([&](const auto& c) {
        out << c.name << "," << (c.passed ? 1 : 0) << ",";
        put(out, c.worst_margin);
        for (double x : c.witness) put(out << ",", x);
        out << "\n";
        *opt.log << "check-hypotheses: " << c.name << (c.passed ? " passed" : " FAILED") << " (margin "
                 << c.worst_margin << ")\n";
    });
    return 0;
}

/// Dispatches `name` on the config's dimension.
inline int run_subcommand(const std::string& name, const Config& cfg, const RunOptions& opt) {
    const int dim = cfg.get<int>("dimension", 1);
    auto dispatch = [&]<std::size_t Dim>() -> int {
        if (name == "simulate") return cmd_simulate<Dim>(cfg, opt);
        if (name == "flow-compare") return cmd_flow_compare<Dim>(cfg, opt);
        if (name == "exit-scan") return cmd_exit_scan<Dim>(cfg, opt);
        if (name == "gibbs") return cmd_gibbs<Dim>(cfg, opt);
        if (name == "coupling-check") return cmd_coupling_check<Dim>(cfg, opt);
        if (name == "check-hypotheses") return cmd_check_hypotheses<Dim>(cfg, opt);
        throw ConfigError("unknown subcommand " + name);
    };
    if (dim == 1) return dispatch.template operator()<1>();
    if (dim == 2) return dispatch.template operator()<2>();
    cfg.fail("dimension", "must be 1 or 2");
}

}  // namespace exitlab::cli
