#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "exitlab/exitlab.hpp"
#include "exitlab/gibbs.hpp"

using namespace exitlab;

namespace {

const auto Vq = make_quadratic<1>(1.0);
const auto Wq = make_quadratic<1>(1.0);
const Point<1> origin{0.0};

SimulationParams params_with(double sigma, double dt = 1e-3, std::uint64_t seed = 1) {
    SimulationParams p;
    p.sigma = sigma;
    p.dt = dt;
    p.seed = seed;
    return p;
}

ExitRecord<1> record_at(double x, bool capped = false) {
    ExitRecord<1> r;
    r.exit_point = {x};
    r.capped = capped;
    r.tau = 1.0;
    return r;
}

}  // namespace

TEST(ExitCost, LevelSetReturnsHeight) {
    const auto D = Domain<1>::level_set(Vq, Wq, origin, 1.0);
    EXPECT_EQ(exit_cost(D, Vq, Wq, origin), 1.0);
    const auto V2 = make_quartic_convex<2>(1.0, 1.0), W2 = make_quadratic<2>(0.5);
    const auto D2 = Domain<2>::level_set(V2, W2, {0.0, 0.0}, 0.8);
    EXPECT_NEAR(exit_cost(D2, V2, W2, {0.0, 0.0}), 0.8, 1e-10);
    for (const auto& b : D2.boundary_samples()) ASSERT_NEAR(D2.effective(b), 0.8, 1e-8);
}

TEST(ExitCost, AsymmetricInterval) {
    const auto D = Domain<1>::box({-1.0}, {2.0}, origin);
    EXPECT_NEAR(exit_cost(D, Vq, Wq, origin), 1.0, 1e-12);
}

TEST(ExitCost, BallRadialFormula) {
    for (double r : {0.5, 1.0, 1.7}) {
        const double rho = 1.0, alpha = 0.5;
        const auto V = make_quadratic<2>(rho, {0.3, -0.2}), W = make_quadratic<2>(alpha);
        const auto D = Domain<2>::ball({0.3, -0.2}, r);
        EXPECT_NEAR(exit_cost(D, V, W, {0.3, -0.2}), (rho + alpha) * r * r / 2.0, 1e-9);
        const auto D1 = Domain<1>::ball({0.0}, r);
        EXPECT_NEAR(exit_cost(D1, Vq, make_quadratic<1>(alpha), origin), (1.0 + alpha) * r * r / 2.0, 1e-12);
    }
}

TEST(ExitCost, EllipticalMinimumPolished) {
    // Box [-1, 1] x [-2, 2] with U = |x|^2: the inf is 1, at (+-1, 0).
    const auto V = make_quadratic<2>(1.0), W = make_quadratic<2>(1.0);
    const auto D = Domain<2>::box({-1.0, -2.0}, {1.0, 2.0}, Point<2>{0.0, 0.0});
    EXPECT_NEAR(exit_cost(D, V, W, {0.0, 0.0}), 1.0, 1e-10);
}

TEST(Domain, ConstructionErrors) {
    EXPECT_THROW(Domain<1>::level_set(Vq, Wq, origin, 0.0), InvalidDomain);
    EXPECT_THROW(Domain<1>::ball(origin, -1.0), InvalidDomain);
    EXPECT_THROW(Domain<1>::box({1.0}, {0.0}), InvalidDomain);
    EXPECT_THROW(Domain<1>::box({1.0}, {2.0}, origin), InvalidDomain);
    EXPECT_THROW(Domain<2>::predicate([](const Point<2>& x) { return x[1] > -1.0; }, {0.0, 0.0}), InvalidDomain);
}

TEST(Domain, OpenSetsAndInvariance) {
    const auto D = Domain<1>::box({-1.0}, {1.0}, origin);
    EXPECT_TRUE(D.contains({0.999}));
    EXPECT_FALSE(D.contains({1.0}));
    EXPECT_TRUE(D.positively_invariant(Vq, Wq, origin));
    const auto L = Domain<2>::level_set(make_quadratic<2>(1.0), make_quadratic<2>(1.0), {0.0, 0.0}, 1.0);
    EXPECT_TRUE(L.positively_invariant(make_quadratic<2>(1.0), make_quadratic<2>(1.0), {0.0, 0.0}));
    const auto off = Domain<1>::box({0.5}, {2.0}, Point<1>{1.0});
    EXPECT_FALSE(off.positively_invariant(Vq, Wq, origin));
}

TEST(Resize, IdentityAndEnlargedRadius) {
    const auto D = Domain<1>::level_set(Vq, Wq, origin, 1.0);
    const auto same = make_enlarged(D, 0.0);
    EXPECT_EQ(*same.domain.height(), 1.0);
    EXPECT_EQ(same.distance, 0.0);

    const auto big = make_enlarged(D, 1.0);
    EXPECT_DOUBLE_EQ(big.height, 1.5);
    EXPECT_NEAR(big.domain.boundary_along({1.0})[0], std::sqrt(1.5), 1e-8);
    EXPECT_NEAR(big.distance, std::sqrt(1.5) - 1.0, 1e-6);

    const auto ball = Domain<2>::ball({0.0, 0.0}, 1.0);
    const auto V2 = make_quadratic<2>(1.0), W2 = make_quadratic<2>(1.0);
    const auto e = make_enlarged(ball, V2, W2, {0.0, 0.0}, 1.0);
    EXPECT_NEAR(e.height, 1.5, 1e-9);
    EXPECT_NEAR(norm(e.domain.boundary_at_angle(0.7)), std::sqrt(1.5), 1e-8);
}

TEST(Resize, OrderingAndEmptyContraction) {
    const auto V2 = make_quartic_convex<2>(1.0, 1.0), W2 = make_quadratic<2>(0.5);
    const auto D = Domain<2>::box({-1.0, -1.5}, {1.2, 1.0}, Point<2>{0.0, 0.0});
    const double H = exit_cost(D, V2, W2, {0.0, 0.0});
    const auto c = make_contracted(D, V2, W2, {0.0, 0.0}, 0.4);
    const auto e = make_enlarged(D, V2, W2, {0.0, 0.0}, 0.4);
    EXPECT_LT(exit_cost(c.domain, V2, W2, {0.0, 0.0}), H);
    EXPECT_LT(H, exit_cost(e.domain, V2, W2, {0.0, 0.0}));
    EXPECT_NEAR(c.height, H - 0.2, 1e-9);
    EXPECT_NEAR(e.height, H + 0.2, 1e-9);

    const auto L = Domain<1>::level_set(Vq, Wq, origin, 1.0);
    EXPECT_THROW(make_contracted(L, 2.0), EmptyDomain);
    EXPECT_THROW(make_contracted(L, 3.0), EmptyDomain);
}

TEST(ExitTrial, StartOutside) {
    const auto D = Domain<1>::box({-1.0}, {1.0}, origin);
    const auto r = run_exit_trial(params_with(0.5), D, Vq, Wq, Point<1>{1.5});
    EXPECT_EQ(r.tau, 0.0);
    EXPECT_EQ(r.exit_point[0], 1.5);
    EXPECT_FALSE(r.capped);
}

TEST(ExitTrial, ZeroNoiseIsCapped) {
    const auto D = Domain<1>::level_set(Vq, Wq, origin, 1.0);
    auto p = params_with(0.0, 1e-3);
    p.horizon_cap = 5.0;
    for (auto process : {Process::self_interacting, Process::frozen}) {
        const auto r = run_exit_trial(p, D, Vq, Wq, Point<1>{0.9}, 0, process);
        EXPECT_TRUE(r.capped);
        EXPECT_EQ(r.tau, 5.0);
        EXPECT_EQ(r.steps, 5000);
    }
}

TEST(ExitTrial, RecordValidity) {
    const auto D = Domain<1>::box({-1.0}, {1.0}, origin);
    const auto p = params_with(0.8, 1e-3, 42);
    for (std::uint64_t s = 0; s < 50; ++s) {
        for (auto process : {Process::self_interacting, Process::frozen}) {
            const auto r = run_exit_trial(p, D, Vq, Wq, origin, s, process);
            ASSERT_FALSE(r.capped);
            EXPECT_TRUE(D.contains(r.last_inside));
            EXPECT_NEAR(std::abs(r.exit_point[0]), 1.0, 1e-9);
            EXPECT_NEAR(r.tau, static_cast<double>(r.steps) * p.dt, 1e-9);
        }
    }

    const auto V2 = make_quadratic<2>(1.0), W2 = make_quadratic<2>(1.0);
    const auto L = Domain<2>::level_set(V2, W2, {0.0, 0.0}, 0.5);
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto r = run_exit_trial(params_with(0.8, 1e-3, 7), L, V2, W2, {0.0, 0.0}, s);
        ASSERT_FALSE(r.capped);
        EXPECT_TRUE(L.contains(r.last_inside));
        EXPECT_NEAR(L.effective(r.exit_point), 0.5, 1e-8);
    }
}

TEST(ExitTrial, ScaledLogTimeNearExitCost) {
    const auto D = Domain<1>::box({-1.0}, {1.0}, origin);
    const double sigma = 0.6;
    const auto recs = parallel_map(200, 0, [&](std::size_t r) {
        return run_exit_trial(params_with(sigma, 1e-3, 2025), D, Vq, Wq, origin, r);
    });
    std::vector<double> scaled;
    for (const auto& r : recs) {
        ASSERT_FALSE(r.capped);
        scaled.push_back(0.5 * sigma * sigma * std::log(r.tau));
    }
    std::nth_element(scaled.begin(), scaled.begin() + 100, scaled.end());
    EXPECT_GE(scaled[100], 0.6);
    EXPECT_LE(scaled[100], 1.4);
}

TEST(ArrheniusScan, Preconditions) {
    const auto D = Domain<1>::box({-1.0}, {1.0}, origin);
    const auto p = params_with(0.0);
    EXPECT_THROW(arrhenius_scan(p, D, Vq, Wq, origin, {0.7, 0.6}), InvalidParameter);
    EXPECT_THROW(arrhenius_scan(p, D, Vq, Wq, origin, {0.7, 0.7, 0.6}), InvalidParameter);
    ScanOptions few;
    few.replicas = 49;
    EXPECT_THROW(arrhenius_scan(p, D, Vq, Wq, origin, {0.7, 0.6, 0.5}, few), InvalidParameter);
}

TEST(ArrheniusScan, AllCappedIsInsufficientData) {
    const auto D = Domain<1>::box({-1.0}, {1.0}, origin);
    auto p = params_with(0.0);
    p.horizon_cap = 0.01;
    ScanOptions o;
    o.replicas = 50;
    try {
        arrhenius_scan(p, D, Vq, Wq, origin, {0.3, 0.2, 0.1}, o);
        FAIL() << "expected insufficient data";
    } catch (const InsufficientData& e) {
        EXPECT_NE(std::string(e.what()).find("0.3"), std::string::npos);
    }
}

TEST(ArrheniusScan, InvariantUnderThreadCount) {
    const auto D = Domain<1>::box({-1.0}, {1.0}, origin);
    ScanOptions a, b;
    a.replicas = b.replicas = 60;
    a.threads = 1;
    b.threads = 4;
    const auto p = params_with(0.0, 1e-3, 99);
    const auto fa = arrhenius_scan(p, D, Vq, Wq, origin, {1.0, 0.9, 0.8}, a);
    const auto fb = arrhenius_scan(p, D, Vq, Wq, origin, {1.0, 0.9, 0.8}, b);
    ASSERT_EQ(fa.records.size(), fb.records.size());
    for (std::size_t i = 0; i < fa.records.size(); ++i) {
        ASSERT_EQ(fa.records[i].tau, fb.records[i].tau);
        ASSERT_EQ(fa.records[i].exit_point, fb.records[i].exit_point);
        ASSERT_EQ(fa.records[i].stream, fb.records[i].stream);
    }
    EXPECT_EQ(fa.slope, fb.slope);
    EXPECT_EQ(fa.half_width, fb.half_width);
}

TEST(ArrheniusScan, InWindowFractionIncreases) {
    const auto D = Domain<1>::box({-1.0}, {1.0}, origin);
    ScanOptions o;
    o.process = Process::frozen;
    o.delta = 0.3;
    const auto fit = arrhenius_scan(params_with(0.0, 1e-3, 5), D, Vq, Wq, origin, {0.8, 0.65, 0.5}, o);
    for (std::size_t i = 1; i < fit.levels.size(); ++i)
        EXPECT_GT(fit.levels[i].in_window_fraction, fit.levels[i - 1].in_window_fraction);
    EXPECT_EQ(fit.statistic, LawStatistic::median);
    EXPECT_EQ(fit.exit_cost, 1.0);
}

TEST(Stabilization, ConcentratedAtMinimizer) {
    const auto est = estimate_T_kappa<1>(params_with(1e-4), Vq, Wq, origin, 0.1, 20, 10.0);
    EXPECT_TRUE(est.reached);
    EXPECT_EQ(est.T_kappa, 0.0);
    EXPECT_EQ(est.order, 2);
    EXPECT_THROW(estimate_T_kappa<1>(params_with(0.1), Vq, Wq, origin, 0.1, 20, 5.0), InvalidParameter);
    EXPECT_THROW(estimate_T_kappa<1>(params_with(0.1), Vq, Wq, origin, 0.0, 20, 10.0), InvalidParameter);
}

TEST(Stabilization, UniformInSigma) {
    const auto a = estimate_T_kappa<1>(params_with(0.3, 1e-3, 8), Vq, Wq, origin, 0.5, 50, 20.0);
    const auto b = estimate_T_kappa<1>(params_with(0.15, 1e-3, 8), Vq, Wq, origin, 0.5, 50, 20.0);
    ASSERT_TRUE(a.reached);
    ASSERT_TRUE(b.reached);
    EXPECT_LE(std::abs(a.T_kappa - b.T_kappa), a.resolution);
}

TEST(Stabilization, CurveEndsNearFixedPointMoment) {
    const double sigma = 0.3, kappa = 0.5;
    const auto est = estimate_T_kappa<1>(params_with(sigma, 1e-3, 3), Vq, Wq, origin, kappa, 50, 30.0);
    const auto [rho, rep] = solve_fixed_point<1>(Vq, Wq, sigma);
    const double oracle = wasserstein_to_dirac<1>(rho, origin, 2);
    EXPECT_NEAR(oracle, sigma / 2.0, 1e-4);
    EXPECT_LE(est.curve.back(), oracle + kappa / 2.0);
}

TEST(PreStabilization, ZeroNoiseAndRefusals) {
    const auto D = Domain<1>::box({-1.0}, {1.0}, origin);
    EXPECT_EQ(pre_stabilization_exit_probability(params_with(0.0), D, Vq, Wq, Point<1>{0.5}, 5.0, 100), 0.0);
    EXPECT_THROW(pre_stabilization_exit_probability(params_with(0.2), D, Vq, Wq, Point<1>{1.5}, 5.0, 100),
                 FlowOrbitOutsideDomain);
    const auto off = Domain<1>::box({0.5}, {2.0}, Point<1>{1.0});
    EXPECT_THROW(pre_stabilization_exit_probability(params_with(0.2), off, Vq, Wq, Point<1>{1.0}, 5.0, 100),
                 InvalidDomain);
}

TEST(PreStabilization, ProbabilityInUnitInterval) {
    const auto D = Domain<1>::box({-1.0}, {1.0}, origin);
    const double p = pre_stabilization_exit_probability(params_with(0.6, 1e-3, 4), D, Vq, Wq, Point<1>{0.5}, 5.0, 100);
    EXPECT_GT(p, 0.0);
    EXPECT_LE(p, 1.0);
}

TEST(ExitLocation, SymmetricInterval) {
    const auto D = Domain<1>::box({-1.0}, {1.0}, origin);
    const auto recs = parallel_map(400, 0, [&](std::size_t r) {
        return run_exit_trial(params_with(0.5, 1e-3, 31), D, Vq, Wq, origin, r);
    });
    const auto h = exit_location_histogram(recs, D, Vq, Wq, origin, half_line_arcs(origin));
    ASSERT_EQ(h.arcs.size(), 2u);
    EXPECT_NEAR(h.arcs[0].frequency, 0.5, 0.1);
    EXPECT_NEAR(h.arcs[1].frequency, 0.5, 0.1);
    EXPECT_NEAR(h.arcs[0].frequency + h.arcs[1].frequency, 1.0, 1e-12);
    EXPECT_NEAR(h.arcs[0].min_cost, 1.0, 1e-12);
    EXPECT_FALSE(h.arcs[1].high_cost);
}

TEST(ExitLocation, HighCostArcAndCoverage) {
    const auto D = Domain<1>::box({-1.0}, {2.0}, origin);
    std::vector<ExitRecord<1>> recs{record_at(-1.0), record_at(-1.0), record_at(-1.0), record_at(2.0),
                                    record_at(0.0, true)};
    const auto h = exit_location_histogram(recs, D, Vq, Wq, origin, half_line_arcs(origin));
    EXPECT_EQ(h.used, 4u);
    EXPECT_EQ(h.capped, 1u);
    EXPECT_DOUBLE_EQ(h.arcs[0].frequency, 0.75);
    EXPECT_DOUBLE_EQ(h.arcs[1].frequency, 0.25);
    EXPECT_NEAR(h.arcs[1].min_cost, 4.0, 1e-12);
    EXPECT_TRUE(h.arcs[1].high_cost);
    EXPECT_FALSE(h.arcs[0].high_cost);

    recs.push_back(record_at(0.0));
    EXPECT_THROW(exit_location_histogram(recs, D, Vq, Wq, origin, half_line_arcs(origin)), PartitionCoverage);
}

TEST(ExitLocation, AngularArcsPartitionCircle) {
    const auto arcs = angular_arcs({0.0, 0.0}, 8);
    const auto ball = Domain<2>::ball({0.0, 0.0}, 1.0);
    for (const auto& b : ball.boundary_samples(4096)) {
        int hits = 0;
        for (const auto& a : arcs) hits += a.contains(b) ? 1 : 0;
        ASSERT_EQ(hits, 1);
    }
}
