#include <gtest/gtest.h>

#include <cmath>

#include "exitlab/potentials.hpp"
#include "exitlab/rng.hpp"

using namespace exitlab;

namespace {

template <std::size_t Dim>
std::vector<Potential<Dim>> builtins() {
    Point<Dim> m{};
    m[0] = 0.7;
    return {make_quadratic<Dim>(1.0), make_quadratic<Dim>(2.5, m), make_quartic_convex<Dim>(1.0, 0.0),
            make_quartic_convex<Dim>(0.5, 1.0, m), make_quartic_convex<Dim>(2.0, 0.3)};
}

template <std::size_t Dim>
Point<Dim> draw(ReplicaRng& rng, double half_width) {
    Point<Dim> x{};
    for (auto& c : x) c = (2.0 * rng.uniform() - 1.0) * half_width;
    return x;
}

template <std::size_t Dim>
void check_gradient_consistency() {
    ReplicaRng rng(17, Dim);
    for (const auto& p : builtins<Dim>()) {
        for (int i = 0; i < 1000; ++i) {
            const auto x = draw<Dim>(rng, 5.0);
            const auto g = p.gradient(x);
            for (std::size_t k = 0; k < Dim; ++k) {
                auto xp = x, xm = x;
                xp[k] += 1e-4;
                xm[k] -= 1e-4;
                const double fd = (p.evaluate(xp) - p.evaluate(xm)) / 2e-4;
                ASSERT_LE(std::abs(fd - g[k]), 1e-5 * std::max(1.0, std::abs(g[k]))) << "x = " << x[0];
            }
        }
    }
}

template <std::size_t Dim>
void check_monotone_gradient() {
    ReplicaRng rng(29, Dim);
    for (const auto& p : builtins<Dim>()) {
        for (int i = 0; i < 1000; ++i) {
            const auto x = draw<Dim>(rng, 5.0), y = draw<Dim>(rng, 5.0);
            const double lhs = dot(p.gradient(x) - p.gradient(y), x - y);
            ASSERT_GE(lhs, p.convexity_lower_bound * squared_norm(x - y) - 1e-8);
        }
    }
}

}  // namespace

TEST(Quadratic, Examples) {
    const auto q = make_quadratic<1>(1.0, {0.0});
    EXPECT_EQ(q.evaluate({0.0}), 0.0);
    EXPECT_EQ(q.gradient({1.0})[0], 1.0);
    EXPECT_DOUBLE_EQ(make_quadratic<1>(2.0, {1.0}).evaluate({3.0}), 4.0);
    EXPECT_EQ(q.convexity_lower_bound, 1.0);
    EXPECT_EQ(q.growth_degree, 2);
}

TEST(Quadratic, RejectsNonPositiveStrength) {
    EXPECT_THROW(make_quadratic<1>(0.0), InvalidParameter);
    EXPECT_THROW(make_quadratic<1>(-1.0), InvalidParameter);
    EXPECT_THROW(make_quadratic<2>(std::nan("")), InvalidParameter);
}

TEST(QuarticConvex, Examples) {
    const auto q = make_quartic_convex<1>(1.0, 0.0, {0.0});
    const auto r = make_quadratic<1>(1.0, {0.0});
    for (double x = -4.0; x <= 4.0; x += 0.125) EXPECT_EQ(q.evaluate({x}), r.evaluate({x}));
    EXPECT_EQ(make_quartic_convex<2>(1.0, 1.0, {0.3, -0.2}).gradient({0.3, -0.2}), (Point<2>{0.0, 0.0}));
    EXPECT_DOUBLE_EQ(make_quartic_convex<1>(1.0, 1.0, {0.0}).evaluate({2.0}), 6.0);
    EXPECT_EQ(make_quartic_convex<1>(1.0, 1.0).growth_degree, 4);
    EXPECT_THROW(make_quartic_convex<1>(0.0, 1.0), InvalidParameter);
    EXPECT_THROW(make_quartic_convex<1>(1.0, -1.0), InvalidParameter);
}

TEST(Potentials, GradientMatchesFiniteDifferences1D) { check_gradient_consistency<1>(); }
TEST(Potentials, GradientMatchesFiniteDifferences2D) { check_gradient_consistency<2>(); }
TEST(Potentials, StrongMonotonicity1D) { check_monotone_gradient<1>(); }
TEST(Potentials, StrongMonotonicity2D) { check_monotone_gradient<2>(); }

TEST(Potentials, GradientVanishesAtMinimizer) {
    for (const auto& p : builtins<2>()) EXPECT_LE(norm(p.gradient(p.minimizer)), 1e-10);
    for (const auto& p : builtins<1>()) EXPECT_LE(norm(p.gradient(p.minimizer)), 1e-10);
}

TEST(Potentials, HessianOfQuartic) {
    const auto q = make_quartic_convex<2>(1.0, 2.0);
    const auto h = q.hessian({1.0, 0.0});
    // rho I + beta (|u|^2 I + 2 u u^T)
    EXPECT_NEAR(h[0][0], 1.0 + 2.0 * 3.0, 1e-12);
    EXPECT_NEAR(h[1][1], 1.0 + 2.0 * 1.0, 1e-12);
    EXPECT_NEAR(h[0][1], 0.0, 1e-12);
    EXPECT_NEAR(q.laplacian({1.0, 0.0}), 10.0, 1e-12);
}

TEST(Potentials, CustomFallsBackToFiniteDifferences) {
    const auto c = make_custom<1>([](const Point<1>& x) { return std::cosh(x[0]) - 1.0; }, {}, 1.0, {0.0}, 2, 1.0, 1.0);
    EXPECT_NEAR(c.gradient({0.5})[0], std::sinh(0.5), 1e-7);
    EXPECT_NEAR(c.hessian({0.5})[0][0], std::cosh(0.5), 1e-5);
}

TEST(CheckHypotheses, QuadraticPairPasses) {
    const auto V = make_quadratic<1>(1.0), W = make_quadratic<1>(1.0);
    const auto rep = check_hypotheses(V, W, Box<1>{{-5.0}, {5.0}}, 1000, 1);
    rep.for_each([](const auto& c) { EXPECT_TRUE(c.passed) << c.name << " margin " << c.worst_margin; });
    EXPECT_TRUE(rep.all_passed());
}

TEST(CheckHypotheses, QuadraticPairPasses2D) {
    const auto V = make_quadratic<2>(1.5, {0.5, 0.5}), W = make_quadratic<2>(0.5);
    EXPECT_TRUE(check_hypotheses(V, W, Box<2>{{-4.0, -4.0}, {4.0, 4.0}}, 500, 3).all_passed());
}

TEST(CheckHypotheses, AsymmetricInteractionFailsWithWitness) {
    const auto V = make_quadratic<1>(1.0);
    const auto W = make_custom<1>([](const Point<1>& x) { return x[0] + x[0] * x[0]; },
                                  [](const Point<1>& x) { return Point<1>{1.0 + 2.0 * x[0]}; }, 2.0, {-0.5}, 2, 1e6,
                                  10.0);
    const auto rep = check_hypotheses(V, W, Box<1>{{-2.0}, {2.0}}, 200, 4);
    EXPECT_FALSE(rep.symmetry.passed);
    EXPECT_LT(rep.symmetry.worst_margin, 0.0);
    const double w = rep.symmetry.witness[0];
    EXPECT_GT(std::abs(W.evaluate({w}) - W.evaluate({-w})), 1e-12);
    EXPECT_FALSE(rep.all_passed());
}

TEST(CheckHypotheses, QuarticConvexityMarginAtLeastRho) {
    const auto V = make_quartic_convex<1>(1.0, 1.0), W = make_quadratic<1>(1.0);
    const auto rep = check_hypotheses(V, W, Box<1>{{-3.0}, {3.0}}, 1000, 5);
    EXPECT_TRUE(rep.convexity.passed);
    // Margins are second differences minus the declared bound rho.
    EXPECT_GE(rep.convexity.worst_margin, -1e-6);
}

TEST(CheckHypotheses, NonConvexCustomFailsConvexity) {
    const auto V = make_custom<1>([](const Point<1>& x) { return std::pow(x[0] * x[0] - 1.0, 2); }, {}, 0.5, {1.0}, 4,
                                  1e6, 100.0);
    const auto rep = check_hypotheses(V, make_quadratic<1>(1.0), Box<1>{{-2.0}, {2.0}}, 500, 6);
    EXPECT_FALSE(rep.convexity.passed);
    EXPECT_LT(std::abs(rep.convexity.witness[0]), 1.0);
}

TEST(CheckHypotheses, DeterministicGivenSeed) {
    const auto V = make_quartic_convex<2>(1.0, 0.5), W = make_quadratic<2>(1.0);
    const Box<2> box{{-3.0, -3.0}, {3.0, 3.0}};
    const auto a = check_hypotheses(V, W, box, 300, 77), b = check_hypotheses(V, W, box, 300, 77);
    EXPECT_EQ(a.convexity.worst_margin, b.convexity.worst_margin);
    EXPECT_EQ(a.domination.witness, b.domination.witness);
    EXPECT_EQ(a.laplacian_growth.worst_margin, b.laplacian_growth.worst_margin);
}

TEST(CheckHypotheses, Preconditions) {
    const auto V = make_quadratic<1>(1.0, {3.0}), W = make_quadratic<1>(1.0);
    EXPECT_THROW(check_hypotheses(V, W, Box<1>{{-1.0}, {1.0}}, 1000, 0), InvalidParameter);
    EXPECT_THROW(check_hypotheses(V, W, Box<1>{{-5.0}, {5.0}}, 99, 0), InvalidParameter);
}
