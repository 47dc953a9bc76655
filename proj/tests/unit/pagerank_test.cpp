#include <numeric>

#include <gtest/gtest.h>

#include "fairpr/dense.hpp"
#include "fairpr/errors.hpp"
#include "fairpr/pagerank.hpp"
#include "oracles.hpp"

namespace fairpr {
namespace {

using testing::dense_inverse_q;
using testing::dense_pagerank;
using testing::dense_transition;
using testing::max_abs_diff;
using testing::to_vector;

ColoredGraph mutual_pair() {
    const std::vector<Edge> edges{{0, 1}, {1, 0}};
    return ColoredGraph({Color::Red, Color::Blue}, edges);
}

TEST(StandardTransition, Rows) {
    const std::vector<Edge> edges{{0, 1}, {0, 2}, {1, 0}};
    const ColoredGraph g({Color::Red, Color::Blue, Color::Blue}, edges);
    const auto m = standard_transition(g);
    EXPECT_EQ(m.row(0), (std::vector<double>{0.0, 0.5, 0.5}));
    EXPECT_EQ(m.row(1), (std::vector<double>{1.0, 0.0, 0.0}));
    const auto sink = m.row(2);
    for (double v : sink) EXPECT_DOUBLE_EQ(v, 1.0 / 3.0);
}

TEST(StandardTransition, MutualPairIsSwap) {
    const auto m = standard_transition(mutual_pair());
    EXPECT_EQ(m.dense(), (std::vector<double>{0.0, 1.0, 1.0, 0.0}));
}

TEST(TransitionModel, RejectsNonStochasticRows) {
    EXPECT_THROW(TransitionModel::from_dense(std::vector<double>{0.5, 0.4, 0.0, 1.0}, 2), InputError);
    EXPECT_THROW(TransitionModel::from_dense(std::vector<double>{1.5, -0.5, 0.0, 1.0}, 2), InputError);
}

TEST(PowerIterate, SymmetricPair) {
    const auto p = power_iterate(standard_transition(mutual_pair()), uniform_vector(2));
    EXPECT_NEAR(p[0], 0.5, 1e-14);
    EXPECT_NEAR(p[1], 0.5, 1e-14);
}

TEST(PowerIterate, StarMatchesDenseSolve) {
    const std::vector<Edge> edges{{1, 0}, {2, 0}, {3, 0}};
    const ColoredGraph g({Color::Red, Color::Blue, Color::Blue, Color::Red}, edges);
    const auto p = power_iterate(standard_transition(g), uniform_vector(4));
    const auto oracle = dense_pagerank(dense_transition(g), Eigen::VectorXd::Constant(4, 0.25), 0.15);
    EXPECT_LE(max_abs_diff(p, oracle), 1e-10);
}

TEST(PowerIterate, NearUnitRestartReturnsJumpVector) {
    const auto g = testing::random_graph(3, {.n = 12});
    PageRankOptions opts;
    opts.gamma = 1.0 - 1e-9;
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i + 1);
    const double s = std::accumulate(v.begin(), v.end(), 0.0);
    for (double& x : v) x /= s;
    const auto p = power_iterate(standard_transition(g), v, opts);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(p[i], v[i], 1e-6);
}

TEST(PowerIterate, RejectsInvalidJumpAndGamma) {
    const auto m = standard_transition(mutual_pair());
    EXPECT_THROW(power_iterate(m, std::vector<double>{0.7, 0.7}), InputError);
    PageRankOptions bad;
    bad.gamma = 0.0;
    EXPECT_THROW(power_iterate(m, uniform_vector(2), bad), InputError);
}

TEST(PowerIterate, ReportsExhaustedBudget) {
    const auto g = testing::random_graph(4, {.n = 20});
    PageRankOptions opts;
    opts.max_iters = 2;
    EXPECT_THROW(power_iterate(standard_transition(g), uniform_vector(g.size()), opts), ConvergenceError);
}

TEST(PowerIterate, OutputIsDistributionAndAffineInJump) {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        const auto g = testing::random_graph(seed, {.n = 40, .edge_probability = 0.1});
        const auto m = standard_transition(g);
        const auto v1 = unit_vector(g.size(), 0);
        const auto v2 = uniform_vector(g.size());
        std::vector<double> mid(g.size());
        for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = 0.5 * (v1[i] + v2[i]);
        const auto p1 = power_iterate(m, v1), p2 = power_iterate(m, v2), pm = power_iterate(m, mid);
        EXPECT_NEAR(std::accumulate(pm.begin(), pm.end(), 0.0), 1.0, 1e-9);
        for (std::size_t i = 0; i < mid.size(); ++i) {
            EXPECT_GE(pm[i], 0.0);
            EXPECT_NEAR(pm[i], 0.5 * (p1[i] + p2[i]), 1e-9);
        }
    }
}

TEST(PersonalizedPageRank, SelfLoop) {
    const std::vector<Edge> edges{{0, 0}, {1, 0}};
    const ColoredGraph g({Color::Red, Color::Blue}, edges);
    const auto p = personalized_pagerank(standard_transition(g), 0);
    EXPECT_NEAR(p[0], 1.0, 1e-12);
}

TEST(PersonalizedPageRank, RowsOfDenseQ) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto g = testing::random_graph(100 + seed, {.n = 4 + seed * 4});
        const auto m = standard_transition(g);
        const auto q = dense_inverse_q(dense_transition(g), 0.15);
        for (NodeId i = 0; i < g.size(); ++i) {
            const auto p = personalized_pagerank(m, i);
            EXPECT_LE(max_abs_diff(p, q.row(i).transpose()), 1e-9);
            EXPECT_GE(p[i], 0.15);
        }
    }
}

TEST(RedAbsorption, AllRedReachOne) {
    // Blue node 2 is unreachable from the red pair and has no in-edges.
    const std::vector<Edge> edges{{0, 1}, {1, 0}, {2, 0}};
    const ColoredGraph g({Color::Red, Color::Red, Color::Blue}, edges);
    const auto q = red_absorption_vector(standard_transition(g), g);
    EXPECT_NEAR(q[0], 1.0, 1e-12);
    EXPECT_NEAR(q[1], 1.0, 1e-12);
    EXPECT_NEAR(q[2], 0.85, 1e-12);
}

TEST(RedAbsorption, MatchesDenseColumnSums) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto g = testing::random_graph(200 + seed, {.n = 5 + seed * 2, .sink_probability = 0.2});
        const auto q = dense_inverse_q(dense_transition(g), 0.15);
        Eigen::VectorXd oracle = Eigen::VectorXd::Zero(q.rows());
        for (NodeId i = 0; i < g.size(); ++i) {
            if (g.is_red(i)) oracle += q.col(i);
        }
        const auto qr = red_absorption_vector(standard_transition(g), g);
        EXPECT_LE(max_abs_diff(qr, oracle), 1e-9);
        for (double v : qr) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
    }
}

TEST(DenseQ, MatchesOracleAndIsStochastic) {
    // Two self-loops: each node's personalized walk never leaves it.
    const std::vector<Edge> edges{{0, 0}, {1, 1}};
    const ColoredGraph g({Color::Red, Color::Blue}, edges);
    const auto q1 = dense_q(standard_transition(g), 0.15);
    EXPECT_NEAR(q1(0, 0), 1.0, 1e-14);
    EXPECT_NEAR(q1(0, 1), 0.0, 1e-14);

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto h = testing::random_graph(300 + seed, {.n = 30});
        const auto q = dense_q(standard_transition(h), 0.15);
        EXPECT_LE((q.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-9);
        EXPECT_LE((q - dense_inverse_q(dense_transition(h), 0.15)).cwiseAbs().maxCoeff(), 1e-10);
        const Eigen::VectorXd v = Eigen::VectorXd::Constant(q.rows(), 1.0 / static_cast<double>(q.rows()));
        const auto p = power_iterate(standard_transition(h), uniform_vector(h.size()));
        EXPECT_LE(max_abs_diff(p, q.transpose() * v), 1e-9);
    }
}

TEST(DenseQ, EnforcesCap) {
    const auto g = testing::random_graph(1, {.n = 20});
    EXPECT_THROW(dense_q(standard_transition(g), 0.15, 10), InputError);
}

TEST(PersonalizedPageRankAll, MatchesSingleSolves) {
    const auto g = testing::random_graph(9, {.n = 15});
    const auto m = standard_transition(g);
    const auto all = personalized_pagerank_all(m);
    for (NodeId i = 0; i < g.size(); ++i) {
        const auto p = personalized_pagerank(m, i);
        for (NodeId j = 0; j < g.size(); ++j) EXPECT_DOUBLE_EQ(all[i * g.size() + j], p[j]);
    }
}

TEST(Absorption, IsQTimesVector) {
    const auto g = testing::random_graph(11, {.n = 20});
    const auto q = dense_inverse_q(dense_transition(g), 0.15);
    std::vector<double> w(g.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::sin(static_cast<double>(i));
    const auto got = absorption(standard_transition(g), w);
    EXPECT_LE(max_abs_diff(got, q * to_vector(w)), 1e-10);
}

} // namespace
} // namespace fairpr
