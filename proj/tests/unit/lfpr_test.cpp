#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "fairpr/errors.hpp"
#include "fairpr/fairness.hpp"
#include "fairpr/lfpr.hpp"
#include "oracles.hpp"

namespace fairpr {
namespace {

using testing::dense_pagerank;
using testing::max_abs_diff;
using testing::to_vector;

constexpr PolicyKind kShared[] = {PolicyKind::Uniform, PolicyKind::Proportional};
constexpr PolicyKind kFixed[] = {PolicyKind::Neighborhood, PolicyKind::Uniform, PolicyKind::Proportional};

std::vector<double> original_pagerank(const ColoredGraph& g) {
    return power_iterate(standard_transition(g), uniform_vector(g.size()));
}

// Composite matrices written out entry by entry from the defining formulas.
Eigen::MatrixXd dense_neighborhood(const ColoredGraph& g, double phi) {
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    for (NodeId i = 0; i < g.size(); ++i) {
        for (NodeId j = 0; j < g.size(); ++j) {
            const bool red = g.is_red(j);
            const double group = red ? phi : 1.0 - phi;
            const auto out = red ? g.red_out(i) : g.blue_out(i);
            const auto size = red ? g.red_count() : g.blue_count();
            const auto nbrs = g.out_neighbors(i);
            const bool edge = std::find(nbrs.begin(), nbrs.end(), j) != nbrs.end();
            if (out == 0) {
                p(i, j) = group / static_cast<double>(size);
            } else if (edge) {
                p(i, j) = group / static_cast<double>(out);
            }
        }
    }
    return p;
}

Eigen::MatrixXd dense_shared_policy(const ColoredGraph& g, double phi, const std::vector<double>& x,
                                    const std::vector<double>& y) {
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    for (NodeId i = 0; i < g.size(); ++i) {
        const double out = static_cast<double>(g.out_degree(i));
        const double r = static_cast<double>(g.red_out(i)), b = static_cast<double>(g.blue_out(i));
        double dr = 0.0, db = 0.0;
        if (out == 0.0) {
            dr = phi;
            db = 1.0 - phi;
        } else if (r / out < phi) {
            for (NodeId j : g.out_neighbors(i)) p(i, j) = (1.0 - phi) / b;
            dr = phi - (1.0 - phi) * r / b;
        } else {
            for (NodeId j : g.out_neighbors(i)) p(i, j) = phi / r;
            db = (1.0 - phi) - phi * b / r;
        }
        for (Eigen::Index j = 0; j < n; ++j) p(i, j) += dr * x[j] + db * y[j];
    }
    return p;
}

Eigen::VectorXd dense_fair_jump(const ColoredGraph& g, double phi) {
    Eigen::VectorXd v(g.size());
    for (NodeId i = 0; i < g.size(); ++i) {
        v(i) = g.is_red(i) ? phi / static_cast<double>(g.red_count()) : (1.0 - phi) / static_cast<double>(g.blue_count());
    }
    return v;
}

ColoredGraph node_with_neighbors(std::size_t red_nbrs, std::size_t blue_nbrs, std::size_t extra_red = 0) {
    // Node 0 is blue and points at the listed neighbors.
    std::vector<Color> colors{Color::Blue};
    std::vector<Edge> edges;
    for (std::size_t k = 0; k < red_nbrs; ++k) {
        colors.push_back(Color::Red);
        edges.emplace_back(0, static_cast<NodeId>(colors.size() - 1));
    }
    for (std::size_t k = 0; k < blue_nbrs; ++k) {
        colors.push_back(Color::Blue);
        edges.emplace_back(0, static_cast<NodeId>(colors.size() - 1));
    }
    for (std::size_t k = 0; k < extra_red; ++k) colors.push_back(Color::Red);
    return ColoredGraph(colors, edges);
}

TEST(NeighborhoodModel, RowExamples) {
    const auto g = node_with_neighbors(2, 1);
    const auto row = build_neighborhood_model(g, 0.5).row(0);
    EXPECT_DOUBLE_EQ(row[1], 0.25);
    EXPECT_DOUBLE_EQ(row[2], 0.25);
    EXPECT_DOUBLE_EQ(row[3], 0.5);
    EXPECT_DOUBLE_EQ(row[0], 0.0);

    const auto h = node_with_neighbors(0, 1, 3);
    const auto row2 = build_neighborhood_model(h, 0.5).row(0);
    for (NodeId j = 2; j < 5; ++j) EXPECT_DOUBLE_EQ(row2[j], 0.5 / 3.0);
}

TEST(NeighborhoodModel, EveryRowIsFair) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto g = testing::random_graph(seed, {.n = 25});
        for (double phi : {0.2, 0.5, 0.8}) EXPECT_TRUE(converse_check(build_neighborhood_model(g, phi), g, phi, 1e-12));
    }
}

TEST(FairJump, Examples) {
    const std::vector<Edge> none;
    const ColoredGraph pair({Color::Red, Color::Blue}, none);
    const auto v = build_fair_jump(pair, 0.3);
    EXPECT_DOUBLE_EQ(v[0], 0.3);
    EXPECT_DOUBLE_EQ(v[1], 0.7);

    const ColoredGraph four({Color::Red, Color::Blue, Color::Red, Color::Blue}, none);
    for (double x : build_fair_jump(four, 0.5)) EXPECT_DOUBLE_EQ(x, 0.25);

    const auto g = testing::random_graph(2, {.n = 17});
    EXPECT_NEAR(red_mass(build_fair_jump(g, 0.37), g), 0.37, 1e-15);
}

TEST(ResidualDecompose, WorkedExample) {
    const auto g = node_with_neighbors(1, 4);
    const auto d = residual_decompose(g, 0.5);
    EXPECT_TRUE(d.red_deficient[0]);
    EXPECT_FALSE(d.blue_deficient[0]);
    EXPECT_EQ(d.red_share[0], 0.125);
    EXPECT_EQ(d.red_residual[0], 0.375);
}

TEST(ResidualDecompose, BoundaryGoesToBlueDeficientWithNoResidual) {
    const auto g = node_with_neighbors(1, 1);
    const auto d = residual_decompose(g, 0.5);
    EXPECT_TRUE(d.blue_deficient[0]);
    EXPECT_FALSE(d.red_deficient[0]);
    EXPECT_EQ(d.blue_residual[0], 0.0);
    EXPECT_EQ(d.blue_share[0], 0.5);
}

TEST(ResidualDecompose, SinkOwesBothGroups) {
    const auto g = node_with_neighbors(1, 1);
    const auto d = residual_decompose(g, 0.3);
    EXPECT_TRUE(d.red_deficient[1] && d.blue_deficient[1]);
    EXPECT_DOUBLE_EQ(d.red_residual[1], 0.3);
    EXPECT_DOUBLE_EQ(d.blue_residual[1], 0.7);
    EXPECT_EQ(d.local.offsets[2], d.local.offsets[1]);
}

TEST(ResidualDecompose, InvariantsOnRandomGraphs) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto g = testing::random_graph(40 + seed, {.n = 30, .edge_probability = 0.15});
        for (double phi : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const auto d = residual_decompose(g, phi);
            for (NodeId i = 0; i < g.size(); ++i) {
                double row = 0.0;
                for (std::size_t k = d.local.offsets[i]; k < d.local.offsets[i + 1]; ++k) row += d.local.values[k];
                const double out = static_cast<double>(g.out_degree(i));
                if (g.is_sink(i)) continue;
                const bool lr = static_cast<double>(g.red_out(i)) / out < phi;
                EXPECT_EQ(d.red_deficient[i] != 0, lr);
                EXPECT_EQ(d.blue_deficient[i] != 0, !lr);
                if (lr) {
                    EXPECT_GE(d.red_residual[i], 0.0);
                    EXPECT_LE(d.red_residual[i], phi);
                    EXPECT_NEAR(row, 1.0 - d.red_residual[i], 1e-14);
                    EXPECT_NEAR(d.red_share[i] * out + d.red_residual[i], 1.0, 1e-14);
                } else {
                    EXPECT_GE(d.blue_residual[i], 0.0);
                    EXPECT_LE(d.blue_residual[i], 1.0 - phi);
                    EXPECT_NEAR(row, 1.0 - d.blue_residual[i], 1e-14);
                    EXPECT_NEAR(d.blue_share[i] * out + d.blue_residual[i], 1.0, 1e-14);
                }
            }
        }
    }
}

TEST(MakePolicy, Uniform) {
    const std::vector<Edge> none;
    const ColoredGraph g({Color::Red, Color::Red, Color::Blue, Color::Red, Color::Red}, none);
    const auto p = make_policy(PolicyKind::Uniform, g);
    EXPECT_EQ(p.red_weights, (std::vector<double>{0.25, 0.25, 0.0, 0.25, 0.25}));
    EXPECT_EQ(p.blue_weights, (std::vector<double>{0.0, 0.0, 1.0, 0.0, 0.0}));
}

TEST(MakePolicy, Proportional) {
    const std::vector<Edge> none;
    const ColoredGraph g({Color::Red, Color::Red, Color::Blue}, none);
    const std::vector<double> p_o{0.1, 0.3, 0.6};
    const auto p = make_policy(PolicyKind::Proportional, g, p_o);
    EXPECT_DOUBLE_EQ(p.red_weights[0], 0.25);
    EXPECT_DOUBLE_EQ(p.red_weights[1], 0.75);
    EXPECT_DOUBLE_EQ(p.blue_weights[2], 1.0);
    EXPECT_THROW(make_policy(PolicyKind::Proportional, g, std::vector<double>{0.0, 0.0, 1.0}), InputError);
    EXPECT_THROW(make_policy(PolicyKind::Proportional, g), InputError);
}

TEST(ResidualModel, RejectsInvalidVectors) {
    const auto g = testing::random_graph(1, {.n = 8});
    auto p = make_policy(PolicyKind::Uniform, g);
    p.red_weights[1] = 0.5;  // node 1 is blue
    EXPECT_THROW(build_residual_model(g, 0.5, p), InputError);
    p = make_policy(PolicyKind::Uniform, g);
    p.blue_weights[1] *= 2.0;
    EXPECT_THROW(build_residual_model(g, 0.5, p), InputError);
}

TEST(ResidualModel, NeighborhoodPolicyEqualsNeighborhoodModel) {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        const auto g = testing::random_graph(60 + seed, {.n = 20});
        for (double phi : {0.2, 0.5, 0.7}) {
            const auto a = build_neighborhood_model(g, phi).dense();
            const auto b = build_residual_model(g, phi, make_policy(PolicyKind::Neighborhood, g)).dense();
            for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
            const auto pa = power_iterate(build_neighborhood_model(g, phi), build_fair_jump(g, phi));
            const auto pb = lfpr_pagerank(g, phi, make_policy(PolicyKind::Neighborhood, g));
            for (std::size_t k = 0; k < pa.size(); ++k) EXPECT_NEAR(pa[k], pb[k], 1e-10);
        }
    }
}

TEST(LfprPagerank, SymmetricPair) {
    const std::vector<Edge> edges{{0, 1}, {1, 0}};
    const ColoredGraph g({Color::Red, Color::Blue}, edges);
    for (auto kind : kFixed) {
        const auto p = lfpr_pagerank(g, 0.5, make_policy(kind, g, original_pagerank(g)));
        EXPECT_NEAR(p[0], 0.5, 1e-13);
        EXPECT_NEAR(p[1], 0.5, 1e-13);
    }
}

TEST(LfprPagerank, MatchesDenseCompositeSolve) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto g = testing::random_graph(80 + seed, {.n = 6 + seed, .sink_probability = 0.2});
        const auto p_o = original_pagerank(g);
        for (double phi : {0.3, 0.6}) {
            const auto v = dense_fair_jump(g, phi);
            const auto n_oracle = dense_pagerank(dense_neighborhood(g, phi), v, 0.15);
            EXPECT_LE(max_abs_diff(lfpr_pagerank(g, phi, make_policy(PolicyKind::Neighborhood, g)), n_oracle), 1e-10);
            for (auto kind : kShared) {
                const auto pol = make_policy(kind, g, p_o);
                const auto oracle = dense_pagerank(dense_shared_policy(g, phi, pol.red_weights, pol.blue_weights), v, 0.15);
                EXPECT_LE(max_abs_diff(lfpr_pagerank(g, phi, pol), oracle), 1e-10);
            }
        }
    }
}

TEST(LfprPagerank, RedMassIsPhiAndEveryStepIsFair) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        const auto g = testing::random_sparse_graph(120 + seed, 50 + seed * 10, 3.0, 0.3);
        const auto p_o = original_pagerank(g);
        for (double phi : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            for (auto kind : kFixed) {
                const auto pol = make_policy(kind, g, p_o);
                const auto m = build_residual_model(g, phi, pol);
                EXPECT_TRUE(converse_check(m, g, phi, 1e-12));
                EXPECT_NEAR(red_mass(lfpr_pagerank(g, phi, pol), g), phi, 1e-9);

                std::vector<double> q(g.size()), step(g.size());
                double s = 0.0;
                for (double& x : q) s += (x = unit(rng));
                for (double& x : q) x /= s;
                m.left_multiply(q, step);
                EXPECT_NEAR(red_mass(step, g), phi, 1e-12);
            }
        }
    }
}

TEST(OptimizeResiduals, NoWorseThanUniformOrProportional) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const auto g = testing::random_sparse_graph(150 + seed, 10 + 20 * seed, 2.5, 0.35);
        const auto p_o = original_pagerank(g);
        const double phi = 0.5;
        ResidualSearchOptions search;
        search.iterations = 40;
        search.seed = seed;
        const auto opt = optimize_residuals(g, phi, p_o, {}, search);
        const double lu = utility_loss(lfpr_pagerank(g, phi, make_policy(PolicyKind::Uniform, g)), p_o);
        const double lp = utility_loss(lfpr_pagerank(g, phi, make_policy(PolicyKind::Proportional, g, p_o)), p_o);
        const auto p = lfpr_pagerank(g, phi, opt.policy);
        EXPECT_LE(utility_loss(p, p_o), std::min(lu, lp) + 1e-9);
        EXPECT_NEAR(utility_loss(p, p_o), opt.loss, 1e-12);
        EXPECT_NEAR(red_mass(p, g), phi, 1e-9);
        EXPECT_EQ(opt.policy.kind, PolicyKind::Optimized);
        EXPECT_NEAR(std::accumulate(opt.policy.red_weights.begin(), opt.policy.red_weights.end(), 0.0), 1.0, 1e-12);
        EXPECT_NEAR(std::accumulate(opt.policy.blue_weights.begin(), opt.policy.blue_weights.end(), 0.0), 1.0, 1e-12);
    }
}

TEST(OptimizeResiduals, AlreadyFairPairHasZeroLoss) {
    const std::vector<Edge> edges{{0, 1}, {1, 0}};
    const ColoredGraph g({Color::Red, Color::Blue}, edges);
    const auto opt = optimize_residuals(g, 0.5, original_pagerank(g));
    EXPECT_NEAR(opt.loss, 0.0, 1e-24);
}

TEST(OptimizeResiduals, DeterministicPerSeed) {
    const auto g = testing::random_sparse_graph(7, 40, 2.0, 0.3);
    const auto p_o = original_pagerank(g);
    ResidualSearchOptions search;
    search.iterations = 15;
    search.seed = 123;
    const auto a = optimize_residuals(g, 0.4, p_o, {}, search);
    const auto b = optimize_residuals(g, 0.4, p_o, {}, search);
    EXPECT_EQ(a.policy.red_weights, b.policy.red_weights);
    EXPECT_EQ(a.policy.blue_weights, b.policy.blue_weights);
}

double mass_on(const std::vector<double>& p, std::span<const NodeId> nodes) {
    double s = 0.0;
    for (NodeId i : nodes) s += p[i];
    return s;
}

TEST(TargetedLfpr, WholeGraphReducesToLfpr) {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto g = testing::random_graph(170 + seed, {.n = 20});
        const auto p_o = original_pagerank(g);
        std::vector<NodeId> all(g.size());
        std::iota(all.begin(), all.end(), NodeId{0});
        const auto target = make_target_groups(g, all);
        for (auto kind : kFixed) {
            const auto a = targeted_lfpr(g, target, 0.4, kind, {}, p_o);
            const auto b = lfpr_pagerank(g, 0.4, make_policy(kind, g, p_o));
            for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-9);
        }
    }
}

TEST(TargetedLfpr, TargetShareIsPhi) {
    std::mt19937_64 rng(5);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto g = testing::random_graph(190 + seed, {.n = 8 + seed * 4, .edge_probability = 0.25});
        std::vector<NodeId> nodes(g.size());
        std::iota(nodes.begin(), nodes.end(), NodeId{0});
        std::shuffle(nodes.begin() + 2, nodes.end(), rng);
        // nodes 0 (red) and 1 (blue) always in S
        const std::vector<NodeId> s(nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(g.size() / 4 + 2));
        const auto target = make_target_groups(g, s);
        const auto p_o = original_pagerank(g);
        for (auto kind : kFixed) {
            for (double phi : {0.2, 0.5, 0.8}) {
                const auto p = targeted_lfpr(g, target, phi, kind, {}, p_o);
                EXPECT_NEAR(mass_on(p, target.protected_members), phi * mass_on(p, target.members), 1e-8);
                EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-9);
                // Row level: every node sends φ of its into-S mass to S_R.
                const auto m = build_targeted_model(g, target, phi, kind, p_o);
                std::vector<double> in_s(g.size(), 0.0), in_sr(g.size(), 0.0);
                for (NodeId i : target.members) in_s[i] = 1.0;
                for (NodeId i : target.protected_members) in_sr[i] = 1.0;
                const auto ms = m.row_masses(in_s), msr = m.row_masses(in_sr);
                for (NodeId i = 0; i < g.size(); ++i) EXPECT_NEAR(msr[i], phi * ms[i], 1e-12);
            }
        }
    }
}

TEST(TargetedLfpr, OutsideTransitionsUnchanged) {
    const auto g = testing::random_graph(222, {.n = 16});
    const auto target = make_target_groups(g, std::vector<NodeId>{0, 1, 2, 3});
    const auto m = build_targeted_model(g, target, 0.5, PolicyKind::Uniform);
    const auto base = standard_transition(g);
    for (NodeId i = 0; i < g.size(); ++i) {
        const auto row = m.row(i), orig = base.row(i);
        for (NodeId j = 4; j < g.size(); ++j) EXPECT_NEAR(row[j], orig[j], 1e-15);
    }
}

TEST(TargetedLfpr, ValidatesSets) {
    const auto g = testing::random_graph(3, {.n = 10});
    EXPECT_THROW(targeted_lfpr(g, make_target_groups(g, std::vector<NodeId>{}), 0.5, PolicyKind::Uniform),
                 InputError);
    TargetGroups only_red{{0}, {0}};
    EXPECT_THROW(targeted_lfpr(g, only_red, 0.5, PolicyKind::Uniform), InputError);
    TargetGroups only_blue{{1}, {}};
    EXPECT_THROW(targeted_lfpr(g, only_blue, 0.5, PolicyKind::Uniform), InputError);
    TargetGroups stray{{0, 1}, {5}};
    EXPECT_THROW(targeted_lfpr(g, stray, 0.5, PolicyKind::Uniform), InputError);
    EXPECT_THROW(build_targeted_model(g, TargetGroups{{0, 1}, {0}}, 0.5, PolicyKind::Optimized), InputError);
}

} // namespace
} // namespace fairpr
