#include <sstream>

#include <gtest/gtest.h>

#include "fairpr/errors.hpp"
#include "fairpr/graph.hpp"
#include "oracles.hpp"

namespace fairpr {
namespace {

ColoredGraph parse(const std::string& edges, const std::string& colors) {
    std::istringstream e(edges), c(colors);
    return read_graph(e, c);
}

TEST(ReadGraph, TwoNodeMutualPair) {
    const auto g = parse("0\t1\n1\t0\n", "0\t1\n1\t0\n");
    EXPECT_EQ(g.size(), 2u);
    EXPECT_EQ(g.red_count(), 1u);
    EXPECT_EQ(g.red_out(0), 0u);
    EXPECT_EQ(g.blue_out(0), 1u);
    EXPECT_EQ(g.red_out(1), 1u);
}

TEST(ReadGraph, SkipsCommentsAndBlankLines) {
    const auto g = parse("# header\n\n0\t1\n  # indented comment\n1\t2\n", "0\t1\n1\t0\n2\t0\n");
    EXPECT_EQ(g.edge_count(), 2u);
}

TEST(ReadGraph, ColorOnlyNodesBecomeSinks) {
    const auto g = parse("0\t1\n", "0\t1\n1\t0\n2\t0\n");
    EXPECT_EQ(g.size(), 3u);
    EXPECT_TRUE(g.is_sink(2));
    EXPECT_TRUE(g.is_sink(1));
}

TEST(ReadGraph, RejectsUncoloredNode) {
    try {
        parse("0\t1\n", "0\t1\n");
        FAIL() << "expected InputError";
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("node 1 is uncolored"), std::string::npos) << e.what();
    }
}

TEST(ReadGraph, RejectsDuplicateEdge) {
    EXPECT_THROW(parse("0\t1\n2\t3\n1\t4\n2\t3\n", "0\t1\n1\t0\n2\t1\n3\t0\n4\t0\n"), InputError);
}

TEST(ReadGraph, RejectsNonIntegerTokens) {
    EXPECT_THROW(parse("0\tx\n", "0\t1\n1\t0\n"), InputError);
    EXPECT_THROW(parse("0\t1\n", "0\t1\n1\t-1\n"), InputError);
    EXPECT_THROW(parse("0\t1.5\n", "0\t1\n1\t0\n"), InputError);
}

TEST(ReadGraph, RejectsMalformedColors) {
    EXPECT_THROW(parse("0\t1\n", "0\t1\n1\t2\n"), InputError);
    EXPECT_THROW(parse("0\t1\n", "0\t1\n1\t0\n1\t1\n"), InputError);
    EXPECT_THROW(parse("0\t1\n", "0\t1\n2\t0\n"), InputError);  // gap at node 1
}

TEST(ReadGraph, RejectsEmptyGroup) {
    EXPECT_THROW(parse("0\t1\n", "0\t1\n1\t1\n"), InputError);
    EXPECT_THROW(parse("0\t1\n", "0\t0\n1\t0\n"), InputError);
}

TEST(ColoredGraph, RejectsOutOfRangeEndpoint) {
    const std::vector<Edge> edges{{0, 5}};
    EXPECT_THROW(ColoredGraph({Color::Red, Color::Blue}, edges), InputError);
}

TEST(ColoredGraph, CountsMatchAdjacency) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto g = testing::random_graph(seed, {.n = 30, .edge_probability = 0.2});
        std::size_t reds = 0;
        for (NodeId i = 0; i < g.size(); ++i) {
            std::size_t r = 0;
            for (NodeId j : g.out_neighbors(i)) r += g.is_red(j) ? 1 : 0;
            EXPECT_EQ(r, g.red_out(i));
            EXPECT_EQ(g.red_out(i) + g.blue_out(i), g.out_degree(i));
            reds += g.is_red(i) ? 1 : 0;
        }
        EXPECT_EQ(reds, g.red_count());
        EXPECT_EQ(g.red_count() + g.blue_count(), g.size());
    }
}

TEST(ColoredGraph, SerializationRoundTrips) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto g = testing::random_graph(seed, {.n = 25});
        std::ostringstream e, c;
        write_edges(g, e);
        write_colors(g, c);
        EXPECT_EQ(parse(e.str(), c.str()), g);
    }
}

TEST(GroupStats, MutualPair) {
    const auto g = parse("0\t1\n1\t0\n", "0\t1\n1\t0\n");
    const auto s = group_stats(g);
    EXPECT_DOUBLE_EQ(s.red_fraction, 0.5);
    EXPECT_DOUBLE_EQ(s.blue_fraction, 0.5);
    EXPECT_DOUBLE_EQ(*s.cross_red, 2.0);
    EXPECT_DOUBLE_EQ(*s.cross_blue, 2.0);
}

TEST(GroupStats, CompleteBipartite) {
    std::vector<Color> colors{Color::Red, Color::Red, Color::Red, Color::Blue, Color::Blue, Color::Blue};
    std::vector<Edge> edges;
    for (NodeId i = 0; i < 3; ++i) {
        for (NodeId j = 3; j < 6; ++j) {
            edges.emplace_back(i, j);
            edges.emplace_back(j, i);
        }
    }
    const auto s = group_stats(ColoredGraph(colors, edges));
    EXPECT_DOUBLE_EQ(*s.cross_red, 2.0);
    EXPECT_DOUBLE_EQ(*s.cross_blue, 2.0);
}

TEST(GroupStats, HomophilousCliqueAndIsolatedBlue) {
    std::vector<Color> colors{Color::Red, Color::Red, Color::Red, Color::Red, Color::Blue};
    std::vector<Edge> edges;
    for (NodeId i = 0; i < 4; ++i) {
        for (NodeId j = 0; j < 4; ++j) {
            if (i != j) edges.emplace_back(i, j);
        }
    }
    const auto s = group_stats(ColoredGraph(colors, edges));
    EXPECT_DOUBLE_EQ(*s.cross_red, 0.0);
    EXPECT_FALSE(s.cross_blue.has_value());
    EXPECT_DOUBLE_EQ(s.red_fraction + s.blue_fraction, 1.0);
}

TEST(GroupStats, SummaryCsvLeavesUndefinedRatiosEmpty) {
    const auto g = parse("0\t1\n", "0\t1\n1\t0\n");
    std::ostringstream out;
    write_summary_csv(g, out);
    EXPECT_EQ(out.str(), "n,edges,r,b,cross_R,cross_B\n2,1,0.5,0.5,2,\n");
}

TEST(NodeSet, ReadsAndDeduplicates) {
    std::istringstream in("# S\n3\n1\n3\n");
    EXPECT_EQ(read_node_set(in, 5), (std::vector<NodeId>{3, 1}));
    std::istringstream bad("7\n");
    EXPECT_THROW(read_node_set(bad, 5), InputError);
}

} // namespace
} // namespace fairpr
