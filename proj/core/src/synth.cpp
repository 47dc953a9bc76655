#include "fairpr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "fairpr/errors.hpp"
#include "fairpr/random.hpp"

namespace fairpr {

namespace {

void validate(const SynthConfig& cfg) {
    auto open_unit = [](double x) { return x > 0.0 && x < 1.0; };
    if (cfg.seed_nodes < 2) throw InputError("seed graph needs at least 2 nodes");
    if (cfg.nodes <= cfg.seed_nodes) throw InputError("node count must exceed the seed graph size");
    if (!open_unit(cfg.red_probability)) throw InputError("r must lie in (0, 1)");
    if (!open_unit(cfg.alpha_red) || !open_unit(cfg.alpha_blue)) throw InputError("alpha must lie in (0, 1)");
    if (cfg.edges_per_node == 0 || cfg.edges_per_node > cfg.seed_nodes) {
        throw InputError("edges_per_node must lie in [1, seed_nodes]");
    }
}

std::optional<ColoredGraph> grow(const SynthConfig& cfg, std::uint64_t seed) {
    const std::size_t n = cfg.nodes, n0 = cfg.seed_nodes;
    Rng rng(seed);
    std::vector<Color> colors(n, Color::Blue);
    std::vector<std::vector<NodeId>> adj(n);
    std::vector<NodeId> endpoints;  // node u appears deg(u) times
    endpoints.reserve(2 * n * cfg.edges_per_node + 2 * n0);

    const auto red_seeds = static_cast<std::size_t>(std::ceil(static_cast<double>(n0) * cfg.red_probability));
    for (std::size_t i = 0; i < n0; ++i) {
        if ((i + 1) * red_seeds / n0 > i * red_seeds / n0) colors[i] = Color::Red;
    }
    auto link = [&](NodeId u, NodeId v) {
        adj[u].push_back(v);
        adj[v].push_back(u);
        endpoints.push_back(u);
        endpoints.push_back(v);
    };
    for (std::size_t i = 0; i + 1 < n0; ++i) link(static_cast<NodeId>(i), static_cast<NodeId>(i + 1));
    if (n0 > 2) link(static_cast<NodeId>(n0 - 1), 0);

    for (std::size_t t = n0; t < n; ++t) {
        const auto v = static_cast<NodeId>(t);
        colors[v] = rng.bernoulli(cfg.red_probability) ? Color::Red : Color::Blue;
        const double same = colors[v] == Color::Red ? cfg.alpha_red : cfg.alpha_blue;
        const std::size_t existing = endpoints.size();
        std::vector<NodeId> chosen;
        while (chosen.size() < cfg.edges_per_node) {
            const NodeId u = endpoints[rng.below(existing)];
            if (std::find(chosen.begin(), chosen.end(), u) != chosen.end()) continue;
            const double accept = colors[u] == colors[v] ? same : 1.0 - same;
            if (rng.bernoulli(accept)) chosen.push_back(u);
        }
        for (NodeId u : chosen) link(v, u);
    }

    const auto reds = std::count(colors.begin(), colors.end(), Color::Red);
    if (reds == 0 || static_cast<std::size_t>(reds) == n) return std::nullopt;

    std::vector<Edge> edges;
    edges.reserve(endpoints.size());
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v : adj[u]) edges.emplace_back(u, v);
    }
    return ColoredGraph(std::move(colors), edges);
}

} // namespace

ColoredGraph generate(const SynthConfig& cfg) {
    validate(cfg);
    constexpr std::uint64_t kAttempts = 100;
    for (std::uint64_t attempt = 0; attempt < kAttempts; ++attempt) {
        const std::uint64_t seed = attempt == 0 ? cfg.seed : derive_seed(cfg.seed, attempt);
        if (auto g = grow(cfg, seed)) return std::move(*g);
    }
    throw InputError("generator produced an empty color group " + std::to_string(kAttempts) + " times");
}

} // namespace fairpr
