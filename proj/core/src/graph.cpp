#include "fairpr/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <unordered_set>

#include "fairpr/errors.hpp"
#include "text.hpp"

namespace fairpr {

ColoredGraph::ColoredGraph(std::vector<Color> colors, std::span<const Edge> edges)
    : colors_(std::move(colors)) {
    const std::size_t n = colors_.size();
    if (n > std::numeric_limits<NodeId>::max()) throw InputError("graph too large");

    offsets_.assign(n + 1, 0);
    for (const auto& [src, dst] : edges) {
        if (src >= n || dst >= n) {
            throw InputError("edge " + std::to_string(src) + " -> " + std::to_string(dst) +
                             " references a node without a color");
        }
        ++offsets_[src + 1];
    }
    for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];

    targets_.resize(edges.size());
    std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (const auto& [src, dst] : edges) targets_[cursor[src]++] = dst;

    red_out_.assign(n, 0);
    std::vector<NodeId> scratch;
    for (NodeId i = 0; i < n; ++i) {
        const auto nbrs = out_neighbors(i);
        scratch.assign(nbrs.begin(), nbrs.end());
        std::sort(scratch.begin(), scratch.end());
        if (std::adjacent_find(scratch.begin(), scratch.end()) != scratch.end()) {
            const auto dup = *std::adjacent_find(scratch.begin(), scratch.end());
            throw InputError("duplicate edge " + std::to_string(i) + " -> " + std::to_string(dup));
        }
        red_out_[i] = static_cast<std::size_t>(
            std::count_if(nbrs.begin(), nbrs.end(), [&](NodeId j) { return is_red(j); }));
    }

    red_count_ = static_cast<std::size_t>(std::count(colors_.begin(), colors_.end(), Color::Red));
    if (red_count_ == 0) throw InputError("red (protected) group is empty");
    if (red_count_ == n) throw InputError("blue group is empty");
}

std::vector<double> ColoredGraph::red_indicator() const {
    std::vector<double> ind(size());
    for (NodeId i = 0; i < size(); ++i) ind[i] = is_red(i) ? 1.0 : 0.0;
    return ind;
}

std::vector<Edge> ColoredGraph::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (NodeId i = 0; i < size(); ++i) {
        for (NodeId j : out_neighbors(i)) out.emplace_back(i, j);
    }
    return out;
}

GroupStats group_stats(const ColoredGraph& g) {
    GroupStats stats;
    const double n = static_cast<double>(g.size());
    stats.red_fraction = static_cast<double>(g.red_count()) / n;
    stats.blue_fraction = static_cast<double>(g.blue_count()) / n;

    std::size_t red_edges = 0, red_cross = 0, blue_edges = 0, blue_cross = 0;
    for (NodeId i = 0; i < g.size(); ++i) {
        if (g.is_red(i)) {
            red_edges += g.out_degree(i);
            red_cross += g.blue_out(i);
        } else {
            blue_edges += g.out_degree(i);
            blue_cross += g.red_out(i);
        }
    }
    if (red_edges > 0) {
        stats.cross_red = static_cast<double>(red_cross) / static_cast<double>(red_edges) /
                          stats.blue_fraction;
    }
    if (blue_edges > 0) {
        stats.cross_blue = static_cast<double>(blue_cross) / static_cast<double>(blue_edges) /
                           stats.red_fraction;
    }
    return stats;
}

ColoredGraph read_graph(std::istream& edge_in, std::istream& color_in) {
    std::vector<Edge> edges;
    std::string line;
    std::size_t line_no = 0;
    std::uint64_t max_edge_id = 0;
    bool any_edge = false;
    while (std::getline(edge_in, line)) {
        ++line_no;
        if (text::is_skippable(line)) continue;
        const auto fields = text::split_fields(line);
        if (fields.size() != 2) {
            throw InputError("edge file line " + std::to_string(line_no) +
                             ": expected 'src<TAB>dst'");
        }
        const auto src = text::parse_uint(fields[0], "edge file", line_no);
        const auto dst = text::parse_uint(fields[1], "edge file", line_no);
        if (std::max(src, dst) >= std::numeric_limits<NodeId>::max()) {
            throw InputError("edge file line " + std::to_string(line_no) + ": node id too large");
        }
        max_edge_id = std::max({max_edge_id, src, dst});
        any_edge = true;
        edges.emplace_back(static_cast<NodeId>(src), static_cast<NodeId>(dst));
    }

    std::vector<std::optional<Color>> colors;
    line_no = 0;
    while (std::getline(color_in, line)) {
        ++line_no;
        if (text::is_skippable(line)) continue;
        const auto fields = text::split_fields(line);
        if (fields.size() != 2) {
            throw InputError("color file line " + std::to_string(line_no) +
                             ": expected 'node<TAB>color'");
        }
        const auto node = text::parse_uint(fields[0], "color file", line_no);
        const auto value = text::parse_uint(fields[1], "color file", line_no);
        if (value > 1) {
            throw InputError("color file line " + std::to_string(line_no) +
                             ": color must be 0 or 1");
        }
        if (node >= std::numeric_limits<NodeId>::max()) {
            throw InputError("color file line " + std::to_string(line_no) + ": node id too large");
        }
        if (node >= colors.size()) colors.resize(node + 1);
        if (colors[node]) {
            throw InputError("color file line " + std::to_string(line_no) + ": node " +
                             std::to_string(node) + " colored twice");
        }
        colors[node] = value == 1 ? Color::Red : Color::Blue;
    }

    if (any_edge && max_edge_id >= colors.size()) {
        throw InputError("node " + std::to_string(max_edge_id) + " is uncolored");
    }
    std::vector<Color> dense(colors.size());
    for (std::size_t i = 0; i < colors.size(); ++i) {
        if (!colors[i]) {
            throw InputError("node " + std::to_string(i) +
                             " is uncolored (node ids must be dense)");
        }
        dense[i] = *colors[i];
    }
    if (dense.empty()) throw InputError("graph has no nodes");
    return ColoredGraph(std::move(dense), edges);
}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    return out;
}

} // namespace

ColoredGraph load_graph(const std::filesystem::path& edge_path,
                        const std::filesystem::path& color_path) {
    auto edges = open_input(edge_path);
    auto colors = open_input(color_path);
    return read_graph(edges, colors);
}

void write_edges(const ColoredGraph& g, std::ostream& out) {
    for (NodeId i = 0; i < g.size(); ++i) {
        for (NodeId j : g.out_neighbors(i)) out << i << '\t' << j << '\n';
    }
}

void write_colors(const ColoredGraph& g, std::ostream& out) {
    for (NodeId i = 0; i < g.size(); ++i) out << i << '\t' << (g.is_red(i) ? 1 : 0) << '\n';
}

void save_graph(const ColoredGraph& g, const std::filesystem::path& edge_path,
                const std::filesystem::path& color_path) {
    auto edges = open_output(edge_path);
    write_edges(g, edges);
    auto colors = open_output(color_path);
    write_colors(g, colors);
}

void write_summary_csv(const ColoredGraph& g, std::ostream& out) {
    const auto stats = group_stats(g);
    const auto opt = [](const std::optional<double>& v) {
        return v ? text::format_double(*v) : std::string{};
    };
    out << "n,edges,r,b,cross_R,cross_B\n"
        << g.size() << ',' << g.edge_count() << ',' << text::format_double(stats.red_fraction)
        << ',' << text::format_double(stats.blue_fraction) << ',' << opt(stats.cross_red) << ','
        << opt(stats.cross_blue) << '\n';
}

std::vector<NodeId> read_node_set(std::istream& in, std::size_t node_count) {
    std::vector<NodeId> nodes;
    std::unordered_set<NodeId> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::is_skippable(line)) continue;
        for (const auto field : text::split_fields(line)) {
            const auto id = text::parse_uint(field, "node set", line_no);
            if (id >= node_count) {
                throw InputError("node set line " + std::to_string(line_no) + ": node " +
                                 std::to_string(id) + " not in graph");
            }
            if (seen.insert(static_cast<NodeId>(id)).second) {
                nodes.push_back(static_cast<NodeId>(id));
            }
        }
    }
    return nodes;
}

std::vector<NodeId> load_node_set(const std::filesystem::path& path, std::size_t node_count) {
    auto in = open_input(path);
    return read_node_set(in, node_count);
}

} // namespace fairpr
