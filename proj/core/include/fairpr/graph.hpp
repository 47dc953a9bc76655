#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace fairpr {

using NodeId = std::uint32_t;

/// Binary group label. Red is the protected group.
enum class Color : std::uint8_t { Blue = 0, Red = 1 };

using Edge = std::pair<NodeId, NodeId>;

/**
 * Directed graph with one binary color per node.
 *
 * Node ids are dense in [0, size()). Out-neighbors keep the order in which
 * edges were supplied. Per-node red/blue out-degree counts are computed once
 * at construction; the object is immutable afterwards and safe to share
 * between threads.
 */
class ColoredGraph {
public:
    /// Throws InputError on out-of-range endpoints, duplicate edges or an
    /// empty color group.
    ColoredGraph(std::vector<Color> colors, std::span<const Edge> edges);

    std::size_t size() const { return colors_.size(); }
    std::size_t edge_count() const { return targets_.size(); }

    std::span<const NodeId> out_neighbors(NodeId i) const {
        return {targets_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }
    std::size_t out_degree(NodeId i) const { return offsets_[i + 1] - offsets_[i]; }
    std::size_t red_out(NodeId i) const { return red_out_[i]; }
    std::size_t blue_out(NodeId i) const { return out_degree(i) - red_out_[i]; }
    bool is_sink(NodeId i) const { return out_degree(i) == 0; }

    Color color(NodeId i) const { return colors_[i]; }
    bool is_red(NodeId i) const { return colors_[i] == Color::Red; }
    std::span<const Color> colors() const { return colors_; }

    std::size_t red_count() const { return red_count_; }
    std::size_t blue_count() const { return size() - red_count_; }

    /// 1.0 at red nodes, 0.0 at blue nodes.
    std::vector<double> red_indicator() const;

    /// Edges in adjacency order (source-major).
    std::vector<Edge> edges() const;

    friend bool operator==(const ColoredGraph&, const ColoredGraph&) = default;

private:
    std::vector<Color> colors_;
    std::vector<std::size_t> offsets_;
    std::vector<NodeId> targets_;
    std::vector<std::size_t> red_out_;
    std::size_t red_count_ = 0;
};

/// Group sizes and homophily. A cross ratio is the share of a group's
/// out-edges that reach the other group, divided by that other group's node
/// fraction (the expected share under color-blind target choice). It is
/// absent when the group has no out-edges.
struct GroupStats {
    double red_fraction = 0.0;
    double blue_fraction = 0.0;
    std::optional<double> cross_red;
    std::optional<double> cross_blue;
};

GroupStats group_stats(const ColoredGraph& g);

/// Parses an edge list (`src<TAB>dst`) and a color file (`node<TAB>0|1`,
/// 1 = red). Blank lines and lines starting with '#' are skipped. Nodes that
/// only appear in the color file become isolated sinks.
ColoredGraph read_graph(std::istream& edges, std::istream& colors);
ColoredGraph load_graph(const std::filesystem::path& edge_path,
                        const std::filesystem::path& color_path);

void write_edges(const ColoredGraph& g, std::ostream& out);
void write_colors(const ColoredGraph& g, std::ostream& out);
void save_graph(const ColoredGraph& g, const std::filesystem::path& edge_path,
                const std::filesystem::path& color_path);

/// One header line plus one row: `n,edges,r,b,cross_R,cross_B`. Undefined
/// cross ratios are written as empty fields.
void write_summary_csv(const ColoredGraph& g, std::ostream& out);

/// Reads a node list, one id per line (comments allowed), as used for
/// targeted-fairness sets. Ids must be < node_count.
std::vector<NodeId> read_node_set(std::istream& in, std::size_t node_count);
std::vector<NodeId> load_node_set(const std::filesystem::path& path, std::size_t node_count);

} // namespace fairpr
