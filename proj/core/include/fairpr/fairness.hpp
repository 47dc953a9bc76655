#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "fairpr/graph.hpp"
#include "fairpr/pagerank.hpp"

namespace fairpr {

/// Absolute tolerance on probability mass when calling a vector fair.
inline constexpr double kFairnessTolerance = 1e-7;

/// Σ_{i∈R} p[i]
double red_mass(std::span<const double> p, const ColoredGraph& g);

/// ‖f − p_O‖². Throws InputError on a dimension mismatch.
double utility_loss(std::span<const double> f, std::span<const double> original);

/**
 * The φ-fair probability vector closest to `original` in squared distance.
 *
 * The over-served group gives up its excess Δ by repeated uniform
 * transfers: every node still holding mass gives the same amount β (the
 * smallest remaining holding, or less on the final round), and the
 * under-served group receives Δ spread uniformly.
 */
std::vector<double> lower_bound_vector(std::span<const double> original, const ColoredGraph& g,
                                       double phi);

struct FairnessReport {
    double phi = 0.0;
    double red_mass = 0.0;
    bool fair = false;
    double loss = 0.0;
    double lower_bound_loss = 0.0;
};

FairnessReport make_report(std::span<const double> scores, std::span<const double> original,
                           const ColoredGraph& g, double phi);

struct AuditEntry {
    NodeId node = 0;
    double adjusted_red_mass = 0.0;  ///< PR_i(R) − γ[i ∈ R]
    bool fair = false;
};

struct Histogram {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<std::size_t> red;   ///< counts of red audited nodes per bin
    std::vector<std::size_t> blue;

    std::size_t bins() const { return red.size(); }
};

struct PersonalizedAudit {
    double phi = 0.0;
    double gamma = 0.0;
    double target = 0.0;  ///< φ(1−γ)
    std::vector<AuditEntry> entries;
    double red_mean = 0.0;   ///< NaN when no red node was audited
    double blue_mean = 0.0;
    Histogram histogram;

    bool all_fair() const;
};

/// Nodes to audit. Without a request: all nodes up to 5000, otherwise 1000.
/// A request of at least n audits everything. Partial samples keep the
/// color proportions (at least one node of each group) and are sorted.
std::vector<NodeId> audit_sample(const ColoredGraph& g, std::optional<std::size_t> requested,
                                 std::uint64_t seed);

/// Personalized PageRank of every sampled node, one independent solve each.
PersonalizedAudit personalized_audit(const TransitionModel& m, const ColoredGraph& g, double phi,
                                     std::span<const NodeId> sample,
                                     const PageRankOptions& opts = {}, std::size_t bins = 20);

/// True iff every effective row of `m` puts mass φ on red nodes.
bool converse_check(const TransitionModel& m, const ColoredGraph& g, double phi,
                    double tol = 1e-9);

/// `node,color,adjusted_red_mass,fair`
void write_audit_csv(const PersonalizedAudit& audit, const ColoredGraph& g, std::ostream& out);
/// `bin_lo,bin_hi,red_count,blue_count`
void write_histogram_csv(const Histogram& h, std::ostream& out);

} // namespace fairpr
