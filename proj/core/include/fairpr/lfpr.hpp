#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fairpr/graph.hpp"
#include "fairpr/pagerank.hpp"

namespace fairpr {

/**
 * Per-node split of a graph into a locally fair neighbor part and a residual.
 *
 * A non-sink node whose red out-share is below φ is red-deficient: each
 * out-neighbor receives ρ_R = (1−φ)/out_B and the residual
 * δ_R = φ − (1−φ)·out_R/out_B is owed to red nodes. Otherwise it is
 * blue-deficient with ρ_B = φ/out_R and δ_B = (1−φ) − φ·out_B/out_R.
 * Sinks are both, with δ_R = φ and δ_B = 1−φ.
 */
struct ResidualDecomposition {
    double phi = 0.5;
    SparseRows local;                    ///< P_L
    std::vector<std::uint8_t> red_deficient;   ///< L_R membership
    std::vector<std::uint8_t> blue_deficient;  ///< L_B membership
    std::vector<double> red_residual;    ///< δ_R
    std::vector<double> blue_residual;   ///< δ_B
    std::vector<double> red_share;       ///< ρ_R, zero outside L_R
    std::vector<double> blue_share;      ///< ρ_B, zero outside L_B
};

ResidualDecomposition residual_decompose(const ColoredGraph& g, double phi);

enum class PolicyKind { Neighborhood, Uniform, Proportional, Optimized };

const char* to_string(PolicyKind kind);

/// How residual mass is routed. Shared-vector kinds carry x (over red nodes)
/// and y (over blue nodes); Neighborhood routes each node's residual over
/// its own same-group out-neighbors and carries no vectors.
struct ResidualPolicy {
    PolicyKind kind = PolicyKind::Uniform;
    std::vector<double> red_weights;   ///< x
    std::vector<double> blue_weights;  ///< y
};

/// Neighborhood, Uniform or Proportional. Proportional needs the original
/// PageRank and throws InputError if either group has zero mass in it.
/// Optimized policies come from optimize_residuals.
ResidualPolicy make_policy(PolicyKind kind, const ColoredGraph& g,
                           std::span<const double> original = {});

/// φ/|R| on red nodes, (1−φ)/|B| on blue nodes.
std::vector<double> build_fair_jump(const ColoredGraph& g, double phi);

/// P_N = φ P_R + (1−φ) P_B, where P_R spreads uniformly over a node's red
/// out-neighbors, or over all red nodes if it has none (same for blue).
TransitionModel build_neighborhood_model(const ColoredGraph& g, double phi);

/// P_L + residual routing for `policy`.
TransitionModel build_residual_model(const ColoredGraph& g, double phi,
                                     const ResidualPolicy& policy);

/// Fixed point of the residual model restarted from the fair jump vector.
std::vector<double> lfpr_pagerank(const ColoredGraph& g, double phi, const ResidualPolicy& policy,
                                  const PageRankOptions& opts = {});

struct ResidualSearchOptions {
    std::size_t iterations = 200;   ///< I
    std::size_t directions = 64;    ///< K
    double penalty = 10.0;          ///< λ
    std::uint64_t seed = 1;
    double min_relative_improvement = 1e-9;
    std::size_t stall_limit = 10;   ///< consecutive iterations below the threshold
    std::size_t line_search_evals = 20;
};

struct OptimizedPolicy {
    ResidualPolicy policy;          ///< kind == Optimized
    double loss = 0.0;              ///< ‖p_L − p_O‖² at the returned policy
    double start_loss = 0.0;
    PolicyKind start = PolicyKind::Uniform;
    double penalty_residual = 0.0;  ///< λ-term at the last line-search minimum, before renormalizing
    std::size_t iterations = 0;
};

/**
 * Stochastic random search over the residual vectors (x, y).
 *
 * Each iteration draws K unit directions over the (x, y) coordinates, keeps
 * the one with the steepest descent of the penalized loss, and runs a
 * golden-section line search on it, bracketed so every coordinate stays
 * non-negative. The line-search point is renormalized onto the two
 * distributions and accepted only if it lowers the loss. Starts from the
 * better of the Uniform and Proportional policies, so the result is never
 * worse than either. Deterministic for a fixed seed.
 */
OptimizedPolicy optimize_residuals(const ColoredGraph& g, double phi,
                                   std::span<const double> original,
                                   const PageRankOptions& opts = {},
                                   const ResidualSearchOptions& search = {});

/// A target set S and its protected part S_R ⊂ S.
struct TargetGroups {
    std::vector<NodeId> members;
    std::vector<NodeId> protected_members;
};

/// S_R defaults to the red members of S.
TargetGroups make_target_groups(const ColoredGraph& g, std::span<const NodeId> members);

/**
 * Transition model for targeted local fairness.
 *
 * Every node with out-edges into S keeps 1/out(i) on each out-neighbor
 * outside S and re-splits its into-S mass m as φ·m to S_R and (1−φ)·m to
 * S_B: per edge for Neighborhood (uniform over the sub-group when it has no
 * neighbors there), or via ρ plus a residual routed by the Uniform or
 * Proportional vector over S_R / S_B. Sinks send 1/n to each node outside S
 * and split their |S|/n share the same way. Throws InputError for an empty
 * S, S_R or S_B, or for kind == Optimized.
 */
TransitionModel build_targeted_model(const ColoredGraph& g, const TargetGroups& target, double phi,
                                     PolicyKind kind, std::span<const double> original = {});

/// 1/n outside S; the |S|/n mass of S split φ over S_R and 1−φ over S_B.
std::vector<double> build_targeted_jump(const ColoredGraph& g, const TargetGroups& target,
                                        double phi);

std::vector<double> targeted_lfpr(const ColoredGraph& g, const TargetGroups& target, double phi,
                                  PolicyKind kind, const PageRankOptions& opts = {},
                                  std::span<const double> original = {});

} // namespace fairpr
