#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fairpr/graph.hpp"

namespace fairpr {

/// Compressed sparse rows over nodes.
struct SparseRows {
    std::vector<std::size_t> offsets{0};
    std::vector<NodeId> columns;
    std::vector<double> values;

    std::size_t rows() const { return offsets.size() - 1; }
    void push(NodeId column, double value) {
        columns.push_back(column);
        values.push_back(value);
    }
    void end_row() { offsets.push_back(columns.size()); }
};

/// A rank-one update `source * targetᵀ` added to the sparse base.
struct RankOneTerm {
    std::vector<double> source;
    std::vector<double> target;
};

/**
 * Row-stochastic transition structure `base + Σ sourceₜ targetₜᵀ`.
 *
 * The dense rows implied by sink handling and residual redistribution are
 * kept as rank-one terms, so one step of the walk costs O(edges + n·terms).
 *
 * The checked constructor enforces non-negative entries and unit row sums
 * within 1e-12.
 */
class TransitionModel {
public:
    static constexpr double kRowSumTolerance = 1e-12;

    TransitionModel(SparseRows base, std::vector<RankOneTerm> terms);

    /// Skips the stochasticity check. Used by the residual optimizer, which
    /// probes slightly unnormalized redistribution vectors.
    static TransitionModel unchecked(SparseRows base, std::vector<RankOneTerm> terms);

    /// Builds from a dense row-major n×n matrix (small test instances).
    static TransitionModel from_dense(std::span<const double> row_major, std::size_t n);

    std::size_t size() const { return base_.rows(); }
    const SparseRows& base() const { return base_; }
    const std::vector<RankOneTerm>& terms() const { return terms_; }

    /// out = pᵀ M
    void left_multiply(std::span<const double> p, std::span<double> out) const;
    /// out = M q
    void right_multiply(std::span<const double> q, std::span<double> out) const;

    /// Effective row i, dense.
    std::vector<double> row(NodeId i) const;
    /// Σ_j M[i,j] weight[j] for every row i (equals right_multiply).
    std::vector<double> row_masses(std::span<const double> weight) const;
    /// Dense row-major copy.
    std::vector<double> dense() const;

private:
    struct Unchecked {};
    TransitionModel(SparseRows base, std::vector<RankOneTerm> terms, Unchecked);

    SparseRows base_;
    std::vector<RankOneTerm> terms_;
};

struct PageRankOptions {
    double gamma = 0.15;          ///< restart probability
    double tol = 1e-12;           ///< L1 change between sweeps
    std::size_t max_iters = 10'000;
};

/// Row-normalized adjacency; sink rows become the uniform vector over all
/// nodes (carried as one rank-one term).
TransitionModel standard_transition(const ColoredGraph& g);

std::vector<double> uniform_vector(std::size_t n);
std::vector<double> unit_vector(std::size_t n, NodeId i);

/// Solves pᵀ = (1−γ) pᵀ M + γ vᵀ by repeated substitution. `v` must be a
/// probability vector. Throws ConvergenceError if max_iters is exhausted.
std::vector<double> power_iterate(const TransitionModel& m, std::span<const double> v,
                                  const PageRankOptions& opts = {});

/// Same fixed point for an arbitrary real `v` (the map v ↦ vᵀQ), optionally
/// warm-started from `start`.
std::vector<double> jump_response(const TransitionModel& m, std::span<const double> v,
                                  const PageRankOptions& opts = {},
                                  std::span<const double> start = {});

/// Solves q = γ g + (1−γ) M q, i.e. q = Q g with Q = γ[I − (1−γ)M]⁻¹.
/// For an indicator g of a node set A, q[j] is the personalized mass node j
/// gives to A.
std::vector<double> absorption(const TransitionModel& m, std::span<const double> g,
                               const PageRankOptions& opts = {},
                               std::span<const double> start = {});

/// Personalized PageRank of node i (jump vector e_i).
std::vector<double> personalized_pagerank(const TransitionModel& m, NodeId i,
                                          const PageRankOptions& opts = {});

/// Q_R: the red mass of every node's personalized PageRank, computed with
/// one backward fixed-point solve.
std::vector<double> red_absorption_vector(const TransitionModel& m, const ColoredGraph& g,
                                          const PageRankOptions& opts = {});

/// Personalized PageRank of every node, row-major n×n. Rows are computed as
/// independent tasks. Capped like dense_q.
std::vector<double> personalized_pagerank_all(const TransitionModel& m,
                                              const PageRankOptions& opts = {},
                                              std::size_t cap = 2000);

} // namespace fairpr
