#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fairpr/graph.hpp"
#include "fairpr/pagerank.hpp"

namespace fairpr {

enum class Feasibility {
    Feasible,
    InfeasibleLow,   ///< every node gives its personalized walk more than φ red mass
    InfeasibleHigh,  ///< every node gives less than φ
};

/// A jump vector with red mass φ exists iff min(Q_R) ≤ φ ≤ max(Q_R).
Feasibility feasibility_check(std::span<const double> red_absorption, double phi);

const char* to_string(Feasibility f);

/// Absorption vectors of a target set S and its protected part S_R.
struct TargetedAbsorption {
    std::vector<double> target;            ///< Q_S
    std::vector<double> protected_target;  ///< Q_{S_R}
};

/**
 * Jump-vector fairness problem: minimize ‖xᵀQ − p_O‖² over the simplex
 * subject to xᵀQ_R = φ, or for targeted runs xᵀQ_{S_R} = φ·xᵀQ_S.
 *
 * Q is never formed; products with Q and Qᵀ go through `model`, which must
 * outlive the problem.
 */
struct FsprProblem {
    const TransitionModel* model = nullptr;
    PageRankOptions pagerank;
    std::vector<double> original;        ///< p_O
    std::vector<double> red_absorption;  ///< Q_R
    double phi = 0.5;
    std::optional<TargetedAbsorption> targeted;

    /// The equality constraint as aᵀx = c.
    std::vector<double> constraint() const;
    double constraint_rhs() const;
};

/// Computes p_O (uniform jump) and Q_R for `model`.
FsprProblem make_fspr_problem(const TransitionModel& model, const ColoredGraph& g, double phi,
                              const PageRankOptions& opts = {});

/// Adds Q_S and Q_{S_R}. Throws InputError unless S is non-empty and S_R is
/// a non-empty proper subset of S.
FsprProblem make_targeted_fspr_problem(const TransitionModel& model, const ColoredGraph& g,
                                       std::span<const NodeId> target,
                                       std::span<const NodeId> protected_target, double phi,
                                       const PageRankOptions& opts = {});

struct FsprOptions {
    double tol = 1e-8;            ///< gradient-mapping L2 norm at the returned point
    std::size_t max_iters = 5000;
};

struct FsprSolution {
    std::vector<double> jump;     ///< x
    std::vector<double> scores;   ///< xᵀQ
    double achieved = 0.0;        ///< xᵀQ_R (targeted: xᵀQ_{S_R} / xᵀQ_S)
    double fairness_residual = 0.0;  ///< |aᵀx − c|
    double loss = 0.0;
    double kkt_residual = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Accelerated projected gradient with backtracking and adaptive restart.
/// Throws InfeasibleError when no simplex point meets the constraint; a run that
/// exhausts its budget returns the best iterate with converged = false.
FsprSolution solve_fspr(const FsprProblem& problem, const FsprOptions& opts = {});
FsprSolution solve_targeted_fspr(const FsprProblem& problem, const FsprOptions& opts = {});

/// PageRank of `model` restarted from `jump`.
std::vector<double> fair_pagerank_from_jump(const TransitionModel& model,
                                            std::span<const double> jump,
                                            const PageRankOptions& opts = {});

/// The feasible two-point jump from the feasibility argument: mass split
/// between argmin(a) and argmax(a) so that aᵀx = c.
std::vector<double> two_point_jump(std::span<const double> a, double c);

} // namespace fairpr
