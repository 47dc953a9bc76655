#pragma once

// Dense reference computations for small graphs. These invert or factor
// n×n matrices and exist to cross-check the sparse fixed-point solvers.

#include <cstddef>

#include <Eigen/Dense>

#include "fairpr/fspr.hpp"
#include "fairpr/pagerank.hpp"

namespace fairpr {

inline constexpr std::size_t kDenseCap = 2000;

Eigen::MatrixXd to_eigen(const TransitionModel& m);

/// Q = γ [I − (1−γ) M]⁻¹. Row i is node i's personalized PageRank.
/// Throws InputError when the model exceeds `cap` nodes.
Eigen::MatrixXd dense_q(const TransitionModel& m, double gamma, std::size_t cap = kDenseCap);

/// Jump-vector problem solved with the dense Hessian 2QQᵀ by a primal
/// active-set method (equality-constrained Newton steps on the free set,
/// started from the two-point feasible jump). Targeted problems are
/// supported. Reference path for small instances.
FsprSolution solve_fspr_dense(const FsprProblem& problem, std::size_t cap = kDenseCap);

} // namespace fairpr
