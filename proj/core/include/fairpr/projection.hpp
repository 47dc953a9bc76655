#pragma once

#include <span>
#include <vector>

namespace fairpr {

/// Euclidean projection onto {x ≥ 0, Σx = mass}.
std::vector<double> project_simplex(std::span<const double> y, double mass = 1.0);

/**
 * Euclidean projection onto the slice {x ≥ 0, Σx = 1, aᵀx = c}.
 *
 * The minimizer has the form x = max(0, y − μ − ν a). For fixed ν the inner
 * problem is a simplex projection (fixing μ); aᵀx(ν) is non-increasing in ν,
 * so ν is found by bisection. The result is then polished by solving the
 * 2×2 system for (μ, ν) on the detected support, which makes both equality
 * constraints hold to rounding.
 *
 * Requires min(a) ≤ c ≤ max(a); throws InfeasibleError otherwise.
 */
std::vector<double> project_simplex_slice(std::span<const double> y, std::span<const double> a,
                                          double c);

} // namespace fairpr
