#pragma once

#include <cstddef>
#include <cstdint>

#include "fairpr/graph.hpp"

namespace fairpr {

/// Biased preferential attachment. α_R (α_B) is the probability that an
/// arriving red (blue) node accepts a same-color candidate; a cross-color
/// candidate is accepted with 1 − α.
struct SynthConfig {
    std::size_t nodes = 2000;
    std::size_t seed_nodes = 10;     ///< n0, size of the initial ring
    double red_probability = 0.5;    ///< r
    double alpha_red = 0.5;
    double alpha_blue = 0.5;
    std::size_t edges_per_node = 1;
    std::uint64_t seed = 1;
};

/**
 * Grows a graph from a ring over n0 nodes (⌈n0·r⌉ of them red, spread
 * evenly). Each arriving node draws its color, then samples existing nodes
 * proportionally to degree until it has accepted edges_per_node distinct
 * targets. Every edge is stored in both directions.
 *
 * If a group ends up empty the run is repeated with seed
 * derive_seed(seed, attempt). Throws InputError for an invalid config.
 */
ColoredGraph generate(const SynthConfig& cfg);

} // namespace fairpr
