#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairpr/fspr.hpp"
#include "fairpr/graph.hpp"
#include "fairpr/lfpr.hpp"
#include "fairpr/pagerank.hpp"

namespace fairpr::cli {

enum class Algorithm { Opr, Fspr, LfprN, LfprU, LfprP, LfprO };

Algorithm parse_algorithm(std::string_view name);
const char* to_string(Algorithm a);
const std::vector<std::string>& algorithm_names();

struct Settings {
    PageRankOptions pagerank;
    FsprOptions fspr;
    ResidualSearchOptions search;
    std::optional<TargetGroups> target;
};

/// Everything computed once per graph.
struct Instance {
    const ColoredGraph* graph = nullptr;
    TransitionModel model;
    std::vector<double> original;
};

Instance make_instance(const ColoredGraph& g, const PageRankOptions& opts);

struct RunResult {
    std::vector<double> scores;
    std::optional<FsprSolution> fspr;
    std::optional<ResidualPolicy> policy;
};

/// Throws InfeasibleError for an unreachable FSPR target, InputError for
/// unsupported combinations.
RunResult run_algorithm(Algorithm algo, const Instance& inst, double phi, const Settings& s);

/// The transition matrix the algorithm's walk actually uses.
TransitionModel algorithm_model(Algorithm algo, const Instance& inst, double phi, const Settings& s);

} // namespace fairpr::cli
