#include "algorithms.hpp"

#include <stdexcept>

#include "fairpr/errors.hpp"

namespace fairpr::cli {

namespace {

PolicyKind policy_kind(Algorithm a) {
    switch (a) {
    case Algorithm::LfprN: return PolicyKind::Neighborhood;
    case Algorithm::LfprU: return PolicyKind::Uniform;
    case Algorithm::LfprP: return PolicyKind::Proportional;
    case Algorithm::LfprO: return PolicyKind::Optimized;
    default: throw std::logic_error("not a locally fair algorithm");
    }
}

ResidualPolicy lfpr_policy(Algorithm algo, const Instance& inst, double phi, const Settings& s) {
    if (algo == Algorithm::LfprO) {
        return optimize_residuals(*inst.graph, phi, inst.original, s.pagerank, s.search).policy;
    }
    return make_policy(policy_kind(algo), *inst.graph, inst.original);
}

} // namespace

const std::vector<std::string>& algorithm_names() {
    static const std::vector<std::string> names{"opr", "fspr", "lfpr-n", "lfpr-u", "lfpr-p", "lfpr-o"};
    return names;
}

Algorithm parse_algorithm(std::string_view name) {
    const auto& names = algorithm_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return static_cast<Algorithm>(i);
    }
    throw InputError("unknown algorithm '" + std::string(name) + "'");
}

const char* to_string(Algorithm a) { return algorithm_names()[static_cast<std::size_t>(a)].c_str(); }

Instance make_instance(const ColoredGraph& g, const PageRankOptions& opts) {
    Instance inst{&g, standard_transition(g), {}};
    inst.original = power_iterate(inst.model, uniform_vector(g.size()), opts);
    return inst;
}

RunResult run_algorithm(Algorithm algo, const Instance& inst, double phi, const Settings& s) {
    const ColoredGraph& g = *inst.graph;
    RunResult r;
    switch (algo) {
    case Algorithm::Opr:
        r.scores = inst.original;
        return r;
    case Algorithm::Fspr: {
        FsprProblem prob;
        if (s.target) {
            prob = make_targeted_fspr_problem(inst.model, g, s.target->members,
                                              s.target->protected_members, phi, s.pagerank);
            r.fspr = solve_targeted_fspr(prob, s.fspr);
        } else {
            prob = make_fspr_problem(inst.model, g, phi, s.pagerank);
            r.fspr = solve_fspr(prob, s.fspr);
        }
        r.scores = r.fspr->scores;
        return r;
    }
    default:
        break;
    }
    if (s.target) {
        if (algo == Algorithm::LfprO) throw InputError("lfpr-o does not support targeted runs");
        r.scores = targeted_lfpr(g, *s.target, phi, policy_kind(algo), s.pagerank, inst.original);
        return r;
    }
    r.policy = lfpr_policy(algo, inst, phi, s);
    r.scores = lfpr_pagerank(g, phi, *r.policy, s.pagerank);
    return r;
}

TransitionModel algorithm_model(Algorithm algo, const Instance& inst, double phi, const Settings& s) {
    if (algo == Algorithm::Opr || algo == Algorithm::Fspr) return inst.model;
    if (s.target) {
        if (algo == Algorithm::LfprO) throw InputError("lfpr-o does not support targeted runs");
        return build_targeted_model(*inst.graph, *s.target, phi, policy_kind(algo), inst.original);
    }
    return build_residual_model(*inst.graph, phi, lfpr_policy(algo, inst, phi, s));
}

} // namespace fairpr::cli
