#include "fairpr/fspr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "fairpr/errors.hpp"
#include "fairpr/projection.hpp"

namespace fairpr {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

// Entries of the targeted functional below this magnitude are rounding noise
// from two absorption solves and are treated as zero.
constexpr double kFunctionalNoise = 1e-14;

} // namespace

Feasibility feasibility_check(std::span<const double> red_absorption, double phi) {
    if (red_absorption.empty()) throw InputError("empty absorption vector");
    const auto [lo, hi] = std::minmax_element(red_absorption.begin(), red_absorption.end());
    if (*lo > phi) return Feasibility::InfeasibleLow;
    if (*hi < phi) return Feasibility::InfeasibleHigh;
    return Feasibility::Feasible;
}

const char* to_string(Feasibility f) {
    switch (f) {
    case Feasibility::Feasible: return "feasible";
    case Feasibility::InfeasibleLow: return "infeasible_low";
    case Feasibility::InfeasibleHigh: return "infeasible_high";
    }
    return "unknown";
}

std::vector<double> FsprProblem::constraint() const {
    if (!targeted) return red_absorption;
    std::vector<double> a(targeted->target.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = targeted->protected_target[i] - phi * targeted->target[i];
        if (std::abs(a[i]) <= kFunctionalNoise) a[i] = 0.0;
    }
    return a;
}

double FsprProblem::constraint_rhs() const { return targeted ? 0.0 : phi; }

FsprProblem make_fspr_problem(const TransitionModel& model, const ColoredGraph& g, double phi,
                              const PageRankOptions& opts) {
    if (!(phi > 0.0 && phi < 1.0)) throw InputError("phi must lie in (0, 1)");
    FsprProblem p;
    p.model = &model;
    p.pagerank = opts;
    p.phi = phi;
    p.original = power_iterate(model, uniform_vector(model.size()), opts);
    p.red_absorption = red_absorption_vector(model, g, opts);
    return p;
}

FsprProblem make_targeted_fspr_problem(const TransitionModel& model, const ColoredGraph& g,
                                       std::span<const NodeId> target,
                                       std::span<const NodeId> protected_target, double phi,
                                       const PageRankOptions& opts) {
    const std::size_t n = model.size();
    std::unordered_set<NodeId> in_target(target.begin(), target.end());
    if (in_target.empty()) throw InputError("target set is empty");
    std::unordered_set<NodeId> in_protected(protected_target.begin(), protected_target.end());
    if (in_protected.empty()) throw InputError("protected part of the target set is empty");
    for (NodeId i : in_protected) {
        if (!in_target.count(i)) throw InputError("protected node outside the target set");
    }
    if (in_protected.size() == in_target.size()) {
        throw InputError("target set has no unprotected member");
    }
    std::vector<double> s(n, 0.0), sr(n, 0.0);
    for (NodeId i : in_target) {
        if (i >= n) throw InputError("target node out of range");
        s[i] = 1.0;
    }
    for (NodeId i : in_protected) sr[i] = 1.0;

    auto p = make_fspr_problem(model, g, phi, opts);
    p.targeted = TargetedAbsorption{absorption(model, s, opts), absorption(model, sr, opts)};
    return p;
}

std::vector<double> two_point_jump(std::span<const double> a, double c) {
    const auto [lo, hi] = std::minmax_element(a.begin(), a.end());
    if (*lo > c || *hi < c) throw InfeasibleError("constraint value outside [min a, max a]");
    std::vector<double> x(a.size(), 0.0);
    const auto ilo = static_cast<std::size_t>(lo - a.begin());
    const auto ihi = static_cast<std::size_t>(hi - a.begin());
    if (*hi - *lo <= 0.0) {
        x[ilo] = 1.0;
        return x;
    }
    const double w = (*hi - c) / (*hi - *lo);
    x[ilo] += w;
    x[ihi] += 1.0 - w;
    return x;
}

std::vector<double> fair_pagerank_from_jump(const TransitionModel& model,
                                            std::span<const double> jump,
                                            const PageRankOptions& opts) {
    return power_iterate(model, jump, opts);
}

namespace {

FsprSolution solve_slice(const FsprProblem& prob, std::span<const double> a, double c,
                         const FsprOptions& opts) {
    const TransitionModel& m = *prob.model;
    const std::size_t n = m.size();
    const auto& target = prob.original;
    const auto& pr = prob.pagerank;

    auto forward = [&](std::span<const double> x, std::span<const double> start) {
        return jump_response(m, x, pr, start);
    };
    // ∇f(x) = 2 Q (Qᵀx − p_O)
    std::vector<double> last_q;
    auto gradient = [&](std::span<const double> scores) {
        std::vector<double> r(n);
        for (std::size_t j = 0; j < n; ++j) r[j] = scores[j] - target[j];
        last_q = absorption(m, r, pr, last_q);
        std::vector<double> g(last_q);
        for (double& v : g) v *= 2.0;
        return g;
    };
    auto mapping_norm = [&](std::span<const double> x, std::span<const double> g, double t) {
        std::vector<double> step(n);
        for (std::size_t i = 0; i < n; ++i) step[i] = x[i] - t * g[i];
        const auto proj = project_simplex_slice(step, a, c);
        return std::sqrt(squared_distance(x, proj)) / t;
    };

    std::vector<double> x = project_simplex_slice(uniform_vector(n), a, c);
    std::vector<double> px = forward(x, {});
    double fx = squared_distance(px, target);
    std::vector<double> x_prev = x, px_prev = px;

    double t = 1.0;
    double theta = 1.0;
    FsprSolution sol;
    std::vector<double> y(n), py(n), step(n);

    for (std::size_t k = 1; k <= opts.max_iters; ++k) {
        sol.iterations = k;
        const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
        const double beta = (theta - 1.0) / theta_next;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = x[i] + beta * (x[i] - x_prev[i]);
            py[i] = px[i] + beta * (px[i] - px_prev[i]);
        }
        const auto g = gradient(py);

        // For a quadratic, f(y + d) − f(y) − ∇f(y)ᵀd = ‖Qᵀd‖², so the
        // sufficient-decrease test needs no cancellation-prone differences.
        std::vector<double> xn, pxn;
        double d2 = 0.0;
        for (int bt = 0; bt < 200; ++bt) {
            for (std::size_t i = 0; i < n; ++i) step[i] = y[i] - t * g[i];
            xn = project_simplex_slice(step, a, c);
            pxn = forward(xn, py);
            d2 = squared_distance(xn, y);
            if (squared_distance(pxn, py) <= d2 / (2.0 * t) * (1.0 + 1e-12)) break;
            t *= 0.5;
        }
        const double fn = squared_distance(pxn, target);
        const double map_y = std::sqrt(d2) / t;

        if (fn > fx && beta != 0.0) {
            // Momentum overshot: restart from x without accepting.
            theta = 1.0;
            x_prev = x;
            px_prev = px;
            continue;
        }
        x_prev.swap(x);
        px_prev.swap(px);
        x = std::move(xn);
        px = std::move(pxn);
        fx = fn;
        theta = theta_next;

        if (map_y <= opts.tol) {
            const double map_x = mapping_norm(x, gradient(px), t);
            sol.kkt_residual = map_x;
            if (map_x <= opts.tol) {
                sol.converged = true;
                break;
            }
            theta = 1.0;
            x_prev = x;
            px_prev = px;
        }
    }
    if (!sol.converged) sol.kkt_residual = mapping_norm(x, gradient(px), t);

    sol.jump = std::move(x);
    sol.scores = jump_response(m, sol.jump, pr, px);
    sol.loss = squared_distance(sol.scores, target);
    sol.fairness_residual = std::abs(dot(a, sol.jump) - c);
    if (prob.targeted) {
        sol.achieved = dot(prob.targeted->protected_target, sol.jump) /
                       dot(prob.targeted->target, sol.jump);
    } else {
        sol.achieved = dot(prob.red_absorption, sol.jump);
    }
    return sol;
}

void check_problem(const FsprProblem& p) {
    if (p.model == nullptr) throw InputError("FSPR problem has no model");
    const std::size_t n = p.model->size();
    if (p.original.size() != n || p.red_absorption.size() != n) {
        throw InputError("FSPR problem vectors have wrong dimension");
    }
    if (!(p.phi > 0.0 && p.phi < 1.0)) throw InputError("phi must lie in (0, 1)");
}

} // namespace

FsprSolution solve_fspr(const FsprProblem& problem, const FsprOptions& opts) {
    check_problem(problem);
    if (problem.targeted) throw InputError("targeted problem passed to solve_fspr");
    const auto verdict = feasibility_check(problem.red_absorption, problem.phi);
    if (verdict != Feasibility::Feasible) {
        throw InfeasibleError(std::string("no jump vector reaches red mass phi (") +
                              to_string(verdict) + ")");
    }
    return solve_slice(problem, problem.red_absorption, problem.phi, opts);
}

FsprSolution solve_targeted_fspr(const FsprProblem& problem, const FsprOptions& opts) {
    check_problem(problem);
    if (!problem.targeted) throw InputError("solve_targeted_fspr needs target absorption vectors");
    const auto a = problem.constraint();
    const auto [lo, hi] = std::minmax_element(a.begin(), a.end());
    if (*lo > 0.0 || *hi < 0.0) {
        throw InfeasibleError("targeted constraint has no sign change over the simplex vertices");
    }
    return solve_slice(problem, a, 0.0, opts);
}

} // namespace fairpr
