#include "fairpr/lfpr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fairpr/errors.hpp"
#include "fairpr/random.hpp"

namespace fairpr {

namespace {

void check_phi(double phi) {
    if (!(phi > 0.0 && phi < 1.0)) throw InputError("phi must lie in (0, 1)");
}

std::vector<double> group_uniform(const ColoredGraph& g, Color c) {
    const double count = static_cast<double>(c == Color::Red ? g.red_count() : g.blue_count());
    std::vector<double> v(g.size(), 0.0);
    for (NodeId i = 0; i < g.size(); ++i) {
        if (g.color(i) == c) v[i] = 1.0 / count;
    }
    return v;
}

bool any_positive(const std::vector<double>& v) {
    return std::any_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
}

void validate_weights(const ColoredGraph& g, const std::vector<double>& w, Color c,
                      const char* name) {
    if (w.size() != g.size()) throw InputError(std::string(name) + " has wrong dimension");
    double total = 0.0;
    for (NodeId j = 0; j < g.size(); ++j) {
        if (!(w[j] >= 0.0)) throw InputError(std::string(name) + " has a negative entry");
        if (w[j] > 0.0 && g.color(j) != c) {
            throw InputError(std::string(name) + " puts mass outside its group");
        }
        total += w[j];
    }
    if (std::abs(total - 1.0) > 1e-9) throw InputError(std::string(name) + " does not sum to 1");
}

} // namespace

const char* to_string(PolicyKind kind) {
    switch (kind) {
    case PolicyKind::Neighborhood: return "neighborhood";
    case PolicyKind::Uniform: return "uniform";
    case PolicyKind::Proportional: return "proportional";
    case PolicyKind::Optimized: return "optimized";
    }
    return "unknown";
}

ResidualDecomposition residual_decompose(const ColoredGraph& g, double phi) {
    check_phi(phi);
    const std::size_t n = g.size();
    ResidualDecomposition d;
    d.phi = phi;
    d.red_deficient.assign(n, 0);
    d.blue_deficient.assign(n, 0);
    d.red_residual.assign(n, 0.0);
    d.blue_residual.assign(n, 0.0);
    d.red_share.assign(n, 0.0);
    d.blue_share.assign(n, 0.0);
    d.local.columns.reserve(g.edge_count());
    d.local.values.reserve(g.edge_count());

    for (NodeId i = 0; i < n; ++i) {
        const auto out = static_cast<double>(g.out_degree(i));
        const auto red = static_cast<double>(g.red_out(i));
        const auto blue = static_cast<double>(g.blue_out(i));
        double share = 0.0;
        if (g.is_sink(i)) {
            d.red_deficient[i] = d.blue_deficient[i] = 1;
            d.red_residual[i] = phi;
            d.blue_residual[i] = 1.0 - phi;
        } else if (red / out < phi) {
            d.red_deficient[i] = 1;
            share = d.red_share[i] = (1.0 - phi) / blue;
            d.red_residual[i] = std::max(0.0, phi - (1.0 - phi) * red / blue);
        } else {
            d.blue_deficient[i] = 1;
            share = d.blue_share[i] = phi / red;
            d.blue_residual[i] = std::max(0.0, (1.0 - phi) - phi * blue / red);
        }
        for (NodeId j : g.out_neighbors(i)) d.local.push(j, share);
        d.local.end_row();
    }
    return d;
}

ResidualPolicy make_policy(PolicyKind kind, const ColoredGraph& g, std::span<const double> original) {
    ResidualPolicy p;
    p.kind = kind;
    switch (kind) {
    case PolicyKind::Neighborhood:
        break;
    case PolicyKind::Uniform:
        p.red_weights = group_uniform(g, Color::Red);
        p.blue_weights = group_uniform(g, Color::Blue);
        break;
    case PolicyKind::Proportional: {
        if (original.size() != g.size()) {
            throw InputError("proportional policy needs the original PageRank vector");
        }
        p.red_weights.assign(g.size(), 0.0);
        p.blue_weights.assign(g.size(), 0.0);
        double red_total = 0.0, blue_total = 0.0;
        for (NodeId j = 0; j < g.size(); ++j) (g.is_red(j) ? red_total : blue_total) += original[j];
        if (!(red_total > 0.0) || !(blue_total > 0.0)) {
            throw InputError("proportional policy: a group has zero original PageRank mass");
        }
        for (NodeId j = 0; j < g.size(); ++j) {
            if (g.is_red(j)) {
                p.red_weights[j] = original[j] / red_total;
            } else {
                p.blue_weights[j] = original[j] / blue_total;
            }
        }
        break;
    }
    case PolicyKind::Optimized:
        throw InputError("optimized policies are produced by optimize_residuals");
    }
    return p;
}

std::vector<double> build_fair_jump(const ColoredGraph& g, double phi) {
    check_phi(phi);
    std::vector<double> v(g.size());
    const double red = phi / static_cast<double>(g.red_count());
    const double blue = (1.0 - phi) / static_cast<double>(g.blue_count());
    for (NodeId i = 0; i < g.size(); ++i) v[i] = g.is_red(i) ? red : blue;
    return v;
}

TransitionModel build_neighborhood_model(const ColoredGraph& g, double phi) {
    check_phi(phi);
    const std::size_t n = g.size();
    SparseRows rows;
    std::vector<double> red_fallback(n, 0.0), blue_fallback(n, 0.0);
    for (NodeId i = 0; i < n; ++i) {
        const auto red = static_cast<double>(g.red_out(i));
        const auto blue = static_cast<double>(g.blue_out(i));
        for (NodeId j : g.out_neighbors(i)) rows.push(j, g.is_red(j) ? phi / red : (1.0 - phi) / blue);
        rows.end_row();
        if (g.red_out(i) == 0) red_fallback[i] = phi;
        if (g.blue_out(i) == 0) blue_fallback[i] = 1.0 - phi;
    }
    std::vector<RankOneTerm> terms;
    if (any_positive(red_fallback)) terms.push_back({std::move(red_fallback), group_uniform(g, Color::Red)});
    if (any_positive(blue_fallback)) terms.push_back({std::move(blue_fallback), group_uniform(g, Color::Blue)});
    return TransitionModel(std::move(rows), std::move(terms));
}

TransitionModel build_residual_model(const ColoredGraph& g, double phi, const ResidualPolicy& policy) {
    auto d = residual_decompose(g, phi);
    const std::size_t n = g.size();

    if (policy.kind != PolicyKind::Neighborhood) {
        validate_weights(g, policy.red_weights, Color::Red, "red residual vector");
        validate_weights(g, policy.blue_weights, Color::Blue, "blue residual vector");
        std::vector<RankOneTerm> terms;
        if (any_positive(d.red_residual)) terms.push_back({d.red_residual, policy.red_weights});
        if (any_positive(d.blue_residual)) terms.push_back({d.blue_residual, policy.blue_weights});
        return TransitionModel(std::move(d.local), std::move(terms));
    }

    // X_N / Y_N: the residual goes to the node's own same-group out-neighbors,
    // or uniformly over the whole group when it has none.
    SparseRows rows;
    std::vector<double> red_fallback(n, 0.0), blue_fallback(n, 0.0);
    for (NodeId i = 0; i < n; ++i) {
        const auto red = static_cast<double>(g.red_out(i));
        const auto blue = static_cast<double>(g.blue_out(i));
        const double share = d.red_share[i] + d.blue_share[i];
        for (NodeId j : g.out_neighbors(i)) {
            double w = share;
            if (g.is_red(j)) {
                w += d.red_residual[i] / red;
            } else {
                w += d.blue_residual[i] / blue;
            }
            rows.push(j, w);
        }
        rows.end_row();
        if (g.red_out(i) == 0) red_fallback[i] = d.red_residual[i];
        if (g.blue_out(i) == 0) blue_fallback[i] = d.blue_residual[i];
    }
    std::vector<RankOneTerm> terms;
    if (any_positive(red_fallback)) terms.push_back({std::move(red_fallback), group_uniform(g, Color::Red)});
    if (any_positive(blue_fallback)) terms.push_back({std::move(blue_fallback), group_uniform(g, Color::Blue)});
    return TransitionModel(std::move(rows), std::move(terms));
}

std::vector<double> lfpr_pagerank(const ColoredGraph& g, double phi, const ResidualPolicy& policy,
                                  const PageRankOptions& opts) {
    const auto model = build_residual_model(g, phi, policy);
    return power_iterate(model, build_fair_jump(g, phi), opts);
}

namespace {

// The residual walk P_L + δ_R xᵀ + δ_B yᵀ with x and y packed into one
// vector (their supports are the disjoint red and blue node sets).
constexpr double kMaxContraction = 0.95;

class ResidualWalk {
public:
    ResidualWalk(const ColoredGraph& g, double phi, const PageRankOptions& opts)
        : graph_(g), opts_(opts) {
        auto d = residual_decompose(g, phi);
        red_residual_ = std::move(d.red_residual);
        blue_residual_ = std::move(d.blue_residual);
        local_.emplace(TransitionModel::unchecked(std::move(d.local), {}));
        jump_ = build_fair_jump(g, phi);
    }

    std::size_t size() const { return graph_.size(); }
    bool is_red(std::size_t j) const { return graph_.is_red(static_cast<NodeId>(j)); }
    const std::vector<double>& red_residual() const { return red_residual_; }
    const std::vector<double>& blue_residual() const { return blue_residual_; }

    std::vector<double> scores(std::span<const double> w, std::span<const double> start) const {
        const std::size_t n = size();
        std::vector<double> p = start.empty() ? jump_ : std::vector<double>(start.begin(), start.end());
        std::vector<double> next(n);
        const double walk = 1.0 - opts_.gamma;
        for (std::size_t it = 0; it < opts_.max_iters; ++it) {
            local_->left_multiply(p, next);
            double to_red = 0.0, to_blue = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                to_red += p[i] * red_residual_[i];
                to_blue += p[i] * blue_residual_[i];
            }
            double change = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double routed = (is_red(j) ? to_red : to_blue) * w[j];
                next[j] = walk * (next[j] + routed) + opts_.gamma * jump_[j];
                change += std::abs(next[j] - p[j]);
            }
            p.swap(next);
            if (change <= opts_.tol) return p;
        }
        throw ConvergenceError("residual walk did not converge");
    }

    // zᵀ = rᵀ[I − (1−γ)P_L]⁻¹
    std::vector<double> local_solve(std::span<const double> r) const {
        const std::size_t n = size();
        std::vector<double> z(r.begin(), r.end()), next(n);
        double scale = 0.0;
        for (double v : r) scale += std::abs(v);
        const double tol = opts_.tol * std::max(1.0, scale);
        const double walk = 1.0 - opts_.gamma;
        for (std::size_t it = 0; it < opts_.max_iters; ++it) {
            local_->left_multiply(z, next);
            double change = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                next[j] = r[j] + walk * next[j];
                change += std::abs(next[j] - z[j]);
            }
            z.swap(next);
            if (change <= tol) return z;
        }
        throw ConvergenceError("residual walk did not converge");
    }

    const std::vector<double>& jump() const { return jump_; }

    // u = r + (1−γ) M u
    std::vector<double> adjoint(std::span<const double> w, std::span<const double> r) const {
        const std::size_t n = size();
        std::vector<double> u(r.begin(), r.end()), next(n);
        const double walk = 1.0 - opts_.gamma;
        for (std::size_t it = 0; it < opts_.max_iters; ++it) {
            local_->right_multiply(u, next);
            double x_dot = 0.0, y_dot = 0.0;
            for (std::size_t j = 0; j < n; ++j) (is_red(j) ? x_dot : y_dot) += w[j] * u[j];
            double change = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                next[i] = r[i] + walk * (next[i] + red_residual_[i] * x_dot + blue_residual_[i] * y_dot);
                change = std::max(change, std::abs(next[i] - u[i]));
            }
            u.swap(next);
            if (change <= opts_.tol) return u;
        }
        throw ConvergenceError("residual adjoint did not converge");
    }

private:
    const ColoredGraph& graph_;
    PageRankOptions opts_;
    std::optional<TransitionModel> local_;
    std::vector<double> red_residual_, blue_residual_, jump_;
};

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

} // namespace

OptimizedPolicy optimize_residuals(const ColoredGraph& g, double phi, std::span<const double> original,
                                   const PageRankOptions& opts, const ResidualSearchOptions& search) {
    check_phi(phi);
    const std::size_t n = g.size();
    if (original.size() != n) throw InputError("original PageRank has wrong dimension");
    const ResidualWalk walk(g, phi, opts);

    auto pack = [&](const ResidualPolicy& p) {
        std::vector<double> w(n);
        for (std::size_t j = 0; j < n; ++j) w[j] = walk.is_red(j) ? p.red_weights[j] : p.blue_weights[j];
        return w;
    };
    auto group_sums = [&](std::span<const double> w) {
        double red = 0.0, blue = 0.0;
        for (std::size_t j = 0; j < n; ++j) (walk.is_red(j) ? red : blue) += w[j];
        return std::pair{red, blue};
    };
    auto penalty = [&](std::span<const double> w) {
        const auto [red, blue] = group_sums(w);
        return search.penalty * ((red - 1.0) * (red - 1.0) + (blue - 1.0) * (blue - 1.0));
    };

    OptimizedPolicy result;
    std::vector<double> w = pack(make_policy(PolicyKind::Uniform, g));
    std::vector<double> p = walk.scores(w, {});
    double loss = squared_distance(p, original);
    {
        auto w_prop = pack(make_policy(PolicyKind::Proportional, g, original));
        auto p_prop = walk.scores(w_prop, p);
        const double loss_prop = squared_distance(p_prop, original);
        if (loss_prop < loss) {
            w.swap(w_prop);
            p.swap(p_prop);
            loss = loss_prop;
            result.start = PolicyKind::Proportional;
        }
    }
    result.start_loss = loss;

    // With a = pᵀδ_R and b = pᵀδ_B held fixed the scores are affine in the
    // weights: p = h + (1−γ)(a·X + b·Y), X = xᵀA⁻¹, Y = yᵀA⁻¹, A = I − (1−γ)P_L.
    // Along a search line X and Y are affine in t, so every line-search point
    // costs one 2×2 solve for (a, b).
    const double c = 1.0 - opts.gamma;
    auto group_part = [&](std::span<const double> v, bool red) {
        std::vector<double> out(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (walk.is_red(j) == red) out[j] = v[j];
        }
        return out;
    };
    auto dot = [](std::span<const double> a, std::span<const double> b) {
        return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
    };
    std::vector<double> h(walk.jump());
    for (double& v : h) v *= opts.gamma;
    h = walk.local_solve(h);
    const double h_red = dot(walk.red_residual(), h), h_blue = dot(walk.blue_residual(), h);
    auto x_w = walk.local_solve(group_part(w, true));
    auto y_w = walk.local_solve(group_part(w, false));

    Rng rng(search.seed);
    const double walk_factor = 2.0 * (1.0 - opts.gamma);
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    std::vector<double> grad(n), dir(n), best_dir(n), trial(n);
    std::size_t stalls = 0;

    for (std::size_t it = 0; it < search.iterations; ++it) {
        result.iterations = it + 1;

        std::vector<double> residual(n);
        for (std::size_t j = 0; j < n; ++j) residual[j] = p[j] - original[j];
        const auto u = walk.adjoint(w, residual);
        double to_red = 0.0, to_blue = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            to_red += p[i] * walk.red_residual()[i];
            to_blue += p[i] * walk.blue_residual()[i];
        }
        const auto [red_sum, blue_sum] = group_sums(w);
        for (std::size_t j = 0; j < n; ++j) {
            const bool red = walk.is_red(j);
            grad[j] = walk_factor * (red ? to_red : to_blue) * u[j] +
                      2.0 * search.penalty * ((red ? red_sum : blue_sum) - 1.0);
        }

        // Keep the random direction with the steepest descent slope.
        double best_slope = 0.0;
        for (std::size_t k = 0; k < search.directions; ++k) {
            for (double& v : dir) v = rng.normal();
            double slope = std::inner_product(grad.begin(), grad.end(), dir.begin(), 0.0);
            const double sign = slope > 0.0 ? -1.0 : 1.0;
            double norm = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                dir[j] *= sign;
                if (w[j] <= 0.0 && dir[j] < 0.0) dir[j] = 0.0;
                norm += dir[j] * dir[j];
            }
            if (norm == 0.0) continue;
            norm = std::sqrt(norm);
            for (double& v : dir) v /= norm;
            slope = std::inner_product(grad.begin(), grad.end(), dir.begin(), 0.0);
            if (slope < best_slope) {
                best_slope = slope;
                best_dir = dir;
            }
        }

        bool improved = false;
        double rel_gain = 0.0;
        if (best_slope < 0.0) {
            double t_max = 1.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (best_dir[j] < 0.0) t_max = std::min(t_max, w[j] / -best_dir[j]);
            }
            const auto x_d = walk.local_solve(group_part(best_dir, true));
            const auto y_d = walk.local_solve(group_part(best_dir, false));
            const auto& dr = walk.red_residual();
            const auto& db = walk.blue_residual();
            const double rx = dot(dr, x_w), rxd = dot(dr, x_d), ry = dot(dr, y_w), ryd = dot(dr, y_d);
            const double bx = dot(db, x_w), bxd = dot(db, x_d), by = dot(db, y_w), byd = dot(db, y_d);
            auto objective = [&](double t) {
                for (std::size_t j = 0; j < n; ++j) trial[j] = std::max(0.0, w[j] + t * best_dir[j]);
                // Past this the walk no longer contracts.
                const auto [red, blue] = group_sums(trial);
                if (c * std::max(red, blue) > kMaxContraction) return std::numeric_limits<double>::infinity();
                const double m11 = 1.0 - c * (rx + t * rxd), m12 = -c * (ry + t * ryd);
                const double m21 = -c * (bx + t * bxd), m22 = 1.0 - c * (by + t * byd);
                const double det = m11 * m22 - m12 * m21;
                const double a = (h_red * m22 - m12 * h_blue) / det;
                const double b = (m11 * h_blue - m21 * h_red) / det;
                double f = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    const double pj = h[j] + c * (a * (x_w[j] + t * x_d[j]) + b * (y_w[j] + t * y_d[j]));
                    f += (pj - original[j]) * (pj - original[j]);
                }
                return f + penalty(trial);
            };
            // Golden-section search on [0, t_max].
            double lo = 0.0, hi = t_max;
            double t1 = hi - golden * (hi - lo), t2 = lo + golden * (hi - lo);
            double f1 = objective(t1), f2 = objective(t2);
            double best_t = 0.0, best_f = loss + penalty(w);
            auto note = [&](double t, double f) {
                if (f < best_f) {
                    best_f = f;
                    best_t = t;
                }
            };
            note(t1, f1);
            note(t2, f2);
            for (std::size_t e = 2; e < search.line_search_evals; ++e) {
                if (f1 <= f2) {
                    hi = t2;
                    t2 = t1;
                    f2 = f1;
                    t1 = hi - golden * (hi - lo);
                    f1 = objective(t1);
                    note(t1, f1);
                } else {
                    lo = t1;
                    t1 = t2;
                    f1 = f2;
                    t2 = lo + golden * (hi - lo);
                    f2 = objective(t2);
                    note(t2, f2);
                }
            }

            if (best_t > 0.0) {
                for (std::size_t j = 0; j < n; ++j) trial[j] = std::max(0.0, w[j] + best_t * best_dir[j]);
                result.penalty_residual = penalty(trial);
                const auto [red, blue] = group_sums(trial);
                for (std::size_t j = 0; j < n; ++j) trial[j] /= walk.is_red(j) ? red : blue;
                auto p_new = walk.scores(trial, p);
                const double loss_new = squared_distance(p_new, original);
                if (loss_new < loss) {
                    rel_gain = (loss - loss_new) / std::max(loss, 1e-300);
                    for (std::size_t j = 0; j < n; ++j) {
                        x_w[j] = (x_w[j] + best_t * x_d[j]) / red;
                        y_w[j] = (y_w[j] + best_t * y_d[j]) / blue;
                    }
                    w = trial;
                    p.swap(p_new);
                    loss = loss_new;
                    improved = true;
                }
            }
        }
        stalls = (improved && rel_gain >= search.min_relative_improvement) ? 0 : stalls + 1;
        if (stalls >= search.stall_limit) break;
    }

    result.policy.kind = PolicyKind::Optimized;
    result.policy.red_weights.assign(n, 0.0);
    result.policy.blue_weights.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) (walk.is_red(j) ? result.policy.red_weights : result.policy.blue_weights)[j] = w[j];
    result.loss = loss;
    return result;
}

TargetGroups make_target_groups(const ColoredGraph& g, std::span<const NodeId> members) {
    TargetGroups t;
    t.members.assign(members.begin(), members.end());
    for (NodeId i : members) {
        if (i >= g.size()) throw InputError("target node out of range");
        if (g.is_red(i)) t.protected_members.push_back(i);
    }
    return t;
}

namespace {

// 0 = outside S, 1 = S_B, 2 = S_R
std::vector<std::uint8_t> target_labels(const ColoredGraph& g, const TargetGroups& t) {
    std::vector<std::uint8_t> label(g.size(), 0);
    for (NodeId i : t.members) {
        if (i >= g.size()) throw InputError("target node out of range");
        label[i] = 1;
    }
    for (NodeId i : t.protected_members) {
        if (i >= g.size() || label[i] == 0) throw InputError("protected node outside the target set");
        label[i] = 2;
    }
    const auto count = [&](std::uint8_t v) { return std::count(label.begin(), label.end(), v); };
    if (count(1) + count(2) == 0) throw InputError("target set is empty");
    if (count(2) == 0) throw InputError("target set has no protected member");
    if (count(1) == 0) throw InputError("target set has no unprotected member");
    return label;
}

} // namespace

std::vector<double> build_targeted_jump(const ColoredGraph& g, const TargetGroups& target, double phi) {
    check_phi(phi);
    const auto label = target_labels(g, target);
    const std::size_t n = g.size();
    const auto sr = static_cast<double>(std::count(label.begin(), label.end(), 2));
    const auto sb = static_cast<double>(std::count(label.begin(), label.end(), 1));
    const double s_mass = (sr + sb) / static_cast<double>(n);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = label[i] == 0 ? 1.0 / static_cast<double>(n)
             : label[i] == 2 ? phi * s_mass / sr
                             : (1.0 - phi) * s_mass / sb;
    }
    return v;
}

TransitionModel build_targeted_model(const ColoredGraph& g, const TargetGroups& target, double phi,
                                     PolicyKind kind, std::span<const double> original) {
    check_phi(phi);
    if (kind == PolicyKind::Optimized) throw InputError("targeted runs support N, U and P policies");
    const auto label = target_labels(g, target);
    const std::size_t n = g.size();

    std::vector<double> x(n, 0.0), y(n, 0.0), outside(n, 0.0);
    double outside_count = 0.0;
    for (std::size_t j = 0; j < n; ++j) outside_count += label[j] == 0 ? 1.0 : 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (label[j] == 0) outside[j] = 1.0 / static_cast<double>(n);
    }
    if (kind == PolicyKind::Proportional) {
        if (original.size() != n) throw InputError("proportional policy needs the original PageRank vector");
        double red = 0.0, blue = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (label[j] == 2) red += original[j];
            if (label[j] == 1) blue += original[j];
        }
        if (!(red > 0.0) || !(blue > 0.0)) throw InputError("proportional policy: zero mass on a target sub-group");
        for (std::size_t j = 0; j < n; ++j) {
            if (label[j] == 2) x[j] = original[j] / red;
            if (label[j] == 1) y[j] = original[j] / blue;
        }
    } else {
        const auto sr = static_cast<double>(std::count(label.begin(), label.end(), 2));
        const auto sb = static_cast<double>(std::count(label.begin(), label.end(), 1));
        for (std::size_t j = 0; j < n; ++j) {
            if (label[j] == 2) x[j] = 1.0 / sr;
            if (label[j] == 1) y[j] = 1.0 / sb;
        }
    }
    // Neighborhood fallbacks spread uniformly over the sub-group.
    std::vector<double> x_uniform(n, 0.0), y_uniform(n, 0.0);
    if (kind == PolicyKind::Neighborhood) {
        x_uniform = x;
        y_uniform = y;
    }

    SparseRows rows;
    std::vector<double> to_red(n, 0.0), to_blue(n, 0.0), sink(n, 0.0);
    bool any_sink = false;
    const double s_mass = static_cast<double>(n - static_cast<std::size_t>(outside_count)) / static_cast<double>(n);
    for (NodeId i = 0; i < n; ++i) {
        const auto nbrs = g.out_neighbors(i);
        if (nbrs.empty()) {
            sink[i] = 1.0;
            any_sink = outside_count > 0.0 || any_sink;
            to_red[i] = phi * s_mass;
            to_blue[i] = (1.0 - phi) * s_mass;
            rows.end_row();
            continue;
        }
        double in_red = 0.0, in_blue = 0.0;
        for (NodeId j : nbrs) {
            in_red += label[j] == 2 ? 1.0 : 0.0;
            in_blue += label[j] == 1 ? 1.0 : 0.0;
        }
        const auto out = static_cast<double>(nbrs.size());
        const double into_s = (in_red + in_blue) / out;
        double red_edge = 1.0 / out, blue_edge = 1.0 / out;
        if (into_s > 0.0) {
            if (kind == PolicyKind::Neighborhood) {
                red_edge = in_red > 0.0 ? phi * into_s / in_red : 0.0;
                blue_edge = in_blue > 0.0 ? (1.0 - phi) * into_s / in_blue : 0.0;
                if (in_red == 0.0) to_red[i] = phi * into_s;
                if (in_blue == 0.0) to_blue[i] = (1.0 - phi) * into_s;
            } else if (in_red / (in_red + in_blue) < phi) {
                red_edge = blue_edge = (1.0 - phi) * into_s / in_blue;
                to_red[i] = std::max(0.0, phi * into_s - red_edge * in_red);
            } else {
                red_edge = blue_edge = phi * into_s / in_red;
                to_blue[i] = std::max(0.0, (1.0 - phi) * into_s - blue_edge * in_blue);
            }
        }
        for (NodeId j : nbrs) {
            rows.push(j, label[j] == 0 ? 1.0 / out : (label[j] == 2 ? red_edge : blue_edge));
        }
        rows.end_row();
    }

    std::vector<RankOneTerm> terms;
    if (any_sink) terms.push_back({std::move(sink), std::move(outside)});
    if (any_positive(to_red)) {
        terms.push_back({std::move(to_red), kind == PolicyKind::Neighborhood ? x_uniform : x});
    }
    if (any_positive(to_blue)) {
        terms.push_back({std::move(to_blue), kind == PolicyKind::Neighborhood ? y_uniform : y});
    }
    return TransitionModel(std::move(rows), std::move(terms));
}

std::vector<double> targeted_lfpr(const ColoredGraph& g, const TargetGroups& target, double phi,
                                  PolicyKind kind, const PageRankOptions& opts,
                                  std::span<const double> original) {
    const auto model = build_targeted_model(g, target, phi, kind, original);
    return power_iterate(model, build_targeted_jump(g, target, phi), opts);
}

} // namespace fairpr
