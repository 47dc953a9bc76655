#include "fairpr/pagerank.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <string>

#include "fairpr/errors.hpp"

namespace fairpr {

namespace {

void validate_shape(const SparseRows& base, const std::vector<RankOneTerm>& terms) {
    const std::size_t n = base.rows();
    if (base.columns.size() != base.values.size() || base.offsets.back() != base.columns.size()) {
        throw InputError("malformed sparse rows");
    }
    for (NodeId c : base.columns) {
        if (c >= n) throw InputError("sparse column out of range");
    }
    for (const auto& t : terms) {
        if (t.source.size() != n || t.target.size() != n) {
            throw InputError("rank-one term has wrong dimension");
        }
    }
}

} // namespace

TransitionModel::TransitionModel(SparseRows base, std::vector<RankOneTerm> terms, Unchecked)
    : base_(std::move(base)), terms_(std::move(terms)) {
    validate_shape(base_, terms_);
}

TransitionModel TransitionModel::unchecked(SparseRows base, std::vector<RankOneTerm> terms) {
    return TransitionModel(std::move(base), std::move(terms), Unchecked{});
}

TransitionModel::TransitionModel(SparseRows base, std::vector<RankOneTerm> terms)
    : TransitionModel(std::move(base), std::move(terms), Unchecked{}) {
    const std::size_t n = size();
    for (double v : base_.values) {
        if (!(v >= 0.0)) throw InputError("negative transition probability");
    }
    std::vector<double> row_sum(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto k = base_.offsets[i]; k < base_.offsets[i + 1]; ++k) row_sum[i] += base_.values[k];
    }
    for (const auto& t : terms_) {
        if (std::any_of(t.source.begin(), t.source.end(), [](double v) { return !(v >= 0.0); }) ||
            std::any_of(t.target.begin(), t.target.end(), [](double v) { return !(v >= 0.0); })) {
            throw InputError("negative rank-one term");
        }
        const double mass = std::accumulate(t.target.begin(), t.target.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) row_sum[i] += t.source[i] * mass;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(row_sum[i] - 1.0) > kRowSumTolerance) {
            throw InputError("row " + std::to_string(i) + " sums to " + std::to_string(row_sum[i]));
        }
    }
}

TransitionModel TransitionModel::from_dense(std::span<const double> row_major, std::size_t n) {
    if (row_major.size() != n * n) throw InputError("dense matrix has wrong size");
    SparseRows rows;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = row_major[i * n + j];
            if (v != 0.0) rows.push(static_cast<NodeId>(j), v);
        }
        rows.end_row();
    }
    return TransitionModel(std::move(rows), {});
}

void TransitionModel::left_multiply(std::span<const double> p, std::span<double> out) const {
    const std::size_t n = size();
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = p[i];
        if (w == 0.0) continue;
        for (auto k = base_.offsets[i]; k < base_.offsets[i + 1]; ++k) {
            out[base_.columns[k]] += w * base_.values[k];
        }
    }
    for (const auto& t : terms_) {
        double weight = 0.0;
        for (std::size_t i = 0; i < n; ++i) weight += p[i] * t.source[i];
        if (weight == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) out[j] += weight * t.target[j];
    }
}

void TransitionModel::right_multiply(std::span<const double> q, std::span<double> out) const {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (auto k = base_.offsets[i]; k < base_.offsets[i + 1]; ++k) {
            acc += base_.values[k] * q[base_.columns[k]];
        }
        out[i] = acc;
    }
    for (const auto& t : terms_) {
        double weight = 0.0;
        for (std::size_t j = 0; j < n; ++j) weight += t.target[j] * q[j];
        if (weight == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) out[i] += t.source[i] * weight;
    }
}

std::vector<double> TransitionModel::row(NodeId i) const {
    std::vector<double> r(size(), 0.0);
    for (auto k = base_.offsets[i]; k < base_.offsets[i + 1]; ++k) r[base_.columns[k]] += base_.values[k];
    for (const auto& t : terms_) {
        if (t.source[i] == 0.0) continue;
        for (std::size_t j = 0; j < size(); ++j) r[j] += t.source[i] * t.target[j];
    }
    return r;
}

std::vector<double> TransitionModel::row_masses(std::span<const double> weight) const {
    std::vector<double> out(size());
    right_multiply(weight, out);
    return out;
}

std::vector<double> TransitionModel::dense() const {
    const std::size_t n = size();
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = row(static_cast<NodeId>(i));
        std::copy(r.begin(), r.end(), d.begin() + static_cast<std::ptrdiff_t>(i * n));
    }
    return d;
}

TransitionModel standard_transition(const ColoredGraph& g) {
    const std::size_t n = g.size();
    SparseRows rows;
    rows.columns.reserve(g.edge_count());
    rows.values.reserve(g.edge_count());
    std::vector<double> sinks(n, 0.0);
    bool any_sink = false;
    for (NodeId i = 0; i < n; ++i) {
        const auto nbrs = g.out_neighbors(i);
        if (nbrs.empty()) {
            sinks[i] = 1.0;
            any_sink = true;
        }
        const double w = nbrs.empty() ? 0.0 : 1.0 / static_cast<double>(nbrs.size());
        for (NodeId j : nbrs) rows.push(j, w);
        rows.end_row();
    }
    std::vector<RankOneTerm> terms;
    if (any_sink) terms.push_back({std::move(sinks), uniform_vector(n)});
    return TransitionModel(std::move(rows), std::move(terms));
}

std::vector<double> uniform_vector(std::size_t n) {
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

std::vector<double> unit_vector(std::size_t n, NodeId i) {
    std::vector<double> e(n, 0.0);
    e.at(i) = 1.0;
    return e;
}

namespace {

void check_gamma(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw InputError("gamma must lie in (0, 1)");
}

} // namespace

std::vector<double> jump_response(const TransitionModel& m, std::span<const double> v,
                                  const PageRankOptions& opts, std::span<const double> start) {
    check_gamma(opts.gamma);
    const std::size_t n = m.size();
    if (v.size() != n || (!start.empty() && start.size() != n)) {
        throw InputError("jump vector has wrong dimension");
    }
    std::vector<double> p(start.empty() ? v.begin() : start.begin(),
                          start.empty() ? v.end() : start.end());
    std::vector<double> next(n);
    const double walk = 1.0 - opts.gamma;
    for (std::size_t it = 0; it < opts.max_iters; ++it) {
        m.left_multiply(p, next);
        double change = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            next[j] = walk * next[j] + opts.gamma * v[j];
            change += std::abs(next[j] - p[j]);
        }
        p.swap(next);
        if (change <= opts.tol) return p;
    }
    throw ConvergenceError("PageRank did not converge in " + std::to_string(opts.max_iters) +
                           " iterations");
}

std::vector<double> power_iterate(const TransitionModel& m, std::span<const double> v,
                                  const PageRankOptions& opts) {
    double total = 0.0;
    for (double x : v) {
        if (!(x >= 0.0)) throw InputError("jump vector has a negative entry");
        total += x;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InputError("jump vector does not sum to 1");
    return jump_response(m, v, opts);
}

std::vector<double> absorption(const TransitionModel& m, std::span<const double> g,
                               const PageRankOptions& opts, std::span<const double> start) {
    check_gamma(opts.gamma);
    const std::size_t n = m.size();
    if (g.size() != n || (!start.empty() && start.size() != n)) {
        throw InputError("absorption weights have wrong dimension");
    }
    std::vector<double> q(start.empty() ? g.begin() : start.begin(),
                          start.empty() ? g.end() : start.end());
    std::vector<double> next(n);
    const double walk = 1.0 - opts.gamma;
    for (std::size_t it = 0; it < opts.max_iters; ++it) {
        m.right_multiply(q, next);
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            next[i] = walk * next[i] + opts.gamma * g[i];
            change = std::max(change, std::abs(next[i] - q[i]));
        }
        q.swap(next);
        if (change <= opts.tol) return q;
    }
    throw ConvergenceError("absorption solve did not converge in " +
                           std::to_string(opts.max_iters) + " iterations");
}

std::vector<double> personalized_pagerank(const TransitionModel& m, NodeId i,
                                          const PageRankOptions& opts) {
    if (i >= m.size()) throw InputError("node out of range");
    return power_iterate(m, unit_vector(m.size(), i), opts);
}

std::vector<double> red_absorption_vector(const TransitionModel& m, const ColoredGraph& g,
                                          const PageRankOptions& opts) {
    if (m.size() != g.size()) throw InputError("model and graph sizes differ");
    auto q = absorption(m, g.red_indicator(), opts);
    for (double& v : q) v = std::clamp(v, 0.0, 1.0);
    return q;
}

std::vector<double> personalized_pagerank_all(const TransitionModel& m,
                                              const PageRankOptions& opts, std::size_t cap) {
    const std::size_t n = m.size();
    if (n > cap) throw InputError("batch personalized PageRank limited to " + std::to_string(cap) + " nodes");
    std::vector<double> all(n * n);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        try {
            const auto row = personalized_pagerank(m, static_cast<NodeId>(i), opts);
            std::copy(row.begin(), row.end(), all.begin() + i * static_cast<std::ptrdiff_t>(n));
        } catch (...) {
#pragma omp critical
            failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return all;
}

} // namespace fairpr
