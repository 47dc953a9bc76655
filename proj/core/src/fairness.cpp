#include "fairpr/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "fairpr/errors.hpp"
#include "fairpr/random.hpp"
#include "text.hpp"

namespace fairpr {

double red_mass(std::span<const double> p, const ColoredGraph& g) {
    if (p.size() != g.size()) throw InputError("score vector has wrong dimension");
    double s = 0.0;
    for (NodeId i = 0; i < g.size(); ++i) {
        if (g.is_red(i)) s += p[i];
    }
    return s;
}

double utility_loss(std::span<const double> f, std::span<const double> original) {
    if (f.size() != original.size()) throw InputError("utility loss: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += (f[i] - original[i]) * (f[i] - original[i]);
    return s;
}

std::vector<double> lower_bound_vector(std::span<const double> original, const ColoredGraph& g,
                                       double phi) {
    if (!(phi > 0.0 && phi < 1.0)) throw InputError("phi must lie in (0, 1)");
    std::vector<double> w(original.begin(), original.end());
    const double delta = red_mass(original, g) - phi;
    if (delta == 0.0) return w;
    const bool red_donates = delta > 0.0;

    std::vector<double> held;
    for (NodeId i = 0; i < g.size(); ++i) {
        if (g.is_red(i) == red_donates && w[i] > 0.0) held.push_back(w[i]);
    }
    std::sort(held.begin(), held.end());

    // Raise a common cut level until the donors have given up |Δ|.
    double remaining = std::abs(delta);
    double level = 0.0;
    std::size_t next = 0;
    while (next < held.size()) {
        const auto active = static_cast<double>(held.size() - next);
        const double beta = held[next] - level;
        if (remaining <= beta * active) {
            level += remaining / active;
            remaining = 0.0;
            break;
        }
        remaining -= beta * active;
        level = held[next];
        while (next < held.size() && held[next] <= level) ++next;
    }

    const auto receivers = static_cast<double>(red_donates ? g.blue_count() : g.red_count());
    for (NodeId i = 0; i < g.size(); ++i) {
        if (g.is_red(i) == red_donates) {
            w[i] = std::max(0.0, w[i] - level);
        } else {
            w[i] += std::abs(delta) / receivers;
        }
    }
    return w;
}

FairnessReport make_report(std::span<const double> scores, std::span<const double> original,
                           const ColoredGraph& g, double phi) {
    FairnessReport r;
    r.phi = phi;
    r.red_mass = red_mass(scores, g);
    r.fair = std::abs(r.red_mass - phi) <= kFairnessTolerance;
    r.loss = utility_loss(scores, original);
    r.lower_bound_loss = utility_loss(lower_bound_vector(original, g, phi), original);
    return r;
}

bool PersonalizedAudit::all_fair() const {
    return std::all_of(entries.begin(), entries.end(), [](const AuditEntry& e) { return e.fair; });
}

std::vector<NodeId> audit_sample(const ColoredGraph& g, std::optional<std::size_t> requested,
                                 std::uint64_t seed) {
    const std::size_t n = g.size();
    const std::size_t size = std::min(n, requested.value_or(n > 5000 ? 1000 : n));
    if (size == 0) throw InputError("audit sample is empty");
    std::vector<NodeId> all(n);
    std::iota(all.begin(), all.end(), NodeId{0});
    if (size == n) return all;

    std::vector<NodeId> red, blue;
    for (NodeId i : all) (g.is_red(i) ? red : blue).push_back(i);
    auto red_take = static_cast<std::size_t>(
        std::llround(static_cast<double>(size) * static_cast<double>(red.size()) / static_cast<double>(n)));
    red_take = std::clamp<std::size_t>(red_take, size > 1 ? 1 : 0, std::min(red.size(), size - 1));
    const std::size_t blue_take = std::min(blue.size(), size - red_take);

    Rng rng(seed);
    auto pick = [&](std::vector<NodeId>& pool, std::size_t k, std::vector<NodeId>& out) {
        for (std::size_t i = 0; i < k; ++i) {
            const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
            std::swap(pool[i], pool[j]);
            out.push_back(pool[i]);
        }
    };
    std::vector<NodeId> sample;
    pick(red, red_take, sample);
    pick(blue, blue_take, sample);
    std::sort(sample.begin(), sample.end());
    return sample;
}

PersonalizedAudit personalized_audit(const TransitionModel& m, const ColoredGraph& g, double phi,
                                     std::span<const NodeId> sample, const PageRankOptions& opts,
                                     std::size_t bins) {
    if (sample.empty()) throw InputError("audit sample is empty");
    if (m.size() != g.size()) throw InputError("model and graph sizes differ");
    if (bins == 0) throw InputError("histogram needs at least one bin");
    for (NodeId i : sample) {
        if (i >= g.size()) throw InputError("audit node out of range");
    }

    PersonalizedAudit a;
    a.phi = phi;
    a.gamma = opts.gamma;
    a.target = phi * (1.0 - opts.gamma);
    a.entries.resize(sample.size());
    const auto count = static_cast<std::ptrdiff_t>(sample.size());

#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
        const NodeId i = sample[static_cast<std::size_t>(k)];
        const auto ppr = personalized_pagerank(m, i, opts);
        double red = 0.0;
        for (NodeId j = 0; j < g.size(); ++j) {
            if (g.is_red(j)) red += ppr[j];
        }
        auto& e = a.entries[static_cast<std::size_t>(k)];
        e.node = i;
        e.adjusted_red_mass = red - (g.is_red(i) ? opts.gamma : 0.0);
        e.fair = std::abs(e.adjusted_red_mass - a.target) <= kFairnessTolerance;
    }

    a.histogram.lo = 0.0;
    a.histogram.hi = 1.0 - opts.gamma;
    a.histogram.red.assign(bins, 0);
    a.histogram.blue.assign(bins, 0);
    double red_sum = 0.0, blue_sum = 0.0;
    std::size_t red_n = 0, blue_n = 0;
    const double width = (a.histogram.hi - a.histogram.lo) / static_cast<double>(bins);
    for (const auto& e : a.entries) {
        const double pos = std::floor((e.adjusted_red_mass - a.histogram.lo) / width);
        const auto bin = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(bins - 1)));
        if (g.is_red(e.node)) {
            ++a.histogram.red[bin];
            red_sum += e.adjusted_red_mass;
            ++red_n;
        } else {
            ++a.histogram.blue[bin];
            blue_sum += e.adjusted_red_mass;
            ++blue_n;
        }
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    a.red_mean = red_n ? red_sum / static_cast<double>(red_n) : nan;
    a.blue_mean = blue_n ? blue_sum / static_cast<double>(blue_n) : nan;
    return a;
}

bool converse_check(const TransitionModel& m, const ColoredGraph& g, double phi, double tol) {
    if (m.size() != g.size()) throw InputError("model and graph sizes differ");
    const auto masses = m.row_masses(g.red_indicator());
    return std::all_of(masses.begin(), masses.end(),
                       [&](double mass) { return std::abs(mass - phi) <= tol; });
}

void write_audit_csv(const PersonalizedAudit& audit, const ColoredGraph& g, std::ostream& out) {
    out << "node,color,adjusted_red_mass,fair\n";
    for (const auto& e : audit.entries) {
        out << e.node << ',' << (g.is_red(e.node) ? 1 : 0) << ','
            << text::format_double(e.adjusted_red_mass) << ',' << (e.fair ? "true" : "false") << '\n';
    }
}

void write_histogram_csv(const Histogram& h, std::ostream& out) {
    out << "bin_lo,bin_hi,red_count,blue_count\n";
    const double width = (h.hi - h.lo) / static_cast<double>(h.bins());
    for (std::size_t b = 0; b < h.bins(); ++b) {
        out << text::format_double(h.lo + width * static_cast<double>(b)) << ','
            << text::format_double(h.lo + width * static_cast<double>(b + 1)) << ',' << h.red[b] << ','
            << h.blue[b] << '\n';
    }
}

} // namespace fairpr
