#include "fairpr/projection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fairpr/errors.hpp"

namespace fairpr {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Threshold τ with Σ max(y_i − τ, 0) = mass. Running-mean scan with
// repeated pruning of entries that fall below the threshold; linear time in
// practice.
double simplex_threshold(std::span<const double> y, double mass, std::vector<char>& above) {
    const std::size_t n = y.size();
    above.assign(n, 0);
    above[0] = 1;
    double count = 1.0;
    double tau = y[0] - mass;
    for (std::size_t i = 1; i < n; ++i) {
        if (y[i] > tau) {
            above[i] = 1;
            count += 1.0;
            tau += (y[i] - tau) / count;
        }
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (above[i] && y[i] <= tau && count > 1.0) {
                above[i] = 0;
                count -= 1.0;
                tau += (tau - y[i]) / count;
                changed = true;
            }
        }
    }
    return tau;
}

} // namespace

std::vector<double> project_simplex(std::span<const double> y, double mass) {
    if (y.empty()) return {};
    std::vector<char> above;
    const double tau = simplex_threshold(y, mass, above);
    std::vector<double> x(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) x[i] = std::max(y[i] - tau, 0.0);
    return x;
}

std::vector<double> project_simplex_slice(std::span<const double> y, std::span<const double> a,
                                          double c) {
    const std::size_t n = y.size();
    if (a.size() != n || n == 0) throw InputError("projection: dimension mismatch");
    const auto [amin_it, amax_it] = std::minmax_element(a.begin(), a.end());
    const double amin = *amin_it, amax = *amax_it;
    if (c < amin || c > amax) {
        throw InfeasibleError("no point of the simplex satisfies the linear constraint");
    }
    if (amax - amin <= 1e-15 * std::max(1.0, std::abs(amax))) return project_simplex(y);

    std::vector<double> z(n), x(n);
    std::vector<char> above;
    auto solve_for = [&](double nu) {
        for (std::size_t i = 0; i < n; ++i) z[i] = y[i] - nu * a[i];
        const double tau = simplex_threshold(z, 1.0, above);
        for (std::size_t i = 0; i < n; ++i) x[i] = std::max(z[i] - tau, 0.0);
        return dot(a, x) - c;
    };

    // g(ν) = aᵀx(ν) − c is continuous, piecewise linear and non-increasing,
    // running from max(a) − c down to min(a) − c. Bracket, then Illinois.
    const double scale = 1e-15 * std::max({1.0, std::abs(amax), std::abs(amin)});
    double lo = -1.0, hi = 1.0;
    double glo = solve_for(lo), ghi = solve_for(hi);
    for (int k = 0; k < 1000 && glo < 0.0; ++k) glo = solve_for(lo *= 2.0);
    for (int k = 0; k < 1000 && ghi > 0.0; ++k) ghi = solve_for(hi *= 2.0);
    double nu = glo <= scale ? lo : (ghi >= -scale ? hi : 0.5 * (lo + hi));
    if (glo > scale && ghi < -scale) {
        int side = 0;
        for (int k = 0; k < 300; ++k) {
            nu = (lo * ghi - hi * glo) / (ghi - glo);
            if (!(nu > lo && nu < hi)) nu = 0.5 * (lo + hi);
            const double g = solve_for(nu);
            if (std::abs(g) <= scale) break;
            if (g > 0.0) {
                lo = nu;
                glo = g;
                if (side == 1) ghi *= 0.5;
                side = 1;
            } else {
                hi = nu;
                ghi = g;
                if (side == -1) glo *= 0.5;
                side = -1;
            }
            if (hi - lo <= 4e-16 * std::max(1.0, std::abs(nu))) break;
        }
    }
    solve_for(nu);

    // Polish on the support: x_i = y_i − μ − ν a_i for x_i > 0.
    double count = 0.0, sum_a = 0.0, sum_aa = 0.0, sum_y = 0.0, sum_ay = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i] <= 0.0) continue;
        count += 1.0;
        sum_a += a[i];
        sum_aa += a[i] * a[i];
        sum_y += y[i];
        sum_ay += a[i] * y[i];
    }
    // count·μ + sum_a·ν = sum_y − 1 ; sum_a·μ + sum_aa·ν = sum_ay − c
    const double det = count * sum_aa - sum_a * sum_a;
    if (count >= 2.0 && det > 1e-14 * count * std::max(sum_aa, 1e-300)) {
        const double r1 = sum_y - 1.0, r2 = sum_ay - c;
        const double mu = (r1 * sum_aa - sum_a * r2) / det;
        const double nu_p = (count * r2 - sum_a * r1) / det;
        std::vector<double> polished(n, 0.0);
        bool consistent = true;
        for (std::size_t i = 0; i < n && consistent; ++i) {
            const double v = y[i] - mu - nu_p * a[i];
            if (x[i] > 0.0) {
                if (v < -1e-12) consistent = false;
                polished[i] = std::max(v, 0.0);
            } else if (v > 1e-12) {
                consistent = false;
            }
        }
        if (consistent) {
            const double before = std::abs(dot(a, x) - c) + std::abs(std::accumulate(x.begin(), x.end(), 0.0) - 1.0);
            const double after = std::abs(dot(a, polished) - c) +
                                 std::abs(std::accumulate(polished.begin(), polished.end(), 0.0) - 1.0);
            if (after <= before) x.swap(polished);
        }
    }
    return x;
}

} // namespace fairpr
