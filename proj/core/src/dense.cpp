#include "fairpr/dense.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fairpr/errors.hpp"

namespace fairpr {

Eigen::MatrixXd to_eigen(const TransitionModel& m) {
    const auto n = static_cast<Eigen::Index>(m.size());
    const auto flat = m.dense();
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) out(i, j) = flat[static_cast<std::size_t>(i * n + j)];
    }
    return out;
}

Eigen::MatrixXd dense_q(const TransitionModel& m, double gamma, std::size_t cap) {
    if (m.size() > cap) {
        throw InputError("dense Q limited to " + std::to_string(cap) + " nodes");
    }
    if (!(gamma > 0.0 && gamma < 1.0)) throw InputError("gamma must lie in (0, 1)");
    const auto n = static_cast<Eigen::Index>(m.size());
    const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - (1.0 - gamma) * to_eigen(m);
    return gamma * system.partialPivLu().inverse();
}


FsprSolution solve_fspr_dense(const FsprProblem& problem, std::size_t cap) {
    if (problem.model == nullptr) throw InputError("FSPR problem has no model");
    const Eigen::MatrixXd q = dense_q(*problem.model, problem.pagerank.gamma, cap);
    const auto n = q.rows();
    const auto a_vec = problem.constraint();
    const double c = problem.constraint_rhs();
    const Eigen::Map<const Eigen::VectorXd> a(a_vec.data(), n);
    const Eigen::Map<const Eigen::VectorXd> target(problem.original.data(), n);

    const Eigen::MatrixXd hessian = 2.0 * q * q.transpose();
    const Eigen::VectorXd linear = -2.0 * q * target;

    const auto start = two_point_jump(a_vec, c);
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(start.data(), n);
    std::vector<char> free(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) free[static_cast<std::size_t>(i)] = x(i) > 0.0;

    FsprSolution sol;
    const std::size_t budget = 50 * static_cast<std::size_t>(n) + 100;
    for (std::size_t it = 0; it < budget; ++it) {
        sol.iterations = it + 1;
        std::vector<Eigen::Index> f_idx, w_idx;
        for (Eigen::Index i = 0; i < n; ++i) (free[static_cast<std::size_t>(i)] ? f_idx : w_idx).push_back(i);
        const auto nf = static_cast<Eigen::Index>(f_idx.size());

        const Eigen::VectorXd grad = hessian * x + linear;
        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(nf + 2, nf + 2);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf + 2);
        for (Eigen::Index r = 0; r < nf; ++r) {
            for (Eigen::Index s = 0; s < nf; ++s) kkt(r, s) = hessian(f_idx[r], f_idx[s]);
            kkt(r, nf) = kkt(nf, r) = 1.0;
            kkt(r, nf + 1) = kkt(nf + 1, r) = a(f_idx[r]);
            rhs(r) = -grad(f_idx[r]);
        }
        const Eigen::VectorXd step = kkt.completeOrthogonalDecomposition().solve(rhs);
        const Eigen::VectorXd d = step.head(nf);

        if (d.lpNorm<Eigen::Infinity>() <= 1e-13) {
            const double lam_sum = step(nf), lam_a = step(nf + 1);
            double worst = 0.0;
            Eigen::Index release = -1;
            for (Eigen::Index i : w_idx) {
                const double mult = grad(i) + lam_sum + lam_a * a(i);
                if (mult < worst) {
                    worst = mult;
                    release = i;
                }
            }
            sol.kkt_residual = -worst;
            if (release < 0 || worst > -1e-13) {
                sol.converged = true;
                break;
            }
            free[static_cast<std::size_t>(release)] = 1;
            continue;
        }

        double alpha = 1.0;
        Eigen::Index blocking = -1;
        for (Eigen::Index r = 0; r < nf; ++r) {
            if (d(r) < 0.0) {
                const double limit = -x(f_idx[r]) / d(r);
                if (limit < alpha) {
                    alpha = limit;
                    blocking = f_idx[r];
                }
            }
        }
        for (Eigen::Index r = 0; r < nf; ++r) x(f_idx[r]) += alpha * d(r);
        if (blocking >= 0) {
            x(blocking) = 0.0;
            free[static_cast<std::size_t>(blocking)] = 0;
        }
    }

    sol.jump.assign(x.data(), x.data() + n);
    for (double& v : sol.jump) v = std::max(v, 0.0);
    const Eigen::VectorXd scores = q.transpose() * Eigen::Map<const Eigen::VectorXd>(sol.jump.data(), n);
    sol.scores.assign(scores.data(), scores.data() + n);
    sol.loss = (scores - target).squaredNorm();
    const Eigen::Map<const Eigen::VectorXd> xj(sol.jump.data(), n);
    sol.fairness_residual = std::abs(a.dot(xj) - c);
    if (problem.targeted) {
        const Eigen::Map<const Eigen::VectorXd> qs(problem.targeted->target.data(), n);
        const Eigen::Map<const Eigen::VectorXd> qsr(problem.targeted->protected_target.data(), n);
        sol.achieved = qsr.dot(xj) / qs.dot(xj);
    } else {
        sol.achieved = Eigen::Map<const Eigen::VectorXd>(problem.red_absorption.data(), n).dot(xj);
    }
    return sol;
}

} // namespace fairpr
