/**
 * @file qp.cpp
 * @brief Deterministic dense active-set solver for small box QPs with
 *        optional quadratic penalty rows.
 */

#include "hybridacc/qp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace hybridacc {

namespace {

Eigen::VectorXd clamp_box(const Eigen::VectorXd& u, const Eigen::VectorXd& lb,
                          const Eigen::VectorXd& ub) {
    return u.cwiseMax(lb).cwiseMin(ub);
}

enum class Bound : char { kFree, kLower, kUpper };

/**
 * Primal active-set iteration for min 0.5 u'Hu + g'u over a box.
 * Performs exact solves on the free coordinate set; terminates finitely
 * for positive definite H. Decrements the shared iteration budget.
 */
Eigen::VectorXd solve_box_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& g,
                             const Eigen::VectorXd& lb, const Eigen::VectorXd& ub,
                             Eigen::VectorXd u, int& budget) {
    const Eigen::Index n = g.size();
    std::vector<Bound> ws(static_cast<size_t>(n), Bound::kFree);
    u = clamp_box(u, lb, ub);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (u(i) <= lb(i)) {
            ws[static_cast<size_t>(i)] = Bound::kLower;
            u(i) = lb(i);
        } else if (u(i) >= ub(i)) {
            ws[static_cast<size_t>(i)] = Bound::kUpper;
            u(i) = ub(i);
        }
    }

    std::vector<Eigen::Index> free_set;
    free_set.reserve(static_cast<size_t>(n));

    while (budget > 0) {
        --budget;

        free_set.clear();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (ws[static_cast<size_t>(i)] == Bound::kFree) free_set.push_back(i);
        }

        const Eigen::VectorXd grad = H * u + g;
        Eigen::VectorXd dir = Eigen::VectorXd::Zero(n);
        if (!free_set.empty()) {
            const Eigen::Index nf = static_cast<Eigen::Index>(free_set.size());
            Eigen::MatrixXd Hff(nf, nf);
            Eigen::VectorXd gf(nf);
            for (Eigen::Index r = 0; r < nf; ++r) {
                gf(r) = grad(free_set[static_cast<size_t>(r)]);
                for (Eigen::Index c = 0; c < nf; ++c) {
                    Hff(r, c) = H(free_set[static_cast<size_t>(r)],
                                  free_set[static_cast<size_t>(c)]);
                }
            }
            const Eigen::VectorXd df = Hff.ldlt().solve(-gf);
            for (Eigen::Index r = 0; r < nf; ++r) {
                dir(free_set[static_cast<size_t>(r)]) = df(r);
            }
        }

        const double step_norm = dir.lpNorm<Eigen::Infinity>();
        if (step_norm <= 1e-13 * std::max(1.0, u.lpNorm<Eigen::Infinity>())) {
            // Stationary on the working set; look for a bound whose
            // multiplier has the wrong sign and release the worst one.
            const double tol = 1e-10 * std::max(1.0, grad.lpNorm<Eigen::Infinity>());
            Eigen::Index worst = -1;
            double worst_viol = tol;
            for (Eigen::Index i = 0; i < n; ++i) {
                const Bound b = ws[static_cast<size_t>(i)];
                double viol = 0.0;
                if (b == Bound::kLower) viol = -grad(i);
                else if (b == Bound::kUpper) viol = grad(i);
                if (viol > worst_viol) {
                    worst_viol = viol;
                    worst = i;
                }
            }
            if (worst < 0) return u;  // KKT point
            ws[static_cast<size_t>(worst)] = Bound::kFree;
            continue;
        }

        // Ratio test: longest step along dir that stays in the box.
        double alpha = 1.0;
        Eigen::Index blocking = -1;
        Bound blocking_side = Bound::kFree;
        for (const Eigen::Index i : free_set) {
            if (dir(i) > 0.0 && std::isfinite(ub(i))) {
                const double a = (ub(i) - u(i)) / dir(i);
                if (a < alpha) {
                    alpha = a;
                    blocking = i;
                    blocking_side = Bound::kUpper;
                }
            } else if (dir(i) < 0.0 && std::isfinite(lb(i))) {
                const double a = (lb(i) - u(i)) / dir(i);
                if (a < alpha) {
                    alpha = a;
                    blocking = i;
                    blocking_side = Bound::kLower;
                }
            }
        }
        u += std::max(alpha, 0.0) * dir;
        if (blocking >= 0) {
            ws[static_cast<size_t>(blocking)] = blocking_side;
            u(blocking) = (blocking_side == Bound::kUpper) ? ub(blocking)
                                                           : lb(blocking);
        }
        u = clamp_box(u, lb, ub);
    }
    return u;
}

/// Fold the soft rows violated at u into an effective quadratic (H, g).
void fold_active_penalties(const QpProblem& qp, const Eigen::VectorXd& u,
                           Eigen::MatrixXd& H_eff, Eigen::VectorXd& g_eff) {
    H_eff = qp.H;
    g_eff = qp.g;
    const Eigen::VectorXd cu = qp.C * u;
    const double w2 = 2.0 * qp.slack_weight;
    for (Eigen::Index i = 0; i < qp.C.rows(); ++i) {
        double target;
        if (cu(i) > qp.c_hi(i)) {
            target = qp.c_hi(i);
        } else if (cu(i) < qp.c_lo(i)) {
            target = qp.c_lo(i);
        } else {
            continue;
        }
        const Eigen::VectorXd row = qp.C.row(i).transpose();
        H_eff.noalias() += w2 * row * row.transpose();
        g_eff.noalias() -= w2 * target * row;
    }
}

}  // namespace

double QpProblem::cost(const Eigen::VectorXd& u) const {
    double f = 0.5 * u.dot(H * u) + g.dot(u) + cost_offset;
    if (C.rows() > 0 && slack_weight > 0.0) {
        const Eigen::VectorXd cu = C * u;
        for (Eigen::Index i = 0; i < C.rows(); ++i) {
            const double over = cu(i) - c_hi(i);
            const double under = c_lo(i) - cu(i);
            if (over > 0.0) f += slack_weight * over * over;
            if (under > 0.0) f += slack_weight * under * under;
        }
    }
    return f;
}

Eigen::VectorXd QpProblem::gradient(const Eigen::VectorXd& u) const {
    Eigen::VectorXd grad = H * u + g;
    if (C.rows() > 0 && slack_weight > 0.0) {
        const Eigen::VectorXd cu = C * u;
        for (Eigen::Index i = 0; i < C.rows(); ++i) {
            const double over = cu(i) - c_hi(i);
            const double under = c_lo(i) - cu(i);
            if (over > 0.0) {
                grad.noalias() += (2.0 * slack_weight * over) * C.row(i).transpose();
            }
            if (under > 0.0) {
                grad.noalias() -= (2.0 * slack_weight * under) * C.row(i).transpose();
            }
        }
    }
    return grad;
}

double QpProblem::kkt_residual(const Eigen::VectorXd& u) const {
    const Eigen::VectorXd proj = clamp_box(u - gradient(u), lb, ub);
    return (u - proj).lpNorm<Eigen::Infinity>();
}

QpSolution solve_qp(const QpProblem& qp, const QpOptions& opts) {
    const Eigen::Index n = qp.size();
    if (qp.H.rows() != n || qp.H.cols() != n || qp.lb.size() != n ||
        qp.ub.size() != n) {
        throw std::invalid_argument("solve_qp: inconsistent problem dimensions");
    }
    if (qp.C.rows() > 0 &&
        (qp.C.cols() != n || qp.c_lo.size() != qp.C.rows() ||
         qp.c_hi.size() != qp.C.rows())) {
        throw std::invalid_argument("solve_qp: inconsistent soft-constraint block");
    }
    if (((qp.ub - qp.lb).array() < 0.0).any()) {
        throw std::invalid_argument("solve_qp: lb exceeds ub");
    }

    int budget = opts.max_iterations;
    Eigen::VectorXd u = clamp_box(Eigen::VectorXd::Zero(n), qp.lb, qp.ub);

    const bool has_soft = qp.C.rows() > 0 && qp.slack_weight > 0.0;
    if (!has_soft) {
        u = solve_box_qp(qp.H, qp.g, qp.lb, qp.ub, u, budget);
    } else {
        Eigen::VectorXd u_best = u;
        double f_best = qp.cost(u);
        Eigen::MatrixXd H_eff;
        Eigen::VectorXd g_eff;
        int outer = 0;
        while (budget > 0 && outer++ < 60) {
            if (qp.kkt_residual(u) <= opts.kkt_tolerance) break;
            fold_active_penalties(qp, u, H_eff, g_eff);
            const Eigen::VectorXd u_new =
                solve_box_qp(H_eff, g_eff, qp.lb, qp.ub, u, budget);
            const double f_new = qp.cost(u_new);
            if (f_new < f_best - 1e-12 * std::max(1.0, std::abs(f_best))) {
                u = u_new;
                u_best = u_new;
                f_best = f_new;
                continue;
            }
            // The piecewise model stalled; take a monotone projected-gradient
            // step on the true objective instead.
            u = u_best;
            const Eigen::VectorXd grad = qp.gradient(u);
            double t = 1.0 / std::max(1.0, grad.lpNorm<Eigen::Infinity>());
            bool improved = false;
            for (int ls = 0; ls < 40; ++ls) {
                const Eigen::VectorXd u_try = clamp_box(u - t * grad, qp.lb, qp.ub);
                const double f_try = qp.cost(u_try);
                if (f_try < f_best - 1e-14 * std::max(1.0, std::abs(f_best))) {
                    u = u_try;
                    u_best = u_try;
                    f_best = f_try;
                    improved = true;
                    break;
                }
                t *= 0.5;
            }
            --budget;
            if (!improved) break;  // at numerical accuracy; return best iterate
        }
        u = u_best;
    }

    QpSolution sol;
    sol.u = u;
    sol.kkt_residual = qp.kkt_residual(u);
    sol.iterations = opts.max_iterations - budget;
    sol.converged = sol.kkt_residual <= std::max(opts.kkt_tolerance, 1e-6) &&
                    budget > 0;
    return sol;
}

}  // namespace hybridacc
