/**
 * @file qp.hpp
 * @brief Small dense box-constrained quadratic programs and a deterministic
 *        active-set solver.
 *
 * Problems have the form
 *
 *     min_u  0.5 u' H u + g' u
 *            + slack_weight * sum_i ( max(0, C_i u - c_hi_i)^2
 *                                   + max(0, c_lo_i - C_i u)^2 )
 *     s.t.   lb <= u <= ub
 *
 * The quadratic penalty block (C, c_lo, c_hi) carries softened state
 * constraints; it may be empty, in which case the problem is a plain box QP.
 */

#ifndef HYBRIDACC_QP_HPP
#define HYBRIDACC_QP_HPP

#include <Eigen/Dense>

namespace hybridacc {

struct QpProblem {
    Eigen::MatrixXd H;   ///< symmetric positive definite cost matrix
    Eigen::VectorXd g;   ///< linear cost term
    Eigen::VectorXd lb;  ///< hard lower bounds on u
    Eigen::VectorXd ub;  ///< hard upper bounds on u

    /// Softened two-sided constraints c_lo <= C u <= c_hi (rows may be empty).
    Eigen::MatrixXd C;
    Eigen::VectorXd c_lo;
    Eigen::VectorXd c_hi;
    double slack_weight = 0.0;

    /// Constant cost term so that cost() reproduces the originating
    /// objective absolutely, not just up to a constant.
    double cost_offset = 0.0;

    Eigen::Index size() const { return g.size(); }

    /// Full objective value including penalty terms and the constant offset.
    double cost(const Eigen::VectorXd& u) const;

    /// Gradient of the full objective.
    Eigen::VectorXd gradient(const Eigen::VectorXd& u) const;

    /// Projected-gradient stationarity residual ||u - clamp(u - grad)||_inf.
    double kkt_residual(const Eigen::VectorXd& u) const;
};

struct QpSolution {
    Eigen::VectorXd u;
    double kkt_residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct QpOptions {
    int max_iterations = 500;
    double kkt_tolerance = 1e-8;
};

/**
 * @brief Solve a QpProblem to stationarity.
 *
 * Plain box QPs are solved with a primal active-set method (exact free-set
 * solves, finite termination). Penalty terms are handled by an outer loop
 * that fixes the set of violated soft rows, folds them into the quadratic,
 * and re-solves until the set is stationary, with a projected-gradient
 * fallback guarding against cycling. Deterministic: identical inputs give
 * bit-identical outputs.
 *
 * If the iteration budget runs out the best iterate is returned with
 * converged = false.
 */
QpSolution solve_qp(const QpProblem& qp, const QpOptions& opts = {});

}  // namespace hybridacc

#endif  // HYBRIDACC_QP_HPP
