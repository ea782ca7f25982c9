#ifndef NETGIANT_ALGORITHMS_HPP
#define NETGIANT_ALGORITHMS_HPP

#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "netgiant/graph.hpp"
#include "netgiant/objectives.hpp"

namespace netgiant {

enum class Algorithm { netgiant, gradtrack, accngd };

std::string_view to_string(Algorithm alg);
Algorithm parse_algorithm(std::string_view name);

/// Stacked per-node variables, one row per node.
///
/// `grad` holds the local gradients at the points the tracker follows: the
/// rows of `x` for Network-GIANT and GradTrack, the rows of `y` for
/// ACC-NGD-SC. The tracker invariant is mean(s) == mean(grad).
struct NetworkState {
  Eigen::MatrixXd x;
  Eigen::MatrixXd s;
  Eigen::MatrixXd grad;
  // ACC-NGD-SC auxiliaries; empty for the other algorithms.
  Eigen::MatrixXd v;
  Eigen::MatrixXd y;
  int iter = 0;

  int n_nodes() const { return static_cast<int>(x.rows()); }
  int dim() const { return static_cast<int>(x.cols()); }
};

/// Row i = gradient of f_i at row i of `x`.
Eigen::MatrixXd stacked_gradients(const ObjectiveSet& objs, const Eigen::MatrixXd& x);

/// s_i^0 = grad f_i(x_i^0). For ACC-NGD-SC, also v^0 = y^0 = x^0.
NetworkState init_state(const ObjectiveSet& objs, const Eigen::MatrixXd& x0,
                        Algorithm alg = Algorithm::netgiant);

/// X+ = W X - eta Y with row i of Y solving H_i y = s_i; S+ = W S + grad+ - grad.
NetworkState netgiant_step(const NetworkState& state, const ConsensusMatrix& w, double eta,
                           const ObjectiveSet& objs);

/// X+ = W X - eta S; S+ = W S + grad+ - grad.
NetworkState gradtrack_step(const NetworkState& state, const ConsensusMatrix& w, double eta,
                            const ObjectiveSet& objs);

/// One round of accelerated gradient tracking:
///   X+ = W Y - eta S
///   V+ = (1 - alpha) W V + alpha W Y - (eta / alpha) S
///   Y+ = (X+ + alpha V+) / (1 + alpha)
///   S+ = W S + grad(Y+) - grad(Y)
NetworkState accngd_step(const NetworkState& state, const ConsensusMatrix& w, double eta,
                         double alpha, const ObjectiveSet& objs);

/// ||mean(s) - mean(grad)|| relative to max(||mean(grad)||, ||grad||_F / sqrt(N)).
double tracking_residual(const NetworkState& state);

/// z+ = z - eta [hess f(z)]^{-1} grad f(z) on the global objective.
Eigen::VectorXd damped_newton_step(const Eigen::VectorXd& z, double eta,
                                   const ObjectiveSet& objs);

inline constexpr int kNewtonMaxIters = 10000;

/// Centralised Newton with Armijo backtracking; stops once ||grad f|| <= tol.
Eigen::VectorXd newton_backtracking_solve(const ObjectiveSet& objs, const Eigen::VectorXd& x0,
                                          double tol = 1e-12);

/// Worker count for per-node oracle evaluation, from NETGIANT_THREADS (default 1).
int worker_threads();

}  // namespace netgiant

#endif  // NETGIANT_ALGORITHMS_HPP
