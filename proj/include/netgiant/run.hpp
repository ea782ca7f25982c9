#ifndef NETGIANT_RUN_HPP
#define NETGIANT_RUN_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netgiant/algorithms.hpp"

namespace netgiant {

struct RunConfig {
  Algorithm algorithm = Algorithm::netgiant;
  double eta = 0.05;
  int max_iters = 1000;
  /// Stop once ||xbar_k - x*|| <= tol.
  double tol = 1e-12;
  std::uint64_t seed = 1;
  /// ACC-NGD-SC momentum; unset means sqrt(mu * eta).
  std::optional<double> alpha;
  /// Evaluate the Hessian gap gamma_k every iteration (costs N Hessians).
  bool track_gamma = true;
  std::string label;

  /// Throws std::invalid_argument unless 0 < eta < 1 and max_iters >= 0.
  void validate() const;
  std::string display_name() const;
};

/// Per-iteration error metrics. `ratio_r` at iteration k is
/// gap_k / gap_{k-1}; it is absent at k = 0 and below the numerical floor.
struct MetricsRecord {
  int iter = 0;
  double consensus_err = 0.0;
  double tracking_err = 0.0;
  double opt_gap = 0.0;
  double f_gap = 0.0;
  double gamma_k = 0.0;
  std::optional<double> ratio_r;
  // Not part of the CSV schema.
  double stacked_gap = 0.0;
  double tracking_residual = 0.0;
};

enum class RunStatus { converged, max_iters, aborted };

std::string_view to_string(RunStatus status);

struct Trajectory {
  RunConfig config;
  int n_nodes = 0;
  std::vector<MetricsRecord> records;
  RunStatus status = RunStatus::max_iters;
  std::string diagnostic;
};

inline constexpr double kGapFloor = 1e-14;

using StepObserver = std::function<void(const NetworkState&)>;

/// Iterates the configured algorithm from X0, recording metrics for the
/// initial state and after every step. Stops on max_iters or when the mean
/// iterate is within `tol` of x*. A non-finite state ends the run with
/// status `aborted` and a diagnostic.
Trajectory run(const RunConfig& config, const ConsensusMatrix& w, const ObjectiveSet& objs,
               const Eigen::MatrixXd& x0, const Eigen::VectorXd& x_star,
               const StepObserver& observer = {});

}  // namespace netgiant

#endif  // NETGIANT_RUN_HPP
