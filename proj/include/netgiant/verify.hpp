#ifndef NETGIANT_VERIFY_HPP
#define NETGIANT_VERIFY_HPP

// Per-step audits of recorded trajectories against the convergence bounds.

#include <array>
#include <string>
#include <vector>

#include "netgiant/run.hpp"
#include "netgiant/theory.hpp"

namespace netgiant {

/// A step is a violation when lhs > rhs + kInequalityTol * (1 + |rhs|).
inline constexpr double kInequalityTol = 1e-9;

struct StepMargin {
  int iter = 0;  // the step k -> k+1
  /// rhs - lhs per checked component (one entry for the gap inequality).
  std::vector<double> slack;
  bool violated = false;
  bool skipped = false;
};

struct InequalityReport {
  std::string name;
  int n_steps = 0;
  int n_violations = 0;
  int n_skipped = 0;
  /// Smallest slack seen for each component.
  std::vector<double> worst_slack;
  std::vector<StepMargin> steps;

  bool ok() const { return n_violations == 0; }
};

/// Componentwise e_{k+1} <= G e_k with
/// e = [consensus_err, tracking_err, sqrt(N) * opt_gap].
/// Throws std::invalid_argument if the trajectory's eta differs from G's or
/// exceeds mu / L.
InequalityReport check_theorem1(const Trajectory& traj, const theory::RateMatrix<double>& g);

/// Same check on a raw error sequence e_0, e_1, ...
InequalityReport check_theorem1(const std::vector<std::array<double, 3>>& errors,
                                const theory::RateMatrix<double>& g);

struct GapBoundParams {
  double mu = 0.0;
  double lip_L = 0.0;
  double hess_lip = 0.0;  // L-bar
  double eta = 0.0;
};

/// Mixed linear-quadratic bound on ||xbar_{k+1} - x*|| using the recorded
/// gamma_k of each step. Steps with gamma_k >= mu (or gamma unavailable) are
/// skipped and counted.
InequalityReport check_theorem3(const Trajectory& traj, const GapBoundParams& params);

/// Variant that takes gamma_k from an explicit series (one per record).
InequalityReport check_theorem3(const Trajectory& traj, const GapBoundParams& params,
                                const std::vector<double>& gamma_series);

enum class GapKind {
  mean_iterate,  // ||xbar_k - x*||
  stacked        // ||X_k - 1 x*||_F / sqrt(N)
};

/// r_k = gap_{k+1} / gap_k, truncated once a gap falls below kGapFloor.
std::vector<double> ratio_series(const std::vector<double>& gaps);
std::vector<double> ratio_series(const Trajectory& traj, GapKind kind = GapKind::mean_iterate);

/// Mean of the trailing `fraction` of the series (at least one element).
double tail_window_mean(const std::vector<double>& series, double fraction = 0.2);

/// Key-value text, a summary block followed by one line per step.
std::string format_report(const InequalityReport& report);

}  // namespace netgiant

#endif  // NETGIANT_VERIFY_HPP
