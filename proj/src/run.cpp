#include "netgiant/run.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "netgiant/experiment.hpp"

namespace netgiant {

void RunConfig::validate() const {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw std::invalid_argument("step size eta must lie in (0, 1), got " + std::to_string(eta));
  }
  if (max_iters < 0) throw std::invalid_argument("max_iters must be non-negative");
  if (alpha && !(*alpha > 0.0 && *alpha < 1.0)) {
    throw std::invalid_argument("momentum alpha must lie in (0, 1)");
  }
}

std::string RunConfig::display_name() const {
  if (!label.empty()) return label;
  std::ostringstream os;
  os << to_string(algorithm) << " eta=" << eta;
  if (algorithm == Algorithm::accngd && alpha) os << " alpha=" << *alpha;
  return os.str();
}

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::converged: return "converged";
    case RunStatus::max_iters: return "max_iters";
    case RunStatus::aborted: return "aborted";
  }
  return "unknown";
}

namespace {

bool finite_state(const NetworkState& st) {
  return st.x.allFinite() && st.s.allFinite() && st.grad.allFinite() &&
         (st.v.size() == 0 || st.v.allFinite()) && (st.y.size() == 0 || st.y.allFinite());
}

}  // namespace

Trajectory run(const RunConfig& config, const ConsensusMatrix& w, const ObjectiveSet& objs,
               const Eigen::MatrixXd& x0, const Eigen::VectorXd& x_star,
               const StepObserver& observer) {
  config.validate();
  const double alpha = config.alpha.value_or(std::sqrt(objs.mu * config.eta));
  if (config.algorithm == Algorithm::accngd && !(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("momentum sqrt(mu * eta) falls outside (0, 1)");
  }

  Trajectory traj;
  traj.config = config;
  traj.config.alpha = config.algorithm == Algorithm::accngd ? std::optional<double>(alpha)
                                                            : config.alpha;
  traj.n_nodes = objs.n_nodes();

  const double f_star = global_value(objs, x_star);
  NetworkState state = init_state(objs, x0, config.algorithm);
  if (observer) observer(state);

  auto record = [&](const NetworkState& st) {
    MetricsRecord rec = metrics_from_state(st, x_star, f_star, objs, config.track_gamma);
    if (!traj.records.empty()) {
      const double prev = traj.records.back().opt_gap;
      if (prev >= kGapFloor) rec.ratio_r = rec.opt_gap / prev;
    }
    traj.records.push_back(rec);
    return rec;
  };

  MetricsRecord last = record(state);
  if (last.opt_gap <= config.tol) {
    traj.status = RunStatus::converged;
    return traj;
  }

  for (int k = 0; k < config.max_iters; ++k) {
    try {
      switch (config.algorithm) {
        case Algorithm::netgiant: state = netgiant_step(state, w, config.eta, objs); break;
        case Algorithm::gradtrack: state = gradtrack_step(state, w, config.eta, objs); break;
        case Algorithm::accngd: state = accngd_step(state, w, config.eta, alpha, objs); break;
      }
    } catch (const std::domain_error& e) {
      traj.status = RunStatus::aborted;
      traj.diagnostic = "iteration " + std::to_string(k + 1) + ": " + e.what();
      return traj;
    }
    if (!finite_state(state)) {
      traj.status = RunStatus::aborted;
      traj.diagnostic = "non-finite value in network state at iteration " +
                        std::to_string(state.iter);
      return traj;
    }
    if (observer) observer(state);
    last = record(state);
    if (last.opt_gap <= config.tol) {
      traj.status = RunStatus::converged;
      return traj;
    }
  }
  traj.status = RunStatus::max_iters;
  return traj;
}

}  // namespace netgiant
