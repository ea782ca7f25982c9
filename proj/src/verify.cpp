#include "netgiant/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace netgiant {

namespace {

bool violates(double lhs, double rhs) { return lhs > rhs + kInequalityTol * (1.0 + std::abs(rhs)); }

void tally(InequalityReport& rep, StepMargin step) {
  ++rep.n_steps;
  if (step.skipped) {
    ++rep.n_skipped;
  } else {
    if (rep.worst_slack.empty()) {
      rep.worst_slack.assign(step.slack.size(), std::numeric_limits<double>::infinity());
    }
    for (std::size_t c = 0; c < step.slack.size(); ++c) {
      rep.worst_slack[c] = std::min(rep.worst_slack[c], step.slack[c]);
    }
    if (step.violated) ++rep.n_violations;
  }
  rep.steps.push_back(std::move(step));
}

}  // namespace

InequalityReport check_theorem1(const std::vector<std::array<double, 3>>& errors,
                                const theory::RateMatrix<double>& g) {
  InequalityReport rep;
  rep.name = "theorem1";
  for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
    const Eigen::Vector3d e(errors[k][0], errors[k][1], errors[k][2]);
    const Eigen::Vector3d bound = g.m * e;
    StepMargin step;
    step.iter = static_cast<int>(k);
    for (int c = 0; c < 3; ++c) {
      step.slack.push_back(bound(c) - errors[k + 1][c]);
      if (violates(errors[k + 1][c], bound(c))) step.violated = true;
    }
    tally(rep, std::move(step));
  }
  return rep;
}

InequalityReport check_theorem1(const Trajectory& traj, const theory::RateMatrix<double>& g) {
  const auto& p = g.params;
  if (std::abs(traj.config.eta - p.eta) > 1e-15 * std::max(1.0, p.eta)) {
    throw std::invalid_argument("trajectory eta does not match the rate matrix");
  }
  if (p.eta > p.mu / p.lip_L) {
    throw std::invalid_argument("bound requires eta <= mu / L");
  }
  const double root_n = std::sqrt(static_cast<double>(traj.n_nodes));
  std::vector<std::array<double, 3>> errors;
  errors.reserve(traj.records.size());
  for (const auto& r : traj.records) {
    errors.push_back({r.consensus_err, r.tracking_err, root_n * r.opt_gap});
  }
  return check_theorem1(errors, g);
}

InequalityReport check_theorem3(const Trajectory& traj, const GapBoundParams& params,
                                const std::vector<double>& gamma_series) {
  if (gamma_series.size() != traj.records.size()) {
    throw std::invalid_argument("gamma series length differs from the trajectory");
  }
  if (!(params.mu > 0.0) || params.lip_L < params.mu || params.hess_lip < 0.0) {
    throw std::invalid_argument("need L >= mu > 0 and L-bar >= 0");
  }
  if (!(params.eta > 0.0 && params.eta < 1.0)) {
    throw std::invalid_argument("eta must lie in (0, 1)");
  }
  const double eta = params.eta;
  const double mu = params.mu;
  const double root_n = std::sqrt(static_cast<double>(traj.n_nodes));

  InequalityReport rep;
  rep.name = "theorem3";
  for (std::size_t k = 0; k + 1 < traj.records.size(); ++k) {
    const auto& cur = traj.records[k];
    const double gamma = gamma_series[k];
    StepMargin step;
    step.iter = static_cast<int>(k);
    if (!std::isfinite(gamma) || gamma >= mu) {
      step.skipped = true;
      tally(rep, std::move(step));
      continue;
    }
    const double gap = cur.opt_gap;
    const double ce = cur.consensus_err;
    const double rhs = (1.0 - eta * (1.0 - gamma / mu)) * gap +
                       eta * params.hess_lip / (mu * root_n) * ce * gap +
                       eta * params.hess_lip / (2.0 * mu) * gap * gap +
                       eta / (mu * root_n) * cur.tracking_err +
                       eta * params.lip_L / (mu * root_n) * ce;
    const double lhs = traj.records[k + 1].opt_gap;
    step.slack.push_back(rhs - lhs);
    step.violated = violates(lhs, rhs);
    tally(rep, std::move(step));
  }
  return rep;
}

InequalityReport check_theorem3(const Trajectory& traj, const GapBoundParams& params) {
  std::vector<double> gammas;
  gammas.reserve(traj.records.size());
  for (const auto& r : traj.records) gammas.push_back(r.gamma_k);
  return check_theorem3(traj, params, gammas);
}

std::vector<double> ratio_series(const std::vector<double>& gaps) {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < gaps.size(); ++k) {
    if (gaps[k] < kGapFloor || gaps[k + 1] < kGapFloor) break;
    out.push_back(gaps[k + 1] / gaps[k]);
  }
  return out;
}

std::vector<double> ratio_series(const Trajectory& traj, GapKind kind) {
  std::vector<double> gaps;
  gaps.reserve(traj.records.size());
  for (const auto& r : traj.records) {
    gaps.push_back(kind == GapKind::mean_iterate ? r.opt_gap : r.stacked_gap);
  }
  return ratio_series(gaps);
}

double tail_window_mean(const std::vector<double>& series, double fraction) {
  if (series.empty()) throw std::invalid_argument("empty series");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw std::invalid_argument("fraction must lie in (0, 1]");
  const auto n = series.size();
  const auto len = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(fraction * n)));
  return std::accumulate(series.end() - static_cast<std::ptrdiff_t>(len), series.end(), 0.0) /
         static_cast<double>(len);
}

std::string format_report(const InequalityReport& report) {
  std::string out;
  char buf[96];
  out += "name=" + report.name + "\n";
  out += "steps=" + std::to_string(report.n_steps) + "\n";
  out += "violations=" + std::to_string(report.n_violations) + "\n";
  out += "skipped=" + std::to_string(report.n_skipped) + "\n";
  for (std::size_t c = 0; c < report.worst_slack.size(); ++c) {
    std::snprintf(buf, sizeof buf, "worst_slack_%zu=%.17e\n", c, report.worst_slack[c]);
    out += buf;
  }
  for (const auto& s : report.steps) {
    out += "step=" + std::to_string(s.iter);
    if (s.skipped) {
      out += " skipped=1\n";
      continue;
    }
    for (std::size_t c = 0; c < s.slack.size(); ++c) {
      std::snprintf(buf, sizeof buf, " slack_%zu=%.17e", c, s.slack[c]);
      out += buf;
    }
    out += s.violated ? " violated=1\n" : " violated=0\n";
  }
  return out;
}

}  // namespace netgiant
