#include "netgiant/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <stdexcept>
#include <thread>
#include <vector>

namespace netgiant {

namespace {

// Runs body(i) for every node. Each call writes only its own row, so the
// result does not depend on the thread count.
template <typename Body>
void for_each_node(int n_nodes, Body&& body) {
  const int workers = std::min(worker_threads(), n_nodes);
  if (workers <= 1) {
    for (int i = 0; i < n_nodes; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (int i = t; i < n_nodes; i += workers) body(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void check_shape(const NetworkState& state, const ConsensusMatrix& w,
                 const ObjectiveSet& objs) {
  if (state.n_nodes() != objs.n_nodes() || state.dim() != objs.dim ||
      w.n_nodes() != objs.n_nodes()) {
    throw std::invalid_argument("state, consensus matrix and objective set disagree in shape");
  }
}

}  // namespace

int worker_threads() {
  if (const char* env = std::getenv("NETGIANT_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

std::string_view to_string(Algorithm alg) {
  switch (alg) {
    case Algorithm::netgiant: return "netgiant";
    case Algorithm::gradtrack: return "gradtrack";
    case Algorithm::accngd: return "accngd";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "netgiant") return Algorithm::netgiant;
  if (name == "gradtrack") return Algorithm::gradtrack;
  if (name == "accngd") return Algorithm::accngd;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) +
                              "' (expected netgiant, gradtrack or accngd)");
}

Eigen::MatrixXd stacked_gradients(const ObjectiveSet& objs, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd g(x.rows(), x.cols());
  for_each_node(objs.n_nodes(), [&](int i) {
    g.row(i) = objs[i].gradient(x.row(i).transpose()).transpose();
  });
  return g;
}

NetworkState init_state(const ObjectiveSet& objs, const Eigen::MatrixXd& x0, Algorithm alg) {
  if (x0.rows() != objs.n_nodes() || x0.cols() != objs.dim) {
    throw std::invalid_argument("initial point must be N x n (" +
                                std::to_string(objs.n_nodes()) + " x " +
                                std::to_string(objs.dim) + ")");
  }
  if (!x0.allFinite()) throw std::invalid_argument("initial point is not finite");
  NetworkState st;
  st.x = x0;
  st.grad = stacked_gradients(objs, x0);
  st.s = st.grad;
  if (alg == Algorithm::accngd) {
    st.v = x0;
    st.y = x0;
  }
  return st;
}

NetworkState netgiant_step(const NetworkState& state, const ConsensusMatrix& w, double eta,
                           const ObjectiveSet& objs) {
  check_shape(state, w, objs);
  Eigen::MatrixXd dir(state.x.rows(), state.x.cols());
  for_each_node(objs.n_nodes(), [&](int i) {
    Eigen::LLT<Eigen::MatrixXd> llt(objs[i].hessian(state.x.row(i).transpose()));
    if (llt.info() != Eigen::Success) {
      throw std::domain_error("local Hessian at node " + std::to_string(i) +
                              " is not positive definite");
    }
    dir.row(i) = llt.solve(state.s.row(i).transpose()).transpose();
  });

  NetworkState next;
  next.x = w.w * state.x - eta * dir;
  next.grad = stacked_gradients(objs, next.x);
  next.s = w.w * state.s + next.grad - state.grad;
  next.iter = state.iter + 1;
  return next;
}

NetworkState gradtrack_step(const NetworkState& state, const ConsensusMatrix& w, double eta,
                            const ObjectiveSet& objs) {
  check_shape(state, w, objs);
  NetworkState next;
  next.x = w.w * state.x - eta * state.s;
  next.grad = stacked_gradients(objs, next.x);
  next.s = w.w * state.s + next.grad - state.grad;
  next.iter = state.iter + 1;
  return next;
}

NetworkState accngd_step(const NetworkState& state, const ConsensusMatrix& w, double eta,
                         double alpha, const ObjectiveSet& objs) {
  check_shape(state, w, objs);
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("momentum must lie in (0, 1)");
  if (state.y.size() == 0 || state.v.size() == 0) {
    throw std::invalid_argument("state was not initialised for ACC-NGD-SC");
  }
  const Eigen::MatrixXd wy = w.w * state.y;
  NetworkState next;
  next.x = wy - eta * state.s;
  next.v = (1.0 - alpha) * (w.w * state.v) + alpha * wy - (eta / alpha) * state.s;
  next.y = (next.x + alpha * next.v) / (1.0 + alpha);
  next.grad = stacked_gradients(objs, next.y);
  next.s = w.w * state.s + next.grad - state.grad;
  next.iter = state.iter + 1;
  return next;
}

double tracking_residual(const NetworkState& state) {
  const Eigen::RowVectorXd s_mean = state.s.colwise().mean();
  const Eigen::RowVectorXd g_mean = state.grad.colwise().mean();
  const double scale = std::max(
      {g_mean.norm(), state.grad.norm() / std::sqrt(static_cast<double>(state.n_nodes())),
       1e-300});
  return (s_mean - g_mean).norm() / scale;
}

Eigen::VectorXd damped_newton_step(const Eigen::VectorXd& z, double eta,
                                   const ObjectiveSet& objs) {
  Eigen::LLT<Eigen::MatrixXd> llt(global_hessian(objs, z));
  if (llt.info() != Eigen::Success) throw std::domain_error("Hessian is not positive definite");
  return z - eta * llt.solve(global_gradient(objs, z));
}

Eigen::VectorXd newton_backtracking_solve(const ObjectiveSet& objs, const Eigen::VectorXd& x0,
                                          double tol) {
  constexpr double armijo = 0.25;
  constexpr double shrink = 0.5;
  Eigen::VectorXd x = x0;
  for (int it = 0; it < kNewtonMaxIters; ++it) {
    const Eigen::VectorXd g = global_gradient(objs, x);
    if (g.norm() <= tol) return x;
    Eigen::LLT<Eigen::MatrixXd> llt(global_hessian(objs, x));
    if (llt.info() != Eigen::Success) throw std::domain_error("Hessian is not positive definite");
    const Eigen::VectorXd step = llt.solve(g);
    const double decrement2 = g.dot(step);
    // In the quadratic phase f differences drop below rounding; take full steps.
    if (decrement2 < 1e-10) {
      x -= step;
      continue;
    }
    const double f0 = global_value(objs, x);
    double t = 1.0;
    while (global_value(objs, x - t * step) > f0 - armijo * t * decrement2 && t > 1e-12) {
      t *= shrink;
    }
    x -= t * step;
  }
  throw std::runtime_error("Newton solve did not reach tolerance within " +
                           std::to_string(kNewtonMaxIters) + " iterations");
}

}  // namespace netgiant
