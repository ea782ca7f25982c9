#include "netgiant/objectives.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace netgiant {

namespace {

double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

class QuadraticLocal final : public LocalObjective {
 public:
  QuadraticLocal(Eigen::MatrixXd a, Eigen::VectorXd b) : a_(std::move(a)), b_(std::move(b)) {}
  int dim() const override { return static_cast<int>(b_.size()); }
  double value(const Eigen::VectorXd& x) const override {
    const Eigen::VectorXd r = x - b_;
    return 0.5 * r.dot(a_ * r);
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override { return a_ * (x - b_); }
  Eigen::MatrixXd hessian(const Eigen::VectorXd&) const override { return a_; }

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
};

class BinaryLogisticLocal final : public LocalObjective {
 public:
  BinaryLogisticLocal(Eigen::MatrixXd u, Eigen::VectorXd v, double reg)
      : u_(std::move(u)), v_(std::move(v)), reg_(reg) {}
  int dim() const override { return static_cast<int>(u_.cols()); }

  double value(const Eigen::VectorXd& x) const override {
    const Eigen::VectorXd margin = v_.cwiseProduct(u_ * x);
    double loss = 0.0;
    for (Eigen::Index j = 0; j < margin.size(); ++j) loss += softplus(-margin(j));
    return loss / static_cast<double>(u_.rows()) + 0.5 * reg_ * x.squaredNorm();
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override {
    const Eigen::VectorXd margin = v_.cwiseProduct(u_ * x);
    Eigen::VectorXd coef(margin.size());
    for (Eigen::Index j = 0; j < margin.size(); ++j) coef(j) = -v_(j) * sigmoid(-margin(j));
    return u_.transpose() * coef / static_cast<double>(u_.rows()) + reg_ * x;
  }

  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const override {
    const Eigen::VectorXd z = u_ * x;
    Eigen::VectorXd curv(z.size());
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      const double s = sigmoid(z(j));
      curv(j) = s * (1.0 - s);
    }
    Eigen::MatrixXd h = u_.transpose() * curv.asDiagonal() * u_;
    h /= static_cast<double>(u_.rows());
    h.diagonal().array() += reg_;
    return h;
  }

 private:
  Eigen::MatrixXd u_;
  Eigen::VectorXd v_;
  double reg_;
};

class MultinomialLocal final : public LocalObjective {
 public:
  MultinomialLocal(Eigen::MatrixXd u_aug, Eigen::VectorXi labels, int n_classes, double reg)
      : u_(std::move(u_aug)), labels_(std::move(labels)), classes_(n_classes), reg_(reg) {}

  int dim() const override { return (classes_ - 1) * block(); }

  double value(const Eigen::VectorXd& x) const override {
    const Eigen::MatrixXd scores = class_scores(x);
    double loss = 0.0;
    for (Eigen::Index j = 0; j < scores.rows(); ++j) {
      const double top = std::max(0.0, scores.row(j).maxCoeff());
      const double lse =
          top + std::log(std::exp(-top) + (scores.row(j).array() - top).exp().sum());
      const int c = labels_(j) - 1;
      loss += lse - (c < classes_ - 1 ? scores(j, c) : 0.0);
    }
    return loss / static_cast<double>(u_.rows()) + reg_ * x.squaredNorm();
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override {
    Eigen::MatrixXd resid = probabilities(x);  // m x (M-1)
    for (Eigen::Index j = 0; j < resid.rows(); ++j) {
      const int c = labels_(j) - 1;
      if (c < classes_ - 1) resid(j, c) -= 1.0;
    }
    // Column l of u^T resid is the gradient block of class l.
    const Eigen::MatrixXd blocks = u_.transpose() * resid / static_cast<double>(u_.rows());
    Eigen::VectorXd g(dim());
    for (int l = 0; l < classes_ - 1; ++l) g.segment(l * block(), block()) = blocks.col(l);
    return g + 2.0 * reg_ * x;
  }

  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const override {
    const Eigen::MatrixXd phi = probabilities(x);
    const int p = block();
    const double inv_m = 1.0 / static_cast<double>(u_.rows());
    Eigen::MatrixXd h(dim(), dim());
    for (int l = 0; l < classes_ - 1; ++l) {
      for (int k = l; k < classes_ - 1; ++k) {
        Eigen::VectorXd wts = -phi.col(l).cwiseProduct(phi.col(k));
        if (k == l) wts += phi.col(l);
        const Eigen::MatrixXd blk = inv_m * (u_.transpose() * wts.asDiagonal() * u_);
        h.block(l * p, k * p, p, p) = blk;
        if (k != l) h.block(k * p, l * p, p, p) = blk.transpose();
      }
    }
    h.diagonal().array() += 2.0 * reg_;
    return h;
  }

 private:
  int block() const { return static_cast<int>(u_.cols()); }

  Eigen::MatrixXd class_scores(const Eigen::VectorXd& x) const {
    const Eigen::Map<const Eigen::MatrixXd> xm(x.data(), block(), classes_ - 1);
    return u_ * xm;
  }

  Eigen::MatrixXd probabilities(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd s = class_scores(x);
    for (Eigen::Index j = 0; j < s.rows(); ++j) {
      const double top = std::max(0.0, s.row(j).maxCoeff());
      s.row(j) = (s.row(j).array() - top).exp().matrix();
      const double z = std::exp(-top) + s.row(j).sum();
      s.row(j) /= z;
    }
    return s;
  }

  Eigen::MatrixXd u_;
  Eigen::VectorXi labels_;
  int classes_;
  double reg_;
};

void check_partitions(std::span<const Dataset> partitions) {
  if (partitions.empty()) throw std::invalid_argument("no partitions");
  const int d = partitions.front().dim();
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    const auto& p = partitions[i];
    if (p.n_samples() == 0) {
      throw std::invalid_argument("empty partition at node " + std::to_string(i));
    }
    if (p.dim() != d) throw std::invalid_argument("feature dimension mismatch across nodes");
    if (p.labels.size() != p.n_samples()) throw std::invalid_argument("label count mismatch");
  }
}

}  // namespace

double global_value(const ObjectiveSet& objs, const Eigen::VectorXd& x) {
  double acc = 0.0;
  for (const auto& f : objs.locals) acc += f->value(x);
  return acc / objs.n_nodes();
}

Eigen::VectorXd global_gradient(const ObjectiveSet& objs, const Eigen::VectorXd& x) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(objs.dim);
  for (const auto& f : objs.locals) acc += f->gradient(x);
  return acc / objs.n_nodes();
}

Eigen::MatrixXd global_hessian(const ObjectiveSet& objs, const Eigen::VectorXd& x) {
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(objs.dim, objs.dim);
  for (const auto& f : objs.locals) acc += f->hessian(x);
  return acc / objs.n_nodes();
}

ObjectiveSet quad_objective(std::span<const Eigen::MatrixXd> a_list,
                            std::span<const Eigen::VectorXd> b_list) {
  if (a_list.empty() || a_list.size() != b_list.size()) {
    throw std::invalid_argument("quadratic set needs matching, non-empty A and b lists");
  }
  ObjectiveSet objs;
  objs.dim = static_cast<int>(b_list.front().size());
  objs.mu = std::numeric_limits<double>::infinity();
  objs.lip_L = 0.0;
  for (std::size_t i = 0; i < a_list.size(); ++i) {
    const auto& a = a_list[i];
    if (a.rows() != objs.dim || a.cols() != objs.dim || b_list[i].size() != objs.dim) {
      throw std::invalid_argument("dimension mismatch in quadratic node " + std::to_string(i));
    }
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + a.cwiseAbs().maxCoeff())) {
      throw std::invalid_argument("A_" + std::to_string(i) + " is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    if (!(lo > 0.0)) {
      throw std::invalid_argument("A_" + std::to_string(i) + " is not positive definite");
    }
    objs.mu = std::min(objs.mu, lo);
    objs.lip_L = std::max(objs.lip_L, es.eigenvalues().maxCoeff());
    objs.locals.push_back(std::make_shared<QuadraticLocal>(a, b_list[i]));
  }
  objs.hess_lip = 0.0;
  return objs;
}

Eigen::VectorXd quad_minimizer(std::span<const Eigen::MatrixXd> a_list,
                               std::span<const Eigen::VectorXd> b_list) {
  const auto n = b_list.front().size();
  Eigen::MatrixXd a_sum = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < a_list.size(); ++i) {
    a_sum += a_list[i];
    rhs += a_list[i] * b_list[i];
  }
  return a_sum.llt().solve(rhs);
}

ObjectiveSet logistic_binary_objective(std::span<const Dataset> partitions, double reg) {
  if (!(reg > 0.0)) throw std::invalid_argument("regulariser must be positive");
  check_partitions(partitions);
  ObjectiveSet objs;
  objs.dim = partitions.front().dim();
  objs.mu = reg;
  double curvature = 0.0;
  double max_norm = 0.0;
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    const auto& p = partitions[i];
    for (Eigen::Index j = 0; j < p.labels.size(); ++j) {
      if (p.labels(j) != 1 && p.labels(j) != -1) {
        throw std::invalid_argument("binary label outside {-1,+1} at node " +
                                    std::to_string(i) + ", sample " + std::to_string(j));
      }
    }
    const Eigen::VectorXd sq = p.features.rowwise().squaredNorm();
    curvature = std::max(curvature, sq.sum() / (4.0 * p.n_samples()));
    max_norm = std::max(max_norm, std::sqrt(sq.maxCoeff()));
    objs.locals.push_back(std::make_shared<BinaryLogisticLocal>(
        p.features, p.labels.cast<double>(), reg));
  }
  objs.lip_L = reg + curvature;
  objs.hess_lip = kSigmoidCurvatureBound * max_norm * max_norm * max_norm;
  return objs;
}

ObjectiveSet multinomial_objective(std::span<const Dataset> partitions, int n_classes,
                                   double reg) {
  if (n_classes < 2) throw std::invalid_argument("multinomial model needs at least 2 classes");
  if (!(reg > 0.0)) throw std::invalid_argument("regulariser must be positive");
  check_partitions(partitions);
  const int d = partitions.front().dim();
  ObjectiveSet objs;
  objs.dim = (n_classes - 1) * (d + 1);
  objs.mu = 2.0 * reg;
  double curvature = 0.0;
  double max_norm = 0.0;
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    const auto& p = partitions[i];
    if (p.labels.minCoeff() < 1 || p.labels.maxCoeff() > n_classes) {
      throw std::invalid_argument("class label out of range 1.." + std::to_string(n_classes) +
                                  " at node " + std::to_string(i));
    }
    Eigen::MatrixXd aug(p.n_samples(), d + 1);
    aug.leftCols(d) = p.features;
    aug.col(d).setOnes();
    const Eigen::VectorXd sq = aug.rowwise().squaredNorm();
    curvature = std::max(curvature, 0.5 * sq.sum() / p.n_samples());
    max_norm = std::max(max_norm, std::sqrt(sq.maxCoeff()));
    objs.locals.push_back(
        std::make_shared<MultinomialLocal>(std::move(aug), p.labels, n_classes, reg));
  }
  objs.lip_L = 2.0 * reg + curvature;
  objs.hess_lip = 1.5 * max_norm * max_norm * max_norm;
  return objs;
}

double hessian_gap(std::span<const Eigen::MatrixXd> hessians) {
  if (hessians.empty()) throw std::invalid_argument("no Hessians");
  const auto n = hessians.front().rows();
  const double inv_count = 1.0 / static_cast<double>(hessians.size());
  Eigen::MatrixXd arith = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd inv_mean = Eigen::MatrixXd::Zero(n, n);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  for (const auto& h : hessians) {
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    if (llt.info() != Eigen::Success) {
      throw std::domain_error("local Hessian is not positive definite");
    }
    arith += h;
    inv_mean += llt.solve(eye);
  }
  arith *= inv_count;
  inv_mean *= inv_count;
  Eigen::LLT<Eigen::MatrixXd> llt(inv_mean);
  const Eigen::MatrixXd harmonic = llt.solve(eye);
  return (arith - harmonic).norm();
}

double hessian_gap(const ObjectiveSet& objs, const Eigen::MatrixXd& x) {
  if (x.rows() != objs.n_nodes() || x.cols() != objs.dim) {
    throw std::invalid_argument("stacked point has wrong shape");
  }
  std::vector<Eigen::MatrixXd> hs;
  hs.reserve(objs.n_nodes());
  for (int i = 0; i < objs.n_nodes(); ++i) hs.push_back(objs[i].hessian(x.row(i).transpose()));
  return hessian_gap(hs);
}

ConstantEstimates estimate_constants(const ObjectiveSet& objs,
                                     std::span<const Eigen::VectorXd> probes) {
  if (probes.size() < 2) throw std::invalid_argument("need at least two probes");
  ConstantEstimates est;
  est.mu_hat = std::numeric_limits<double>::infinity();
  // hess[p][i]: Hessian of node i at probe p.
  std::vector<std::vector<Eigen::MatrixXd>> hess(probes.size());
  for (std::size_t p = 0; p < probes.size(); ++p) {
    for (int i = 0; i < objs.n_nodes(); ++i) {
      hess[p].push_back(objs[i].hessian(probes[p]));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hess[p].back(), Eigen::EigenvaluesOnly);
      est.mu_hat = std::min(est.mu_hat, es.eigenvalues().minCoeff());
      est.lip_L_hat = std::max(est.lip_L_hat, es.eigenvalues().maxCoeff());
    }
  }
  for (std::size_t p = 0; p < probes.size(); ++p) {
    for (std::size_t q = p + 1; q < probes.size(); ++q) {
      const double dist = (probes[p] - probes[q]).norm();
      if (dist == 0.0) continue;
      for (int i = 0; i < objs.n_nodes(); ++i) {
        est.hess_lip_hat = std::max(est.hess_lip_hat, (hess[p][i] - hess[q][i]).norm() / dist);
      }
    }
  }
  return est;
}

}  // namespace netgiant
