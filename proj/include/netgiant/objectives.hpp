#ifndef NETGIANT_OBJECTIVES_HPP
#define NETGIANT_OBJECTIVES_HPP

#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace netgiant {

/// Samples stored row-wise. Binary sets use labels in {-1, +1}; multiclass
/// sets use {1, ..., M}.
struct Dataset {
  Eigen::MatrixXd features;
  Eigen::VectorXi labels;

  int n_samples() const { return static_cast<int>(features.rows()); }
  int dim() const { return static_cast<int>(features.cols()); }
};

/// Value / gradient / Hessian oracle of one node's loss.
class LocalObjective {
 public:
  virtual ~LocalObjective() = default;
  virtual int dim() const = 0;
  virtual double value(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd gradient(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const = 0;
};

/// N local oracles over a shared decision dimension, with the constants the
/// convergence analysis needs: mu I <= hessian <= L I and a Frobenius
/// Lipschitz bound on the Hessian (0 for quadratics).
struct ObjectiveSet {
  std::vector<std::shared_ptr<const LocalObjective>> locals;
  int dim = 0;
  double mu = 0.0;
  double lip_L = 0.0;
  double hess_lip = 0.0;

  int n_nodes() const { return static_cast<int>(locals.size()); }
  const LocalObjective& operator[](int i) const { return *locals[i]; }
};

// f(x) = (1/N) sum_i f_i(x) and its derivatives.
double global_value(const ObjectiveSet& objs, const Eigen::VectorXd& x);
Eigen::VectorXd global_gradient(const ObjectiveSet& objs, const Eigen::VectorXd& x);
Eigen::MatrixXd global_hessian(const ObjectiveSet& objs, const Eigen::VectorXd& x);

/// f_i(x) = 1/2 (x - b_i)^T A_i (x - b_i).
ObjectiveSet quad_objective(std::span<const Eigen::MatrixXd> a_list,
                            std::span<const Eigen::VectorXd> b_list);

/// Closed-form minimizer (sum A_i)^{-1} sum A_i b_i of a quadratic set.
Eigen::VectorXd quad_minimizer(std::span<const Eigen::MatrixXd> a_list,
                               std::span<const Eigen::VectorXd> b_list);

/// |d^2/dz^2 sigmoid(z)| <= 1/(6 sqrt 3).
inline const double kSigmoidCurvatureBound = 1.0 / (6.0 * std::sqrt(3.0));

/// Regularised binary logistic loss per node:
/// (1/m) sum log(1 + exp(-v u^T x)) + (reg/2) ||x||^2.
ObjectiveSet logistic_binary_objective(std::span<const Dataset> partitions, double reg);

/// Multinomial softmax cross-entropy with the last class as reference and a
/// constant-1 feature appended; the decision vector stacks the M-1 class
/// blocks of length d+1. Penalty is reg * ||x||^2.
ObjectiveSet multinomial_objective(std::span<const Dataset> partitions, int n_classes,
                                   double reg);

/// ||(1/N) sum H_i - ((1/N) sum H_i^{-1})^{-1}||_F with H_i the Hessian of
/// node i at row i of `x`.
double hessian_gap(const ObjectiveSet& objs, const Eigen::MatrixXd& x);

/// Same quantity from precomputed local Hessians.
double hessian_gap(std::span<const Eigen::MatrixXd> hessians);

struct ConstantEstimates {
  double mu_hat = 0.0;
  double lip_L_hat = 0.0;
  double hess_lip_hat = 0.0;
};

/// Empirical curvature constants over the probe points (lower bounds on
/// the true suprema).
ConstantEstimates estimate_constants(const ObjectiveSet& objs,
                                     std::span<const Eigen::VectorXd> probes);

}  // namespace netgiant

#endif  // NETGIANT_OBJECTIVES_HPP
