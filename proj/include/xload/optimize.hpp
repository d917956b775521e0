#pragma once

// Small quasi-Newton toolkit shared by every maximum-likelihood fit in the
// library: projected BFGS under box constraints, finite-difference
// derivatives and a repaired inverse of a negative Hessian.

#include <functional>

#include <Eigen/Dense>

namespace xload {

class Rng;

using ObjectiveFn = std::function<double(const Eigen::VectorXd&)>;
// Writes the gradient of the objective into the second argument.
using GradientFn = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static Box unbounded(Eigen::Index n);
  Eigen::VectorXd project(const Eigen::VectorXd& x) const;
};

struct MinimizeOptions {
  int max_iterations = 500;
  // Converged once the projected gradient satisfies
  // |g|_inf <= grad_tol * (1 + |f|).
  double grad_tol = 1e-9;
  // Relative step for numeric gradients.
  double fd_step = 1e-6;
};

struct MinimizeResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Minimizes f over the box. When grad is empty a central-difference gradient
// is used. Objective values >= 1e299 are treated as infeasible.
MinimizeResult minimize_bfgs(const ObjectiveFn& f, const GradientFn& grad,
                             Eigen::VectorXd x0, const Box& box,
                             const MinimizeOptions& options = {});

Eigen::VectorXd numeric_gradient(const ObjectiveFn& f, const Eigen::VectorXd& x,
                                 double rel_step = 1e-6);

// Central differences of an analytic gradient, symmetrized. Step per
// coordinate is rel_step * (1 + |x_i|).
Eigen::MatrixXd hessian_from_gradient(const GradientFn& grad,
                                      const Eigen::VectorXd& x,
                                      double rel_step = 1e-4);

// Central second differences of the objective itself, same step rule.
Eigen::MatrixXd hessian_from_values(const ObjectiveFn& f, const Eigen::VectorXd& x,
                                    double rel_step = 1e-4);

struct CovarianceResult {
  Eigen::MatrixXd covariance;
  // True when eigenvalues had to be floored.
  bool repaired = false;
};

// Inverts a (supposedly positive definite) negative Hessian after flooring
// its eigenvalues at eig_floor.
CovarianceResult invert_negative_hessian(const Eigen::MatrixXd& neg_hessian,
                                         double eig_floor = 1e-8);

// One multivariate normal draw; the covariance may be singular.
Eigen::VectorXd draw_multivariate_normal(const Eigen::VectorXd& mean,
                                         const Eigen::MatrixXd& covariance,
                                         Rng& rng);

}  // namespace xload
