#include "xload/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "xload/error.hpp"
#include "xload/random.hpp"

namespace xload {

namespace {

constexpr double kInfeasible = 1e299;

bool feasible(double f) { return std::isfinite(f) && f < kInfeasible; }

// Central differences, falling back to one-sided steps at the box faces.
Eigen::VectorXd boxed_gradient(const ObjectiveFn& f, const Eigen::VectorXd& x,
                               double fx, const Box& box, double rel_step) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = rel_step * (1.0 + std::fabs(x[i]));
    const bool up_ok = x[i] + h <= box.upper[i];
    const bool down_ok = x[i] - h >= box.lower[i];
    double f_up = fx, f_down = fx, span = 0.0;
    if (up_ok) {
      probe[i] = x[i] + h;
      f_up = f(probe);
      span += h;
    }
    if (down_ok) {
      probe[i] = x[i] - h;
      f_down = f(probe);
      span += h;
    }
    probe[i] = x[i];
    g[i] = span > 0.0 ? (f_up - f_down) / span : 0.0;
  }
  return g;
}

}  // namespace

Box Box::unbounded(Eigen::Index n) {
  const double inf = std::numeric_limits<double>::infinity();
  return Box{Eigen::VectorXd::Constant(n, -inf), Eigen::VectorXd::Constant(n, inf)};
}

Eigen::VectorXd Box::project(const Eigen::VectorXd& x) const {
  return x.cwiseMax(lower).cwiseMin(upper);
}

MinimizeResult minimize_bfgs(const ObjectiveFn& f, const GradientFn& grad,
                             Eigen::VectorXd x0, const Box& box,
                             const MinimizeOptions& options) {
  const Eigen::Index n = x0.size();
  MinimizeResult out;
  Eigen::VectorXd x = box.project(x0);
  double fx = f(x);
  out.x = x;
  out.value = fx;
  if (!feasible(fx)) return out;

  auto gradient = [&](const Eigen::VectorXd& at, double f_at) {
    if (grad) {
      Eigen::VectorXd g(n);
      grad(at, g);
      return g;
    }
    return boxed_gradient(f, at, f_at, box, options.fd_step);
  };

  Eigen::VectorXd g = gradient(x, fx);
  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
  bool fresh_metric = true;

  for (int it = 0; it < options.max_iterations; ++it) {
    out.iterations = it;
    Eigen::VectorXd pg = g;
    std::vector<bool> active(static_cast<std::size_t>(n), false);
    for (Eigen::Index i = 0; i < n; ++i) {
      if ((x[i] <= box.lower[i] && g[i] > 0.0) || (x[i] >= box.upper[i] && g[i] < 0.0)) {
        pg[i] = 0.0;
        active[static_cast<std::size_t>(i)] = true;
      }
    }
    const double tol = options.grad_tol * (1.0 + std::fabs(fx));
    const double pg_norm = pg.lpNorm<Eigen::Infinity>();
    if (!std::isfinite(pg_norm)) break;
    if (pg_norm <= tol) {
      out.converged = true;
      break;
    }

    Eigen::VectorXd d = -(h_inv * pg);
    for (Eigen::Index i = 0; i < n; ++i)
      if (active[static_cast<std::size_t>(i)]) d[i] = 0.0;
    if (d.dot(pg) >= 0.0) {
      h_inv.setIdentity();
      fresh_metric = true;
      d = -pg;
    }
    double alpha = 1.0;
    if (fresh_metric) alpha = std::min(1.0, 1.0 / d.lpNorm<Eigen::Infinity>());

    bool accepted = false;
    Eigen::VectorXd x_new;
    double f_new = 0.0;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = box.project(x + alpha * d);
      f_new = f(x_new);
      if (feasible(f_new) && f_new <= fx + 1e-4 * g.dot(x_new - x)) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (!fresh_metric) {
        // Retry once along the steepest descent direction.
        h_inv.setIdentity();
        fresh_metric = true;
        continue;
      }
      // Line search stalled at the noise floor of the objective.
      out.converged = pg_norm <= 1e4 * tol;
      break;
    }

    Eigen::VectorXd g_new = gradient(x_new, f_new);
    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (fresh_metric) h_inv *= sy / y.dot(y);
      const double rho = 1.0 / sy;
      const Eigen::VectorXd hy = h_inv * y;
      // H+ = (I - rho s y')H(I - rho y s') + rho s s'
      h_inv += rho * rho * y.dot(hy) * s * s.transpose() + rho * s * s.transpose() -
               rho * (hy * s.transpose() + s * hy.transpose());
      fresh_metric = false;
    }
    const double f_change = fx - f_new;
    x = x_new;
    fx = f_new;
    g = g_new;
    if (f_change <= 1e-15 * (1.0 + std::fabs(fx)) &&
        s.lpNorm<Eigen::Infinity>() <= 1e-13 * (1.0 + x.lpNorm<Eigen::Infinity>())) {
      out.converged = pg_norm <= 1e4 * tol;
      break;
    }
  }
  out.x = x;
  out.value = fx;
  return out;
}

Eigen::VectorXd numeric_gradient(const ObjectiveFn& f, const Eigen::VectorXd& x,
                                 double rel_step) {
  return boxed_gradient(f, x, f(x), Box::unbounded(x.size()), rel_step);
}

Eigen::MatrixXd hessian_from_gradient(const GradientFn& grad, const Eigen::VectorXd& x,
                                      double rel_step) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd h(n, n);
  Eigen::VectorXd probe = x, g_up(n), g_down(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double step = rel_step * (1.0 + std::fabs(x[j]));
    probe[j] = x[j] + step;
    grad(probe, g_up);
    probe[j] = x[j] - step;
    grad(probe, g_down);
    probe[j] = x[j];
    h.col(j) = (g_up - g_down) / (2.0 * step);
  }
  return 0.5 * (h + h.transpose());
}

Eigen::MatrixXd hessian_from_values(const ObjectiveFn& f, const Eigen::VectorXd& x,
                                    double rel_step) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd h(n, n);
  Eigen::VectorXd step(n);
  for (Eigen::Index i = 0; i < n; ++i) step[i] = rel_step * (1.0 + std::fabs(x[i]));
  const double f0 = f(x);
  Eigen::VectorXd p = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    p[i] = x[i] + step[i];
    const double up = f(p);
    p[i] = x[i] - step[i];
    const double down = f(p);
    p[i] = x[i];
    h(i, i) = (up - 2.0 * f0 + down) / (step[i] * step[i]);
    for (Eigen::Index j = 0; j < i; ++j) {
      auto at = [&](double si, double sj) {
        p[i] = x[i] + si * step[i];
        p[j] = x[j] + sj * step[j];
        const double v = f(p);
        p[i] = x[i];
        p[j] = x[j];
        return v;
      };
      const double v = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) /
                       (4.0 * step[i] * step[j]);
      h(i, j) = v;
      h(j, i) = v;
    }
  }
  return h;
}

CovarianceResult invert_negative_hessian(const Eigen::MatrixXd& neg_hessian,
                                         double eig_floor) {
  CovarianceResult out;
  const Eigen::MatrixXd sym = 0.5 * (neg_hessian + neg_hessian.transpose());
  if (!sym.allFinite()) throw NumericError("negative Hessian has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) throw NumericError("eigen decomposition failed");
  Eigen::VectorXd values = eig.eigenvalues();
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] < eig_floor) {
      values[i] = eig_floor;
      out.repaired = true;
    }
  }
  out.covariance = eig.eigenvectors() * values.cwiseInverse().asDiagonal() *
                   eig.eigenvectors().transpose();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
  return out;
}

Eigen::VectorXd draw_multivariate_normal(const Eigen::VectorXd& mean,
                                         const Eigen::MatrixXd& covariance, Rng& rng) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance);
  if (eig.info() != Eigen::Success) throw NumericError("covariance decomposition failed");
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
  if (values.minCoeff() < -1e-10 * scale)
    throw NumericError("covariance matrix is not positive semi-definite");
  Eigen::VectorXd z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i)
    z[i] = std::sqrt(std::max(values[i], 0.0)) * rng.normal();
  return mean + eig.eigenvectors() * z;
}

}  // namespace xload
