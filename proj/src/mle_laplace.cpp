#include "xload/mle_laplace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "xload/core_dist.hpp"
#include "xload/error.hpp"

namespace xload {

namespace {

constexpr double kEulerGamma = 0.5772156649015329;

struct PointTerms {
  double ll;
  double d_mu;         // d ll / d mu
  double d_log_scale;  // d ll / d log sigma
  double d_xi;
};

// GEV log density of one point and its derivatives. Returns false outside
// the support.
bool gev_point(double y, double mu, double log_sigma, double xi, PointTerms& out) {
  const double sigma = std::exp(log_sigma);
  const double z = (y - mu) / sigma;
  double t = 1.0, a = z, a_prime = -0.5 * z * z;
  if (std::fabs(xi) >= kXiEps) {
    t = 1.0 + xi * z;
    if (!(t > 0.0)) return false;
    const double log_t = std::log1p(xi * z);
    a = log_t / xi;
    if (std::fabs(xi) < 1e-5) {
      const double z2 = z * z;
      a_prime = -0.5 * z2 + (2.0 / 3.0) * xi * z2 * z - 0.75 * xi * xi * z2 * z2;
    } else {
      a_prime = (z / t - a) / xi;
    }
    out.ll = -log_sigma - log_t - a - std::exp(-a);
  } else {
    out.ll = -log_sigma - z - std::exp(-z);
  }
  const double e = std::exp(-a);
  const double core = ((1.0 + xi) - e) / t;
  out.d_mu = core / sigma;
  out.d_log_scale = -1.0 + z * core;
  out.d_xi = -z / t - a_prime * (1.0 - e);
  return std::isfinite(out.ll);
}

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

bool trunc_normal_point(double s, double eta, double log_delta, PointTerms& out) {
  if (s < 0.0) return false;
  const double delta = std::exp(log_delta);
  const double z = (s - eta) / delta;
  const double c = eta / delta;
  const double lambda = normal_inverse_mills(c);
  out.ll = -0.5 * z * z - log_delta - kLogSqrt2Pi - log_normal_cdf(c);
  out.d_mu = (z - lambda) / delta;
  out.d_log_scale = z * z - 1.0 + lambda * c;
  out.d_xi = 0.0;
  return std::isfinite(out.ll);
}

double sample_sd(const Eigen::VectorXd& y) {
  if (y.size() < 2) return 0.0;
  const double m = y.mean();
  return std::sqrt((y.array() - m).square().sum() / static_cast<double>(y.size() - 1));
}

}  // namespace

RegressionData RegressionData::loads(const RecordTable& records, bool use_s) {
  RegressionData d;
  d.v.reserve(records.size());
  d.y.reserve(records.size());
  if (use_s) d.s.reserve(records.size());
  for (const TenMinRecord& r : records) {
    d.v.push_back(r.v);
    if (use_s) d.s.push_back(r.s);
    d.y.push_back(r.y);
  }
  return d;
}

RegressionData RegressionData::turbulence(const RecordTable& records) {
  RegressionData d;
  d.v.reserve(records.size());
  d.y.reserve(records.size());
  for (const TenMinRecord& r : records) {
    d.v.push_back(r.v);
    d.y.push_back(r.s);
  }
  return d;
}

double FitResult::xi() const {
  if (kind != RegressionKind::kGev) return 0.0;
  return xi_free ? params[k_mu + k_sigma] : xi_fixed_value;
}

double ModelDraw::location(double v, double s) const {
  return design_row(phi_mu, v, s).dot(beta);
}

double ModelDraw::scale(double v, double s) const {
  return std::exp(design_row(phi_sigma, v, s).dot(theta));
}

RegressionProblem::RegressionProblem(RegressionKind kind, const PhiState& phi_mu,
                                     const PhiState& phi_sigma,
                                     const RegressionData& data,
                                     std::optional<double> fixed_xi)
    : kind_(kind),
      k_mu_(phi_mu.k()),
      k_sigma_(phi_sigma.k()),
      xi_free_(kind == RegressionKind::kGev && !fixed_xi.has_value()),
      fixed_xi_(fixed_xi.value_or(0.0)) {
  if (data.v.size() != data.y.size() || (!data.s.empty() && data.s.size() != data.y.size()))
    throw InvalidArgument("regression data columns differ in length");
  if (data.size() == 0) throw InvalidArgument("regression data is empty");
  const CovariateTable x = data.covariates();
  x_mu_ = design_matrix(phi_mu, x);
  x_sigma_ = design_matrix(phi_sigma, x);
  y_ = Eigen::Map<const Eigen::VectorXd>(data.y.data(), static_cast<Eigen::Index>(data.size()));
}

double RegressionProblem::evaluate(const Eigen::VectorXd& params,
                                   Eigen::VectorXd* grad) const {
  if (params.size() != dim()) throw InvalidArgument("parameter vector has the wrong length");
  const Eigen::VectorXd mu = x_mu_ * params.head(k_mu_);
  const Eigen::VectorXd log_scale = x_sigma_ * params.segment(k_mu_, k_sigma_);
  const double xi = xi_free_ ? params[k_mu_ + k_sigma_] : fixed_xi_;
  Eigen::VectorXd g_mu, g_scale;
  if (grad) {
    g_mu.resize(y_.size());
    g_scale.resize(y_.size());
  }
  double ll = 0.0, g_xi = 0.0;
  PointTerms pt{};
  for (Eigen::Index i = 0; i < y_.size(); ++i) {
    const bool ok = kind_ == RegressionKind::kGev
                        ? gev_point(y_[i], mu[i], log_scale[i], xi, pt)
                        : trunc_normal_point(y_[i], mu[i], log_scale[i], pt);
    if (!ok) {
      ll += kLogDensityFloor;
      if (grad) {
        g_mu[i] = 0.0;
        g_scale[i] = 0.0;
      }
      continue;
    }
    ll += pt.ll;
    if (grad) {
      g_mu[i] = pt.d_mu;
      g_scale[i] = pt.d_log_scale;
      g_xi += pt.d_xi;
    }
  }
  if (grad) {
    grad->resize(dim());
    grad->head(k_mu_) = x_mu_.transpose() * g_mu;
    grad->segment(k_mu_, k_sigma_) = x_sigma_.transpose() * g_scale;
    if (xi_free_) (*grad)[k_mu_ + k_sigma_] = g_xi;
  }
  return ll;
}

double RegressionProblem::loglik(const Eigen::VectorXd& params) const {
  return evaluate(params, nullptr);
}

void RegressionProblem::gradient(const Eigen::VectorXd& params, Eigen::VectorXd& out) const {
  evaluate(params, &out);
}

Eigen::VectorXd RegressionProblem::default_start() const {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(dim());
  const double mean = y_.mean();
  double sd = sample_sd(y_);
  sd = std::max(sd, 1e-6 * (1.0 + std::fabs(mean)));
  if (kind_ == RegressionKind::kGev) {
    const double sigma0 = sd * std::sqrt(6.0) / M_PI;
    p[0] = mean - kEulerGamma * sigma0;
    p[k_mu_] = std::log(sigma0);
    if (xi_free_) p[k_mu_ + k_sigma_] = 0.05;
  } else {
    p[0] = mean;
    p[k_mu_] = std::log(sd);
  }
  return p;
}

Box RegressionProblem::box(double xi_bound) const {
  Box b = Box::unbounded(dim());
  if (xi_free_) {
    b.lower[dim() - 1] = -xi_bound;
    b.upper[dim() - 1] = xi_bound;
  }
  return b;
}

double gev_regression_loglik(const Eigen::VectorXd& beta, const Eigen::VectorXd& theta,
                             double xi, const PhiState& phi_mu, const PhiState& phi_sigma,
                             const RegressionData& data) {
  if (beta.size() != phi_mu.k() || theta.size() != phi_sigma.k())
    throw InvalidArgument("coefficient lengths do not match the bases");
  RegressionProblem problem(RegressionKind::kGev, phi_mu, phi_sigma, data, xi);
  Eigen::VectorXd p(beta.size() + theta.size());
  p << beta, theta;
  return problem.loglik(p);
}

double schwarz_criterion(double loglik, int d, std::size_t n) {
  return loglik - 0.5 * d * std::log(static_cast<double>(n));
}

FitResult fit_mle(RegressionKind kind, const PhiState& phi_mu, const PhiState& phi_sigma,
                  const RegressionData& data, const std::optional<Eigen::VectorXd>& init,
                  const FitOptions& options) {
  const std::optional<double> fixed_xi =
      kind == RegressionKind::kGev ? options.fixed_xi : std::optional<double>(0.0);
  const RegressionProblem problem(kind, phi_mu, phi_sigma, data, fixed_xi);
  const int d = problem.dim();
  if (problem.n_obs() < static_cast<std::size_t>(d) + 2)
    throw InvalidArgument("fit_mle needs n >= d + 2 (n=" + std::to_string(problem.n_obs()) +
                          ", d=" + std::to_string(d) + ")");

  FitResult out;
  out.kind = kind;
  out.k_mu = phi_mu.k();
  out.k_sigma = phi_sigma.k();
  out.xi_free = problem.xi_free();
  out.xi_fixed_value = problem.fixed_xi();
  out.n_obs = problem.n_obs();

  const ObjectiveFn objective = [&problem](const Eigen::VectorXd& p) {
    const double ll = problem.loglik(p);
    return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
  };
  const GradientFn gradient = [&problem](const Eigen::VectorXd& p, Eigen::VectorXd& g) {
    problem.gradient(p, g);
    g = -g;
  };
  const Box box = problem.box(options.xi_bound);

  std::vector<Eigen::VectorXd> starts;
  if (init && init->size() == d && init->allFinite()) starts.push_back(box.project(*init));
  starts.push_back(problem.default_start());
  Rng jitter(0x6a09e667f3bcc908ULL + static_cast<std::uint64_t>(d));
  for (int r = 0; r < options.max_restarts; ++r) {
    Eigen::VectorXd p = problem.default_start();
    p[0] += 0.25 * std::exp(p[problem.k_mu()]) * jitter.normal();
    p[problem.k_mu()] += 0.2 * jitter.normal();
    if (problem.xi_free()) p[d - 1] = 0.2 * (jitter.uniform() - 0.5);
    starts.push_back(p);
  }

  MinimizeResult best;
  bool have_best = false;
  for (const Eigen::VectorXd& start : starts) {
    MinimizeResult r = minimize_bfgs(objective, gradient, start, box, options.minimize);
    if (!have_best || (r.converged && !best.converged) ||
        (r.converged == best.converged && r.value < best.value)) {
      best = std::move(r);
      have_best = true;
    }
    if (best.converged) break;
  }

  out.params = best.x;
  out.loglik = -best.value;
  out.converged = best.converged && std::isfinite(out.loglik) && out.loglik > 0.5 * kLogDensityFloor;
  out.sic = schwarz_criterion(out.loglik, d, out.n_obs);

  const GradientFn ll_gradient = [&problem](const Eigen::VectorXd& p, Eigen::VectorXd& g) {
    problem.gradient(p, g);
  };
  const Eigen::MatrixXd neg_hessian = -hessian_from_gradient(ll_gradient, out.params);
  if (neg_hessian.allFinite()) {
    CovarianceResult cov = invert_negative_hessian(neg_hessian);
    out.neg_hessian_inv = std::move(cov.covariance);
    out.hessian_repaired = cov.repaired;
  } else {
    out.neg_hessian_inv = Eigen::MatrixXd::Zero(d, d);
    out.hessian_repaired = true;
    out.converged = false;
  }
  return out;
}

Eigen::VectorXd draw_params_normal_approx(const FitResult& fit, Rng& rng) {
  if (!fit.converged) throw InvalidState("normal approximation needs a converged fit");
  return draw_multivariate_normal(fit.params, fit.neg_hessian_inv, rng);
}

ModelDraw make_model_draw(const FitResult& fit, const Eigen::VectorXd& params,
                          const PhiState& phi_mu, const PhiState& phi_sigma) {
  if (params.size() != fit.dim() || phi_mu.k() != fit.k_mu || phi_sigma.k() != fit.k_sigma)
    throw InvalidArgument("parameter draw does not match the fitted bases");
  ModelDraw m;
  m.phi_mu = phi_mu;
  m.phi_sigma = phi_sigma;
  m.beta = params.head(fit.k_mu);
  m.theta = params.segment(fit.k_mu, fit.k_sigma);
  m.xi = fit.kind == RegressionKind::kGev && fit.xi_free ? params[fit.k_mu + fit.k_sigma]
                                                         : fit.xi();
  return m;
}

}  // namespace xload
