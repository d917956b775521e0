#pragma once

// Conditional maximum likelihood for location-scale regressions whose
// location is f(x) = B_mu(x) beta and whose scale is exp(B_sigma(x) theta),
// plus the observed information, SIC and normal-approximation draws.
//
// Two response families share this code: the GEV load model (with a shape
// parameter xi) and the truncated normal turbulence model.

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "xload/mars_basis.hpp"
#include "xload/optimize.hpp"
#include "xload/random.hpp"
#include "xload/record.hpp"

namespace xload {

enum class RegressionKind { kGev, kTruncNormal };

// Response y with covariates (v, s). s may be empty for models that only
// use v; basis terms of type 2 or 3 then evaluate s as 0.
struct RegressionData {
  std::vector<double> v;
  std::vector<double> s;
  std::vector<double> y;

  std::size_t size() const { return y.size(); }
  CovariateTable covariates() const { return {v, s}; }

  // Load y on (v, s). With use_s = false the s column is dropped.
  static RegressionData loads(const RecordTable& records, bool use_s = true);
  // Turbulence s on v.
  static RegressionData turbulence(const RecordTable& records);
};

struct FitOptions {
  // Extra attempts from jittered starting points after a failed fit.
  int max_restarts = 3;
  // GEV only: hold xi at this value instead of estimating it.
  std::optional<double> fixed_xi;
  double xi_bound = 0.5;
  MinimizeOptions minimize{};
};

struct FitResult {
  RegressionKind kind = RegressionKind::kGev;
  // (beta, theta) followed by xi when xi is estimated.
  Eigen::VectorXd params;
  int k_mu = 1;
  int k_sigma = 1;
  bool xi_free = true;
  double xi_fixed_value = 0.0;
  Eigen::MatrixXd neg_hessian_inv;
  double loglik = 0.0;
  double sic = 0.0;
  std::size_t n_obs = 0;
  bool converged = false;
  bool hessian_repaired = false;

  int dim() const { return static_cast<int>(params.size()); }
  Eigen::VectorXd beta() const { return params.head(k_mu); }
  Eigen::VectorXd theta() const { return params.segment(k_mu, k_sigma); }
  double xi() const;
};

// One parameter vector of a location-scale model together with its bases.
struct ModelDraw {
  PhiState phi_mu;
  PhiState phi_sigma;
  Eigen::VectorXd beta;
  Eigen::VectorXd theta;
  double xi = 0.0;

  double location(double v, double s) const;
  double scale(double v, double s) const;
};

// Log-likelihood and its analytic gradient for fixed bases.
class RegressionProblem {
 public:
  RegressionProblem(RegressionKind kind, const PhiState& phi_mu,
                    const PhiState& phi_sigma, const RegressionData& data,
                    std::optional<double> fixed_xi = std::nullopt);

  int dim() const { return k_mu_ + k_sigma_ + (xi_free_ ? 1 : 0); }
  std::size_t n_obs() const { return static_cast<std::size_t>(y_.size()); }
  double loglik(const Eigen::VectorXd& params) const;
  void gradient(const Eigen::VectorXd& params, Eigen::VectorXd& out) const;
  Eigen::VectorXd default_start() const;
  Box box(double xi_bound) const;

  RegressionKind kind() const { return kind_; }
  int k_mu() const { return k_mu_; }
  int k_sigma() const { return k_sigma_; }
  bool xi_free() const { return xi_free_; }
  double fixed_xi() const { return fixed_xi_; }

 private:
  double evaluate(const Eigen::VectorXd& params, Eigen::VectorXd* grad) const;

  RegressionKind kind_;
  int k_mu_;
  int k_sigma_;
  bool xi_free_;
  double fixed_xi_;
  Eigen::MatrixXd x_mu_;
  Eigen::MatrixXd x_sigma_;
  Eigen::VectorXd y_;
};

double gev_regression_loglik(const Eigen::VectorXd& beta, const Eigen::VectorXd& theta,
                             double xi, const PhiState& phi_mu, const PhiState& phi_sigma,
                             const RegressionData& data);

// Requires n >= d + 2. A non-converged fit is returned with converged = false.
FitResult fit_mle(RegressionKind kind, const PhiState& phi_mu, const PhiState& phi_sigma,
                  const RegressionData& data,
                  const std::optional<Eigen::VectorXd>& init = std::nullopt,
                  const FitOptions& options = {});

// sic = loglik - d/2 log n
double schwarz_criterion(double loglik, int d, std::size_t n);

// One draw from N(params, neg_hessian_inv).
Eigen::VectorXd draw_params_normal_approx(const FitResult& fit, Rng& rng);

// Splits a parameter vector into a ModelDraw for the given bases.
ModelDraw make_model_draw(const FitResult& fit, const Eigen::VectorXd& params,
                          const PhiState& phi_mu, const PhiState& phi_sigma);

}  // namespace xload
