#pragma once

// Wind covariate model: the mean-speed family chosen by SIC among six
// candidates and a truncated normal turbulence model whose location and
// log-scale are hinge splines in v.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "xload/core_dist.hpp"
#include "xload/mle_laplace.hpp"
#include "xload/rjs_sampler.hpp"

namespace xload {

struct WindFamilyFit {
  WindFamily kind = WindFamily::W2;
  bool ok = false;
  std::string diagnostic;
  WindDistParams nu;
  // Working coordinates: (log nu0, log nu1, shift), truncated to the
  // family's parameter count.
  Eigen::VectorXd working;
  Eigen::MatrixXd working_cov;
  double loglik = 0.0;
  double sic = 0.0;
};

struct WindFit {
  WindFamily chosen = WindFamily::W2;
  WindDistParams nu_hat;
  // Covariance of the normal approximation in working coordinates.
  Eigen::VectorXd working_hat;
  Eigen::MatrixXd nu_cov;
  // One row per family, in the fixed family order; failed fits have ok = false.
  std::vector<WindFamilyFit> table;

  double sic(WindFamily f) const;
};

// Maximum likelihood fit of one family.
WindFamilyFit fit_wind_family(WindFamily kind, const std::vector<double>& v);

// Fits all six families and keeps the one with the largest SIC.
WindFit select_wind_family(const std::vector<double>& v);

// Maps working coordinates back to family parameters.
WindDistParams wind_params_from_working(WindFamily kind, const Eigen::VectorXd& w);

// One normal-approximation draw of the family parameters, redrawn until
// valid (at most 100 attempts).
WindDistParams draw_wind_params(const WindFit& fit, Rng& rng);

struct TurbulenceFit {
  std::vector<ModelDraw> draws;
  ChainStats stats;
  std::vector<TraceRow> trace;
};

// Location and log-scale use hinge terms in v only.
TurbulenceFit fit_turbulence(const std::vector<double>& v, const std::vector<double>& s,
                             const ChainConfig& config);

struct WindPair {
  double v = 0.0;
  double s = 0.0;
};

// m_w outer repetitions of n_w pairs. With turb == nullptr every s is 0,
// which serves single-covariate models.
std::vector<WindPair> sample_wind_joint(const WindFit& wind, const TurbulenceFit* turb,
                                        int m_w, int n_w, Rng& rng);

}  // namespace xload
