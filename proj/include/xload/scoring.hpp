#pragma once

// Quantile scoring with the generalized piecewise linear loss and a repeated
// train/test comparison of the spline and binning methods.

#include <cstddef>
#include <string>
#include <vector>

#include "xload/binning.hpp"
#include "xload/extreme_estimator.hpp"
#include "xload/random.hpp"
#include "xload/record.hpp"

namespace xload {

double gpl_score(double l_hat, double y, double tau, double b);
double mean_score(const std::vector<double>& estimates, const std::vector<double>& observations,
                  double tau, double b);
// Percentage by which the spline score improves on the binning score.
double reduction_pct(double spline, double binning);

struct ScoreReport {
  double tau = 0.9;
  double b = 1.0;
  double spline = 0.0;
  double binning = 0.0;
  double reduction_pct = 0.0;
  std::size_t n_repeats = 0;
};

struct CompareOptions {
  std::vector<double> taus{0.9, 0.99};
  std::vector<double> bs{0.0, 1.0, 2.0};
  int n_repeats = 10;
  double split_frac = 0.8;
  // Posterior draws pooled per test point, each contributing n_l loads.
  int posterior_draws = 50;
  int n_l = 100;
  EstimateOptions spline{};
  int n_v_bins = 10;
  int n_s_bins = 6;
  // Test points in bins whose expected training count is below this are
  // left out of the comparison.
  double exclusion_threshold = 0.5;
};

struct Comparison {
  // One row per (tau, b), taus outer.
  std::vector<ScoreReport> rows;
  std::vector<std::string> failures;
};

Comparison compare_methods(const RecordTable& data, const CompareOptions& options, Rng& rng);

// Evenly spaced subset of at most n posterior draws.
std::vector<ModelDraw> thin_draws(const std::vector<ModelDraw>& draws, int n);

// Empirical tau-quantiles of the posterior predictive at each covariate
// pair, pooled over the draws with n_l loads per draw.
std::vector<std::vector<double>> spline_predictive_quantiles(const std::vector<ModelDraw>& draws,
                                                             const std::vector<WindPair>& points,
                                                             const std::vector<double>& taus,
                                                             int n_l, Rng& rng);

struct BinDifference {
  int bin = 0;
  std::size_t count = 0;
  double spline = 0.0;
  double binning = 0.0;
  // (binning - spline) / sd of the loads in the bin
  double standardized = 0.0;
};

// Per nonempty bin: the tau-quantile of each method at the bin's median
// covariates and their standardized difference.
std::vector<BinDifference> standardized_differences(const RecordTable& data,
                                                    const BinnedModel& binned,
                                                    const std::vector<ModelDraw>& draws,
                                                    double tau, int n_l, Rng& rng);

}  // namespace xload
