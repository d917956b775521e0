#pragma once

// Long-term load distribution and the posterior predictive of the T-year
// extreme load level.

#include <cstddef>
#include <vector>

#include "xload/core_dist.hpp"
#include "xload/mle_laplace.hpp"
#include "xload/record.hpp"
#include "xload/rjs_sampler.hpp"
#include "xload/stats.hpp"
#include "xload/wind_model.hpp"

namespace xload {

struct ExtremeTarget {
  double t_years = 50.0;
  double p_t = 0.0;

  static ExtremeTarget from_years(double t_years);
  static ExtremeTarget from_probability(double p_t);
};

struct QuantileResult {
  std::vector<double> draws;
  double mean = 0.0;
  double median = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  double t_years = 0.0;
  double p_t = 0.0;
  // Draws whose pool was too small for p_t and fell back to the pool maximum.
  std::size_t clamped_draws = 0;
};

QuantileResult make_quantile_result(std::vector<double> draws, const ExtremeTarget& target,
                                    std::size_t clamped_draws);

// mu, sigma and xi of the short-term GEV for every wind pair.
std::vector<GevParams> short_term_params(const ModelDraw& draw,
                                         const std::vector<WindPair>& pairs);

// Pools n_l GEV draws per table entry and returns the upper-tail quantile of
// the pool for each exceedance probability.
std::vector<TailQuantile> long_term_quantiles(const std::vector<GevParams>& table, int n_l,
                                              const std::vector<double>& p_exceed, Rng& rng);

TailQuantile long_term_quantile(const std::vector<GevParams>& table, int n_l, double p_t,
                                Rng& rng);

struct EstimateOptions {
  ChainConfig chain{};
  int n_l = 100;
  std::vector<BasisType> types_mu{BasisType::kV, BasisType::kS, BasisType::kVS};
  std::vector<BasisType> types_sigma{BasisType::kV, BasisType::kS};
  // Drop s from the load model (single-covariate data).
  bool use_s = true;
};

struct SplineEstimate {
  std::vector<QuantileResult> results;  // one per target, in input order
  std::vector<ModelDraw> draws;
  std::vector<TraceRow> trace;
  ChainStats stats;
};

// Runs the chain on the load data, then turns every posterior draw into one
// extreme-load draw per target using the shared wind-pair table.
SplineEstimate estimate_extreme_load(const RecordTable& data,
                                     const std::vector<WindPair>& wind_pairs,
                                     const EstimateOptions& options,
                                     const std::vector<ExtremeTarget>& targets);

// Extreme-load draws for posterior draws that are already available.
std::vector<QuantileResult> extreme_load_from_draws(const std::vector<ModelDraw>& draws,
                                                    const std::vector<WindPair>& wind_pairs,
                                                    int n_l,
                                                    const std::vector<ExtremeTarget>& targets,
                                                    Rng& rng);

enum class SlabAxis { kV, kS };

struct CredibleInterval {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t slab_size = 0;
};

// 95% predictive interval of the load for observed covariates with
// |x - center| < halfwidth along the chosen axis, pooled over posterior draws.
CredibleInterval pointwise_credible_band(const RecordTable& data,
                                         const std::vector<ModelDraw>& draws, SlabAxis axis,
                                         double center, double halfwidth, Rng& rng,
                                         int draws_per_pair = 1);

}  // namespace xload
