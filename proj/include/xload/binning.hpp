#pragma once

// The industry binning baseline: a stationary GEV per weather bin with a
// shape shared across bins, inverse-squared-distance fill-in for empty bins
// and resampling-based intervals for the extreme load.

#include <cstddef>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "xload/core_dist.hpp"
#include "xload/extreme_estimator.hpp"
#include "xload/record.hpp"
#include "xload/wind_model.hpp"

namespace xload {

struct BinGrid {
  std::vector<double> v_edges;
  std::vector<double> s_edges;
  std::set<int> excluded;

  int n_v() const { return static_cast<int>(v_edges.size()) - 1; }
  int n_s() const { return static_cast<int>(s_edges.size()) - 1; }
  int size() const { return n_v() * n_s(); }
  int index(int iv, int is) const { return iv * n_s() + is; }
  std::pair<int, int> coords(int index) const { return {index / n_s(), index % n_s()}; }
  double center_v(int iv) const;
  double center_s(int is) const;
  // Bin containing (v, s); points outside the grid go to the nearest edge bin.
  int route(double v, double s) const;
  void validate() const;

  // Equal-width bins spanning the observed range of v and s.
  static BinGrid equal_width(const RecordTable& data, int n_v, int n_s);
};

struct BinFit {
  enum class Source { kMle, kMoments, kInterpolated };
  std::size_t count = 0;
  double mu = 0.0;
  double sigma = 1.0;
  // Covariance of (mu, log sigma); unused for interpolated bins.
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  Source source = Source::kInterpolated;
};

const char* to_string(BinFit::Source s);

struct BinnedModel {
  BinGrid grid;
  double xi_shared = 0.0;
  std::vector<BinFit> bins;
  // Data standard deviations used to standardize bin-center distances.
  double scale_v = 1.0;
  double scale_s = 1.0;

  GevParams params(int bin) const { return {bins[static_cast<std::size_t>(bin)].mu,
                                            bins[static_cast<std::size_t>(bin)].sigma,
                                            xi_shared}; }
  GevParams params_at(double v, double s) const { return params(grid.route(v, s)); }
};

BinnedModel fit_binned(const RecordTable& data, const BinGrid& grid);

struct InterpWeight {
  int bin = 0;
  double weight = 0.0;
};

// Normalized weights proportional to 1/d^2 between bin centers in
// standardized coordinates.
std::vector<InterpWeight> interpolation_weights(int target, const std::vector<int>& sources,
                                                const BinGrid& grid, double scale_v,
                                                double scale_s);

// Weighted average of the (mu, sigma) of the source bins.
std::pair<double, double> interpolate_empty_bin(
    int target, const std::vector<std::pair<int, std::pair<double, double>>>& fitted,
    const BinGrid& grid, double scale_v, double scale_s);

// m_l repetitions, each resampling every nonempty bin's (mu, log sigma)
// from its normal approximation, filling empty bins, routing the wind pairs
// and taking the pooled upper-tail quantile.
std::vector<QuantileResult> binned_extreme_load(const BinnedModel& model,
                                                const std::vector<WindPair>& wind_pairs,
                                                const std::vector<ExtremeTarget>& targets,
                                                int m_l, int n_l, Rng& rng);

// Bins whose expected number of observations, n_obs times the share of wind
// pairs routed to them, is below the threshold.
std::set<int> low_likelihood_bins(const BinGrid& grid, const std::vector<WindPair>& wind_pairs,
                                  std::size_t n_obs, double threshold = 0.5);

}  // namespace xload
