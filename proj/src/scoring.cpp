#include "xload/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "xload/error.hpp"
#include "xload/stats.hpp"

namespace xload {

double gpl_score(double l_hat, double y, double tau, double b) {
  if (!(tau > 0.0 && tau < 1.0)) throw InvalidArgument("tau outside (0,1)");
  if (b <= 0.0 && !(l_hat > 0.0 && y > 0.0))
    throw InvalidArgument("score with b <= 0 needs positive estimate and observation");
  const double ind = (l_hat >= y ? 1.0 : 0.0) - tau;
  if (b == 0.0) return ind * std::log(l_hat / y);
  return ind * (std::pow(l_hat, b) - std::pow(y, b)) / std::fabs(b);
}

double mean_score(const std::vector<double>& estimates, const std::vector<double>& observations,
                  double tau, double b) {
  if (estimates.size() != observations.size()) throw InvalidArgument("score vectors differ in length");
  if (estimates.empty()) throw InvalidArgument("score needs at least one point");
  double total = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) total += gpl_score(estimates[i], observations[i], tau, b);
  return total / static_cast<double>(estimates.size());
}

double reduction_pct(double spline, double binning) {
  if (binning == 0.0) return 0.0;
  return 100.0 * (binning - spline) / binning;
}

std::vector<ModelDraw> thin_draws(const std::vector<ModelDraw>& draws, int n) {
  if (n < 1) throw InvalidArgument("need at least one posterior draw");
  if (draws.size() <= static_cast<std::size_t>(n)) return draws;
  std::vector<ModelDraw> out;
  const double step = static_cast<double>(draws.size()) / n;
  for (int i = 0; i < n; ++i) out.push_back(draws[static_cast<std::size_t>(i * step)]);
  return out;
}

std::vector<std::vector<double>> spline_predictive_quantiles(const std::vector<ModelDraw>& draws,
                                                             const std::vector<WindPair>& points,
                                                             const std::vector<double>& taus,
                                                             int n_l, Rng& rng) {
  if (draws.empty()) throw InvalidArgument("predictive quantiles need posterior draws");
  if (n_l < 1) throw InvalidArgument("n_l must be positive");
  std::vector<std::vector<double>> pools(points.size());
  for (auto& p : pools) p.reserve(draws.size() * static_cast<std::size_t>(n_l));
  for (const ModelDraw& d : draws) {
    const std::vector<GevParams> params = short_term_params(d, points);
    for (std::size_t i = 0; i < points.size(); ++i)
      for (int k = 0; k < n_l; ++k) pools[i].push_back(gev_sample(params[i], rng));
  }
  std::vector<std::vector<double>> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::sort(pools[i].begin(), pools[i].end());
    for (double tau : taus) out[i].push_back(quantile_sorted(pools[i], tau));
  }
  return out;
}

Comparison compare_methods(const RecordTable& data, const CompareOptions& options, Rng& rng) {
  if (options.n_repeats < 1) throw InvalidArgument("n_repeats must be positive");
  if (!(options.split_frac > 0.0 && options.split_frac < 1.0))
    throw InvalidArgument("split fraction outside (0,1)");
  if (options.taus.empty() || options.bs.empty()) throw InvalidArgument("no score settings");
  for (double tau : options.taus)
    if (!(tau > 0.0 && tau < 1.0)) throw InvalidArgument("tau outside (0,1)");
  const auto n_train = static_cast<std::size_t>(std::floor(options.split_frac * data.size()));
  if (n_train < 10 || data.size() - n_train < 1)
    throw InvalidArgument("data too small for a train/test split");

  const std::size_t n_cells = options.taus.size() * options.bs.size();
  std::vector<double> sum_spline(n_cells, 0.0), sum_binning(n_cells, 0.0);
  std::vector<std::size_t> used(n_cells, 0);
  Comparison out;

  for (int rep = 0; rep < options.n_repeats; ++rep) {
    Rng stream = rng.split();
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[stream.index(i)]);
    RecordTable train, test;
    for (std::size_t i = 0; i < order.size(); ++i) (i < n_train ? train : test).push_back(data[order[i]]);

    try {
      EstimateOptions spline = options.spline;
      spline.chain.seed = stream.engine()();
      const RegressionData reg = RegressionData::loads(train, spline.use_s);
      std::vector<BasisType> types_mu = spline.types_mu, types_sigma = spline.types_sigma;
      if (!spline.use_s) types_mu = types_sigma = {BasisType::kV};
      const ChainResult chain =
          run_regression_chain(RegressionKind::kGev, reg, types_mu, types_sigma, spline.chain);

      BinGrid grid = BinGrid::equal_width(train, options.n_v_bins, spline.use_s ? options.n_s_bins : 1);
      std::vector<WindPair> train_cov;
      for (const TenMinRecord& r : train) train_cov.push_back({r.v, r.s});
      const std::set<int> excluded =
          low_likelihood_bins(grid, train_cov, train.size(), options.exclusion_threshold);
      const BinnedModel binned = fit_binned(train, grid);

      std::vector<WindPair> points;
      std::vector<double> y;
      for (const TenMinRecord& r : test) {
        if (excluded.count(grid.route(r.v, r.s))) continue;
        points.push_back({r.v, spline.use_s ? r.s : 0.0});
        y.push_back(r.y);
      }
      if (points.empty()) throw InvalidArgument("every test point falls in an excluded bin");

      const std::vector<std::vector<double>> sq = spline_predictive_quantiles(
          thin_draws(chain.draws, options.posterior_draws), points, options.taus, options.n_l, stream);

      for (std::size_t t = 0; t < options.taus.size(); ++t) {
        std::vector<double> ls(points.size()), lb(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) {
          ls[i] = sq[i][t];
          lb[i] = gev_quantile(1.0 - options.taus[t], binned.params_at(points[i].v, points[i].s));
        }
        for (std::size_t k = 0; k < options.bs.size(); ++k) {
          const std::size_t cell = t * options.bs.size() + k;
          try {
            const double s = mean_score(ls, y, options.taus[t], options.bs[k]);
            const double bn = mean_score(lb, y, options.taus[t], options.bs[k]);
            sum_spline[cell] += s;
            sum_binning[cell] += bn;
            ++used[cell];
          } catch (const InvalidArgument& e) {
            out.failures.push_back("repeat " + std::to_string(rep) + " tau " +
                                   std::to_string(options.taus[t]) + " b " +
                                   std::to_string(options.bs[k]) + ": " + e.what());
          }
        }
      }
    } catch (const Error& e) {
      out.failures.push_back("repeat " + std::to_string(rep) + ": " + e.what());
    }
  }

  for (std::size_t t = 0; t < options.taus.size(); ++t) {
    for (std::size_t k = 0; k < options.bs.size(); ++k) {
      const std::size_t cell = t * options.bs.size() + k;
      ScoreReport r;
      r.tau = options.taus[t];
      r.b = options.bs[k];
      r.n_repeats = used[cell];
      if (used[cell] > 0) {
        r.spline = sum_spline[cell] / static_cast<double>(used[cell]);
        r.binning = sum_binning[cell] / static_cast<double>(used[cell]);
        r.reduction_pct = reduction_pct(r.spline, r.binning);
      }
      out.rows.push_back(r);
    }
  }
  return out;
}

std::vector<BinDifference> standardized_differences(const RecordTable& data,
                                                    const BinnedModel& binned,
                                                    const std::vector<ModelDraw>& draws,
                                                    double tau, int n_l, Rng& rng) {
  const BinGrid& grid = binned.grid;
  std::vector<std::vector<const TenMinRecord*>> members(static_cast<std::size_t>(grid.size()));
  for (const TenMinRecord& r : data) members[static_cast<std::size_t>(grid.route(r.v, r.s))].push_back(&r);
  std::vector<int> bins;
  std::vector<WindPair> centers;
  std::vector<double> spread;
  for (int b = 0; b < grid.size(); ++b) {
    const auto& m = members[static_cast<std::size_t>(b)];
    if (m.size() < 2) continue;
    std::vector<double> v, s, y;
    for (const TenMinRecord* r : m) {
      v.push_back(r->v);
      s.push_back(r->s);
      y.push_back(r->y);
    }
    const double sd = sample_sd(y);
    if (!(sd > 0.0)) continue;
    bins.push_back(b);
    centers.push_back({quantile(v, 0.5), quantile(s, 0.5)});
    spread.push_back(sd);
  }
  if (bins.empty()) return {};
  const auto sq = spline_predictive_quantiles(draws, centers, {tau}, n_l, rng);
  std::vector<BinDifference> out;
  for (std::size_t i = 0; i < bins.size(); ++i) {
    BinDifference d;
    d.bin = bins[i];
    d.count = members[static_cast<std::size_t>(bins[i])].size();
    d.spline = sq[i][0];
    d.binning = gev_quantile(1.0 - tau, binned.params_at(centers[i].v, centers[i].s));
    d.standardized = (d.binning - d.spline) / spread[i];
    out.push_back(d);
  }
  return out;
}

}  // namespace xload
