#include "xload/extreme_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "xload/error.hpp"

namespace xload {

namespace {

// gev_quantile without argument checks, for the inner sampling loop.
inline double gev_quantile_unchecked(double u, const GevParams& p) {
  const double log_w = std::log(-std::log1p(-u));
  if (std::fabs(p.xi) < kXiEps) return p.mu - p.sigma * log_w;
  return p.mu + p.sigma * std::expm1(-p.xi * log_w) / p.xi;
}

// Upper bound on the uniforms u whose draw gev_quantile(u) can exceed y.
double exceedance_cut(double y, const GevParams& p) {
  if (!std::isfinite(y)) return std::numeric_limits<double>::infinity();
  const double z = (y - p.mu) / p.sigma;
  double t;
  if (std::fabs(p.xi) < kXiEps) {
    t = std::exp(-z);
  } else {
    const double arg = 1.0 + p.xi * z;
    if (!(arg > 0.0)) return p.xi > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    t = std::exp(-std::log1p(p.xi * z) / p.xi);
  }
  const double tail = -std::expm1(-t);
  return tail * (1.0 + 1e-9) + 1e-300;
}

struct PairColumns {
  std::vector<double> v, s;
  explicit PairColumns(const std::vector<WindPair>& pairs) {
    v.reserve(pairs.size());
    s.reserve(pairs.size());
    for (const WindPair& p : pairs) {
      v.push_back(p.v);
      s.push_back(p.s);
    }
  }
  CovariateTable table() const { return {v, s}; }
};

std::vector<GevParams> short_term_from_columns(const ModelDraw& draw, const PairColumns& cols) {
  if (draw.beta.size() != draw.phi_mu.k() || draw.theta.size() != draw.phi_sigma.k())
    throw InvalidArgument("parameter draw does not match its bases");
  const Eigen::VectorXd mu = design_matrix(draw.phi_mu, cols.table()) * draw.beta;
  const Eigen::VectorXd log_sigma = design_matrix(draw.phi_sigma, cols.table()) * draw.theta;
  std::vector<GevParams> out(cols.v.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out[i] = {mu[k], std::exp(log_sigma[k]), draw.xi};
  }
  return out;
}

}  // namespace

ExtremeTarget ExtremeTarget::from_years(double t_years) {
  return {t_years, target_exceedance(t_years)};
}

ExtremeTarget ExtremeTarget::from_probability(double p_t) {
  if (!(p_t > 0.0 && p_t < 1.0)) throw InvalidArgument("target probability outside (0,1)");
  return {years_for_exceedance(p_t), p_t};
}

QuantileResult make_quantile_result(std::vector<double> draws, const ExtremeTarget& target,
                                    std::size_t clamped_draws) {
  QuantileResult r;
  r.t_years = target.t_years;
  r.p_t = target.p_t;
  r.clamped_draws = clamped_draws;
  for (double d : draws)
    if (!std::isfinite(d)) throw NumericError("non-finite extreme-load draw");
  if (!draws.empty()) {
    const DrawSummary s = summarize(draws);
    r.mean = s.mean;
    r.median = s.median;
    r.ci_lower = s.lower;
    r.ci_upper = s.upper;
  }
  r.draws = std::move(draws);
  return r;
}

std::vector<GevParams> short_term_params(const ModelDraw& draw,
                                         const std::vector<WindPair>& pairs) {
  return short_term_from_columns(draw, PairColumns(pairs));
}

std::vector<TailQuantile> long_term_quantiles(const std::vector<GevParams>& table, int n_l,
                                              const std::vector<double>& p_exceed, Rng& rng) {
  if (table.empty()) throw InvalidArgument("long-term quantile needs a nonempty table");
  if (n_l < 1) throw InvalidArgument("n_l must be positive");
  if (p_exceed.empty()) return {};
  for (double p : p_exceed)
    if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("exceedance probability outside (0,1)");
  const std::size_t pool_size = table.size() * static_cast<std::size_t>(n_l);
  const double p_max = *std::max_element(p_exceed.begin(), p_exceed.end());
  TailPool pool(TailPool::capacity_for(pool_size, p_max));

  for (const GevParams& g : table) {
    if (!(g.sigma > 0.0) || !std::isfinite(g.mu) || !std::isfinite(g.sigma))
      throw NumericError("invalid short-term GEV parameters");
    double cut = exceedance_cut(pool.threshold(), g);
    for (int k = 0; k < n_l; ++k) {
      const double u = rng.uniform();
      if (u > cut) continue;
      const double before = pool.threshold();
      pool.push(gev_quantile_unchecked(u, g));
      if (pool.threshold() != before) cut = exceedance_cut(pool.threshold(), g);
    }
  }
  // Skipped draws lie below the tail; count them so ranks refer to the
  // whole pool.
  pool.add_below_threshold(pool_size - pool.count());

  std::vector<TailQuantile> out;
  out.reserve(p_exceed.size());
  for (double p : p_exceed) out.push_back(pool.upper_tail_quantile(p));
  return out;
}

TailQuantile long_term_quantile(const std::vector<GevParams>& table, int n_l, double p_t,
                                Rng& rng) {
  return long_term_quantiles(table, n_l, {p_t}, rng).front();
}

std::vector<QuantileResult> extreme_load_from_draws(const std::vector<ModelDraw>& draws,
                                                    const std::vector<WindPair>& wind_pairs,
                                                    int n_l,
                                                    const std::vector<ExtremeTarget>& targets,
                                                    Rng& rng) {
  if (wind_pairs.empty()) throw InvalidArgument("wind-pair table is empty");
  std::vector<double> ps;
  for (const ExtremeTarget& t : targets) ps.push_back(t.p_t);
  std::vector<std::vector<double>> per_target(targets.size());
  std::vector<std::size_t> clamped(targets.size(), 0);
  const PairColumns cols(wind_pairs);
  for (const ModelDraw& d : draws) {
    const std::vector<GevParams> table = short_term_from_columns(d, cols);
    const std::vector<TailQuantile> q = long_term_quantiles(table, n_l, ps, rng);
    for (std::size_t t = 0; t < targets.size(); ++t) {
      per_target[t].push_back(q[t].value);
      clamped[t] += q[t].clamped ? 1 : 0;
    }
  }
  std::vector<QuantileResult> out;
  for (std::size_t t = 0; t < targets.size(); ++t)
    out.push_back(make_quantile_result(std::move(per_target[t]), targets[t], clamped[t]));
  return out;
}

SplineEstimate estimate_extreme_load(const RecordTable& data,
                                     const std::vector<WindPair>& wind_pairs,
                                     const EstimateOptions& options,
                                     const std::vector<ExtremeTarget>& targets) {
  if (data.empty()) throw InvalidArgument("load data is empty");
  const RegressionData reg = RegressionData::loads(data, options.use_s);
  std::vector<BasisType> types_mu = options.types_mu, types_sigma = options.types_sigma;
  if (!options.use_s) {
    types_mu = {BasisType::kV};
    types_sigma = {BasisType::kV};
  }
  ChainResult chain =
      run_regression_chain(RegressionKind::kGev, reg, types_mu, types_sigma, options.chain);
  SplineEstimate out;
  Rng rng(options.chain.seed ^ 0x243f6a8885a308d3ULL);
  out.results = extreme_load_from_draws(chain.draws, wind_pairs, options.n_l, targets, rng);
  out.draws = std::move(chain.draws);
  out.trace = std::move(chain.trace);
  out.stats = chain.stats;
  return out;
}

CredibleInterval pointwise_credible_band(const RecordTable& data,
                                         const std::vector<ModelDraw>& draws, SlabAxis axis,
                                         double center, double halfwidth, Rng& rng,
                                         int draws_per_pair) {
  if (draws.empty()) throw InvalidArgument("credible band needs posterior draws");
  if (draws_per_pair < 1) throw InvalidArgument("draws_per_pair must be positive");
  std::vector<WindPair> slab;
  for (const TenMinRecord& r : data) {
    const double x = axis == SlabAxis::kV ? r.v : r.s;
    if (center - halfwidth < x && x < center + halfwidth) slab.push_back({r.v, r.s});
  }
  if (slab.empty()) throw EmptySlab("no observations inside the conditioning slab");
  const PairColumns cols(slab);
  std::vector<double> pooled;
  pooled.reserve(draws.size() * slab.size() * static_cast<std::size_t>(draws_per_pair));
  for (const ModelDraw& d : draws) {
    for (const GevParams& g : short_term_from_columns(d, cols))
      for (int k = 0; k < draws_per_pair; ++k) pooled.push_back(gev_sample(g, rng));
  }
  std::sort(pooled.begin(), pooled.end());
  return {quantile_sorted(pooled, 0.025), quantile_sorted(pooled, 0.975), slab.size()};
}

}  // namespace xload
