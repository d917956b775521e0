#include "xload/binning.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "xload/error.hpp"
#include "xload/mle_laplace.hpp"
#include "xload/optimize.hpp"
#include "xload/stats.hpp"

namespace xload {

namespace {

constexpr double kEulerGamma = 0.5772156649015329;

int locate(const std::vector<double>& edges, double x) {
  const auto it = std::upper_bound(edges.begin() + 1, edges.end() - 1, x);
  return static_cast<int>(it - edges.begin()) - 1;
}

std::vector<double> equal_edges(double lo, double hi, int n) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  std::vector<double> e(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) e[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / n;
  e.back() = hi;
  return e;
}

// Moments estimate with the shape held fixed, plus the asymptotic Gumbel
// covariance of (mu, log sigma).
BinFit moment_fit(const std::vector<double>& y, double xi, double pooled_sigma) {
  BinFit b;
  b.count = y.size();
  b.source = BinFit::Source::kMoments;
  const double m = mean(y);
  const double sd = sample_sd(y);
  double sigma = pooled_sigma;
  double shift = kEulerGamma;  // (E[Y] - mu) / sigma
  if (std::fabs(xi) >= 1e-6) {
    const double g1 = std::tgamma(1.0 - xi);
    const double g2 = std::tgamma(1.0 - 2.0 * xi);
    if (std::isfinite(g1) && std::isfinite(g2) && g2 > g1 * g1) {
      shift = (g1 - 1.0) / xi;
      if (sd > 0.0) sigma = sd * std::fabs(xi) / std::sqrt(g2 - g1 * g1);
    } else if (sd > 0.0) {
      sigma = sd * std::sqrt(6.0) / M_PI;
    }
  } else if (sd > 0.0) {
    sigma = sd * std::sqrt(6.0) / M_PI;
  }
  b.sigma = sigma;
  b.mu = m - sigma * shift;
  const double n = static_cast<double>(y.size());
  b.cov << 1.109 * sigma * sigma / n, 0.257 * sigma / n, 0.257 * sigma / n, 0.608 / n;
  return b;
}

}  // namespace

const char* to_string(BinFit::Source s) {
  switch (s) {
    case BinFit::Source::kMle:
      return "mle";
    case BinFit::Source::kMoments:
      return "moments";
    case BinFit::Source::kInterpolated:
      return "interpolated";
  }
  return "?";
}

double BinGrid::center_v(int iv) const {
  return 0.5 * (v_edges[static_cast<std::size_t>(iv)] + v_edges[static_cast<std::size_t>(iv) + 1]);
}

double BinGrid::center_s(int is) const {
  return 0.5 * (s_edges[static_cast<std::size_t>(is)] + s_edges[static_cast<std::size_t>(is) + 1]);
}

int BinGrid::route(double v, double s) const { return index(locate(v_edges, v), locate(s_edges, s)); }

void BinGrid::validate() const {
  if (v_edges.size() < 2 || s_edges.size() < 2) throw InvalidState("grid needs at least one bin per axis");
  for (const auto* e : {&v_edges, &s_edges})
    for (std::size_t i = 1; i < e->size(); ++i)
      if (!((*e)[i] > (*e)[i - 1])) throw InvalidState("bin edges must be strictly increasing");
  for (int b : excluded)
    if (b < 0 || b >= size()) throw InvalidState("excluded bin index out of range");
}

BinGrid BinGrid::equal_width(const RecordTable& data, int n_v, int n_s) {
  if (data.empty()) throw InvalidArgument("cannot build a grid from empty data");
  if (n_v < 1 || n_s < 1) throw InvalidArgument("grid needs at least one bin per axis");
  double v_lo = data[0].v, v_hi = data[0].v, s_lo = data[0].s, s_hi = data[0].s;
  for (const TenMinRecord& r : data) {
    v_lo = std::min(v_lo, r.v);
    v_hi = std::max(v_hi, r.v);
    s_lo = std::min(s_lo, r.s);
    s_hi = std::max(s_hi, r.s);
  }
  BinGrid g;
  g.v_edges = equal_edges(v_lo, v_hi, n_v);
  g.s_edges = equal_edges(s_lo, s_hi, n_s);
  return g;
}

std::vector<InterpWeight> interpolation_weights(int target, const std::vector<int>& sources,
                                                const BinGrid& grid, double scale_v,
                                                double scale_s) {
  if (sources.empty()) throw InvalidArgument("interpolation needs at least one nonempty bin");
  const auto [tv, ts] = grid.coords(target);
  std::vector<InterpWeight> w;
  w.reserve(sources.size());
  double total = 0.0;
  for (int b : sources) {
    const auto [bv, bs] = grid.coords(b);
    const double dv = (grid.center_v(bv) - grid.center_v(tv)) / scale_v;
    const double ds = (grid.center_s(bs) - grid.center_s(ts)) / scale_s;
    const double d2 = dv * dv + ds * ds;
    if (d2 == 0.0) return {{b, 1.0}};
    w.push_back({b, 1.0 / d2});
    total += 1.0 / d2;
  }
  for (InterpWeight& x : w) x.weight /= total;
  return w;
}

std::pair<double, double> interpolate_empty_bin(
    int target, const std::vector<std::pair<int, std::pair<double, double>>>& fitted,
    const BinGrid& grid, double scale_v, double scale_s) {
  std::vector<int> sources;
  for (const auto& f : fitted) sources.push_back(f.first);
  const std::vector<InterpWeight> w = interpolation_weights(target, sources, grid, scale_v, scale_s);
  double mu = 0.0, sigma = 0.0;
  for (const InterpWeight& x : w) {
    const auto it = std::find_if(fitted.begin(), fitted.end(),
                                 [&](const auto& f) { return f.first == x.bin; });
    mu += x.weight * it->second.first;
    sigma += x.weight * it->second.second;
  }
  return {mu, sigma};
}

BinnedModel fit_binned(const RecordTable& data, const BinGrid& grid) {
  grid.validate();
  if (data.empty()) throw InvalidArgument("binning needs data");
  BinnedModel model;
  model.grid = grid;

  std::vector<double> v, s;
  for (const TenMinRecord& r : data) {
    v.push_back(r.v);
    s.push_back(r.s);
  }
  model.scale_v = sample_sd(v) > 0.0 ? sample_sd(v) : 1.0;
  model.scale_s = sample_sd(s) > 0.0 ? sample_sd(s) : 1.0;

  const PhiState intercept = PhiState::intercept_only({BasisType::kV});
  RecordTable kept;
  std::vector<std::vector<double>> per_bin(static_cast<std::size_t>(grid.size()));
  for (const TenMinRecord& r : data) {
    const int b = grid.route(r.v, r.s);
    if (grid.excluded.count(b)) continue;
    per_bin[static_cast<std::size_t>(b)].push_back(r.y);
    kept.push_back(r);
  }
  if (kept.empty()) throw InvalidArgument("every observation falls in an excluded bin");

  const FitResult pooled =
      fit_mle(RegressionKind::kGev, intercept, intercept, RegressionData::loads(kept, false));
  if (!pooled.converged) throw NumericError("pooled GEV fit for the shared shape failed");
  model.xi_shared = pooled.xi();
  double pooled_sigma = std::exp(pooled.params[1]);
  FitOptions fixed;
  fixed.fixed_xi = model.xi_shared;

  model.bins.resize(per_bin.size());
  std::vector<int> nonempty, sparse;
  std::vector<double> mle_sigmas;
  for (std::size_t b = 0; b < per_bin.size(); ++b) {
    const std::vector<double>& y = per_bin[b];
    BinFit& out = model.bins[b];
    out.count = y.size();
    if (y.empty()) continue;
    nonempty.push_back(static_cast<int>(b));
    if (y.size() >= 4) {
      RegressionData d;
      d.v.assign(y.size(), 0.0);
      d.y = y;
      const FitResult f = fit_mle(RegressionKind::kGev, intercept, intercept, d, std::nullopt, fixed);
      if (f.converged && !f.hessian_repaired) {
        out.mu = f.params[0];
        out.sigma = std::exp(f.params[1]);
        out.cov = f.neg_hessian_inv;
        out.source = BinFit::Source::kMle;
        mle_sigmas.push_back(out.sigma);
        continue;
      }
    }
    sparse.push_back(static_cast<int>(b));
  }
  // Bins too small for a scale estimate borrow the typical fitted scale.
  if (!mle_sigmas.empty()) pooled_sigma = quantile(mle_sigmas, 0.5);
  for (int b : sparse)
    model.bins[static_cast<std::size_t>(b)] =
        moment_fit(per_bin[static_cast<std::size_t>(b)], model.xi_shared, pooled_sigma);
  if (nonempty.empty()) throw NumericError("every bin is empty");

  std::vector<std::pair<int, std::pair<double, double>>> fitted;
  for (int b : nonempty)
    fitted.push_back({b, {model.bins[static_cast<std::size_t>(b)].mu, model.bins[static_cast<std::size_t>(b)].sigma}});
  for (std::size_t b = 0; b < model.bins.size(); ++b) {
    if (model.bins[b].count > 0) continue;
    const auto [mu, sigma] =
        interpolate_empty_bin(static_cast<int>(b), fitted, grid, model.scale_v, model.scale_s);
    model.bins[b].mu = mu;
    model.bins[b].sigma = sigma;
    model.bins[b].source = BinFit::Source::kInterpolated;
  }
  return model;
}

std::vector<QuantileResult> binned_extreme_load(const BinnedModel& model,
                                                const std::vector<WindPair>& wind_pairs,
                                                const std::vector<ExtremeTarget>& targets,
                                                int m_l, int n_l, Rng& rng) {
  if (m_l < 1) throw InvalidArgument("m_l must be positive");
  if (wind_pairs.empty()) throw InvalidArgument("wind-pair table is empty");
  const BinGrid& grid = model.grid;
  std::vector<int> route(wind_pairs.size());
  for (std::size_t i = 0; i < wind_pairs.size(); ++i)
    route[i] = grid.route(wind_pairs[i].v, wind_pairs[i].s);

  std::vector<int> nonempty, empty;
  for (int b = 0; b < grid.size(); ++b)
    (model.bins[static_cast<std::size_t>(b)].count > 0 ? nonempty : empty).push_back(b);
  std::vector<std::vector<InterpWeight>> fill(static_cast<std::size_t>(grid.size()));
  for (int b : empty)
    fill[static_cast<std::size_t>(b)] =
        interpolation_weights(b, nonempty, grid, model.scale_v, model.scale_s);

  std::vector<double> ps;
  for (const ExtremeTarget& t : targets) ps.push_back(t.p_t);
  std::vector<std::vector<double>> per_target(targets.size());
  std::vector<std::size_t> clamped(targets.size(), 0);
  std::vector<GevParams> bin_params(static_cast<std::size_t>(grid.size()));
  std::vector<GevParams> table(wind_pairs.size());
  for (int rep = 0; rep < m_l; ++rep) {
    for (int b : nonempty) {
      const BinFit& f = model.bins[static_cast<std::size_t>(b)];
      const Eigen::Vector2d mean(f.mu, std::log(f.sigma));
      const Eigen::VectorXd d = draw_multivariate_normal(mean, f.cov, rng);
      bin_params[static_cast<std::size_t>(b)] = {d[0], std::exp(d[1]), model.xi_shared};
    }
    for (int b : empty) {
      double mu = 0.0, sigma = 0.0;
      for (const InterpWeight& w : fill[static_cast<std::size_t>(b)]) {
        mu += w.weight * bin_params[static_cast<std::size_t>(w.bin)].mu;
        sigma += w.weight * bin_params[static_cast<std::size_t>(w.bin)].sigma;
      }
      bin_params[static_cast<std::size_t>(b)] = {mu, sigma, model.xi_shared};
    }
    for (std::size_t i = 0; i < table.size(); ++i)
      table[i] = bin_params[static_cast<std::size_t>(route[i])];
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

std::set<int> low_likelihood_bins(const BinGrid& grid, const std::vector<WindPair>& wind_pairs,
                                  std::size_t n_obs, double threshold) {
  if (wind_pairs.empty()) throw InvalidArgument("wind-pair table is empty");
  std::vector<double> share(static_cast<std::size_t>(grid.size()), 0.0);
  for (const WindPair& p : wind_pairs) share[static_cast<std::size_t>(grid.route(p.v, p.s))] += 1.0;
  std::set<int> out;
  for (int b = 0; b < grid.size(); ++b) {
    const double expected = static_cast<double>(n_obs) * share[static_cast<std::size_t>(b)] /
                            static_cast<double>(wind_pairs.size());
    if (expected < threshold) out.insert(b);
  }
  return out;
}

}  // namespace xload
