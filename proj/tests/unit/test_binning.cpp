#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "xload/binning.hpp"
#include "xload/error.hpp"
#include "xload/mle_laplace.hpp"

using namespace xload;
using Catch::Approx;

namespace {

BinGrid grid_of(int n_v, int n_s) {
  BinGrid g;
  for (int i = 0; i <= n_v; ++i) g.v_edges.push_back(2.0 * i);
  for (int i = 0; i <= n_s; ++i) g.s_edges.push_back(0.5 * i);
  return g;
}

}  // namespace

TEST_CASE("grid routing and geometry", "[binning]") {
  const BinGrid g = grid_of(10, 6);
  g.validate();
  CHECK(g.size() == 60);
  CHECK(g.route(0.0, 0.0) == 0);
  CHECK(g.route(3.9, 0.7) == g.index(1, 1));
  CHECK(g.route(4.0, 0.7) == g.index(2, 1));
  CHECK(g.route(20.0, 3.0) == g.index(9, 5));
  CHECK(g.route(-5.0, 99.0) == g.index(0, 5));
  CHECK(g.coords(g.index(7, 3)) == std::pair<int, int>{7, 3});
  CHECK(g.center_v(0) == 1.0);
  CHECK(g.center_s(5) == 2.75);
  BinGrid bad = g;
  bad.v_edges[3] = bad.v_edges[2];
  CHECK_THROWS_AS(bad.validate(), InvalidState);
}

TEST_CASE("equal-width grid spans the data", "[binning]") {
  const RecordTable data{{3.0, 0.2, 0.0}, {13.0, 1.4, 0.0}, {8.0, 0.9, 0.0}};
  const BinGrid g = BinGrid::equal_width(data, 10, 6);
  CHECK(g.v_edges.front() == 3.0);
  CHECK(g.v_edges.back() == 13.0);
  CHECK(g.v_edges[1] == Approx(4.0));
  CHECK(g.route(13.0, 1.4) == g.index(9, 5));
  const RecordTable flat{{3.0, 0.0, 0.0}, {5.0, 0.0, 0.0}};
  const BinGrid f = BinGrid::equal_width(flat, 4, 1);
  CHECK(f.n_s() == 1);
  f.validate();
}

TEST_CASE("interpolation weights", "[binning][property]") {
  Rng rng(12);
  const BinGrid g = grid_of(10, 6);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<int> sources;
    for (int b = 0; b < g.size(); ++b)
      if (rng.uniform() < 0.3) sources.push_back(b);
    if (sources.empty()) sources.push_back(static_cast<int>(rng.index(60)));
    const int target = static_cast<int>(rng.index(60));
    const double sv = 0.5 + 3.0 * rng.uniform(), ss = 0.1 + rng.uniform();
    const auto w = interpolation_weights(target, sources, g, sv, ss);
    double total = 0.0;
    for (const InterpWeight& x : w) {
      CHECK(x.weight >= 0.0);
      total += x.weight;
    }
    CHECK(total == Approx(1.0).epsilon(1e-12));

    // one source: that source's parameters come back unchanged
    const int only = sources.front();
    if (only != target) {
      const double mu = rng.normal(), sigma = 0.1 + rng.uniform();
      const auto [m, s] = interpolate_empty_bin(target, {{only, {mu, sigma}}}, g, sv, ss);
      CHECK(m == Approx(mu).epsilon(1e-14));
      CHECK(s == Approx(sigma).epsilon(1e-14));
    }

    // two sources mirrored about the target: the midpoint
    const auto [tv, ts] = g.coords(target);
    const int off = 1 + static_cast<int>(rng.index(3));
    if (tv - off >= 0 && tv + off < g.n_v()) {
      const int a = g.index(tv - off, ts), b = g.index(tv + off, ts);
      const double ma = rng.normal(), mb = rng.normal();
      const double sa = 0.1 + rng.uniform(), sb = 0.1 + rng.uniform();
      const auto [m, s] = interpolate_empty_bin(target, {{a, {ma, sa}}, {b, {mb, sb}}}, g, sv, ss);
      CHECK(m == Approx(0.5 * (ma + mb)).epsilon(1e-12));
      CHECK(s == Approx(0.5 * (sa + sb)).epsilon(1e-12));
    }
  }
}

TEST_CASE("inverse-squared-distance oracle", "[binning]") {
  const BinGrid g = grid_of(4, 1);
  // centers at v = 1, 3, 5, 7; target 3 with sources at 1 and 7 -> d = 1 and 2
  const auto w = interpolation_weights(1, {0, 3}, g, 2.0, 1.0);
  REQUIRE(w.size() == 2);
  CHECK(w[0].weight == Approx(0.8));
  CHECK(w[1].weight == Approx(0.2));
  CHECK_THROWS_AS(interpolation_weights(1, {}, g, 1.0, 1.0), InvalidArgument);
}

TEST_CASE("single bin reproduces the pooled fit", "[binning]") {
  Rng rng(6);
  RecordTable data;
  for (int i = 0; i < 800; ++i) data.push_back({10.0 * rng.uniform(), 0.0, gev_sample({1.0, 0.5, 0.1}, rng)});
  const BinGrid g = BinGrid::equal_width(data, 1, 1);
  const BinnedModel m = fit_binned(data, g);
  const PhiState one = PhiState::intercept_only({BasisType::kV});
  const FitResult pooled = fit_mle(RegressionKind::kGev, one, one, RegressionData::loads(data, false));
  CHECK(m.xi_shared == pooled.xi());
  CHECK(m.bins[0].mu == Approx(pooled.params[0]).epsilon(1e-5));
  CHECK(m.bins[0].sigma == Approx(std::exp(pooled.params[1])).epsilon(1e-5));
  CHECK(m.bins[0].source == BinFit::Source::kMle);
}

TEST_CASE("binned fit on a stepwise location", "[binning]") {
  Rng rng(4);
  RecordTable data;
  for (int i = 0; i < 3000; ++i) {
    const double v = 10.0 * rng.uniform();
    const double mu = v < 5.0 ? 1.0 : 3.0;
    data.push_back({v, 0.0, gev_sample({mu, 0.5, 0.1}, rng)});
  }
  // a lone point far out creates sparse and empty bins
  data.push_back({19.5, 0.0, 4.0});
  BinGrid g = BinGrid::equal_width(data, 10, 1);
  const BinnedModel m = fit_binned(data, g);
  CHECK(m.params_at(8.0, 0.0).mu - m.params_at(2.0, 0.0).mu == Approx(2.0).margin(0.2));
  CHECK(m.bins[static_cast<std::size_t>(g.route(2.0, 0.0))].source == BinFit::Source::kMle);
  CHECK(m.bins[9].source == BinFit::Source::kMoments);
  CHECK(m.bins[9].count == 1);
  CHECK(m.bins[7].source == BinFit::Source::kInterpolated);
  std::size_t total = 0;
  for (const BinFit& b : m.bins) {
    CHECK(b.sigma > 0.0);
    total += b.count;
  }
  CHECK(total == data.size());

  g.excluded = {9};
  const BinnedModel ex = fit_binned(data, g);
  CHECK(ex.bins[9].count == 0);
  CHECK(ex.bins[9].source == BinFit::Source::kInterpolated);

  const std::vector<WindPair> pairs{{2.0, 0.0}, {8.0, 0.0}};
  const std::vector<ExtremeTarget> targets{ExtremeTarget::from_probability(1e-3)};
  Rng r1(9), r2(9);
  const auto a = binned_extreme_load(m, pairs, targets, 30, 2000, r1);
  const auto b = binned_extreme_load(m, pairs, targets, 30, 2000, r2);
  REQUIRE(a.size() == 1);
  CHECK(a[0].draws == b[0].draws);
  CHECK(a[0].draws.size() == 30);
  CHECK(a[0].ci_lower <= a[0].median);
  CHECK(a[0].median <= a[0].ci_upper);
  // the pooled 1e-3 quantile is essentially the upper bin's 2e-3 quantile
  CHECK(a[0].median == Approx(gev_quantile(2e-3, m.params_at(8.0, 0.0))).epsilon(0.1));
}

TEST_CASE("one-bin grid gives the homogeneous long-term quantile", "[binning]") {
  Rng rng(14);
  RecordTable data;
  for (int i = 0; i < 2000; ++i) data.push_back({10.0 * rng.uniform(), 0.0, gev_sample({1.0, 0.5, 0.0}, rng)});
  const BinnedModel m = fit_binned(data, BinGrid::equal_width(data, 1, 1));
  const std::vector<WindPair> pairs(50, WindPair{5.0, 0.0});
  Rng r(3);
  const auto q = binned_extreme_load(m, pairs, {ExtremeTarget::from_probability(1e-3)}, 40, 2000, r);
  CHECK(q[0].median == Approx(gev_quantile(1e-3, m.params(0))).epsilon(0.05));
}

TEST_CASE("low-likelihood bins", "[binning]") {
  const BinGrid g = grid_of(4, 1);
  std::vector<WindPair> pairs(1000, WindPair{1.0, 0.0});
  pairs[0] = {5.0, 0.0};
  const std::set<int> low = low_likelihood_bins(g, pairs, 100);
  CHECK(low == std::set<int>{1, 2, 3});
  CHECK(low_likelihood_bins(g, pairs, 1000) == std::set<int>{1, 3});
}
