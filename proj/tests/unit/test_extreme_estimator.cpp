#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "xload/error.hpp"
#include "xload/extreme_estimator.hpp"

using namespace xload;
using Catch::Approx;

namespace {

ModelDraw constant_draw(double mu, double sigma, double xi) {
  ModelDraw d;
  d.phi_mu = PhiState::intercept_only({BasisType::kV});
  d.phi_sigma = PhiState::intercept_only({BasisType::kV});
  d.beta = Eigen::VectorXd::Constant(1, mu);
  d.theta = Eigen::VectorXd::Constant(1, std::log(sigma));
  d.xi = xi;
  return d;
}

// Pool every draw and sort it: the plain reference the tail pool must match.
std::vector<TailQuantile> naive_long_term(const std::vector<GevParams>& table, int n_l,
                                          const std::vector<double>& ps, Rng& rng) {
  std::vector<double> pool;
  for (const GevParams& g : table)
    for (int k = 0; k < n_l; ++k) pool.push_back(gev_sample(g, rng));
  std::sort(pool.begin(), pool.end());
  std::vector<TailQuantile> out;
  for (double p : ps) out.push_back(upper_tail_quantile_sorted(pool, p));
  return out;
}

}  // namespace

TEST_CASE("stats quantile conventions", "[stats]") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0, 5.0};
  CHECK(quantile_sorted(x, 0.5) == 3.0);
  CHECK(quantile_sorted(x, 0.1) == Approx(1.4));
  CHECK(mean(x) == 3.0);
  CHECK(sample_sd(x) == Approx(std::sqrt(2.5)));
  // rank (1 - p) * P = 2.5 -> halfway between 3 and 4
  CHECK(upper_tail_quantile_sorted(x, 0.5).value == Approx(3.5));
  CHECK_FALSE(upper_tail_quantile_sorted(x, 0.5).clamped);
  const TailQuantile c = upper_tail_quantile_sorted(x, 0.1);
  CHECK(c.clamped);
  CHECK(c.value == 5.0);
}

TEST_CASE("tail pool agrees with a full sort", "[stats][property]") {
  Rng rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 1 + rng.index(5000);
    std::vector<double> x(n);
    for (double& v : x) v = rng.normal();
    const double p = std::exp(std::log(1e-4) + rng.uniform() * std::log(1e4) * 0.9);
    TailPool pool(TailPool::capacity_for(n, p));
    for (double v : x) pool.push(v);
    std::sort(x.begin(), x.end());
    const TailQuantile a = pool.upper_tail_quantile(p);
    const TailQuantile b = upper_tail_quantile_sorted(x, p);
    CHECK(a.value == b.value);
    CHECK(a.clamped == b.clamped);
  }
}

TEST_CASE("short_term_params", "[extreme]") {
  const std::vector<WindPair> pairs{{5.0, 0.5}, {8.0, 1.0}, {12.0, 1.5}, {15.0, 0.8}, {20.0, 2.0}};
  const ModelDraw flat = constant_draw(1.0, 0.4, 0.1);
  for (const GevParams& g : short_term_params(flat, pairs)) {
    CHECK(g.mu == 1.0);
    CHECK(g.sigma == Approx(0.4).epsilon(1e-15));
    CHECK(g.xi == 0.1);
  }

  ModelDraw d = flat;
  BasisTerm a;
  a.type = BasisType::kV;
  a.signs = {1, 1};
  a.knots = {10.0, 0.0};
  BasisTerm b;
  b.type = BasisType::kVS;
  b.signs = {-1, 1};
  b.knots = {18.0, 0.6};
  d.phi_mu.allowed_types = {BasisType::kV, BasisType::kVS};
  d.phi_mu.terms = {a, b};
  d.beta = Eigen::Vector3d(0.5, 0.07, -0.02);
  d.phi_sigma.allowed_types = {BasisType::kS};
  BasisTerm c;
  c.type = BasisType::kS;
  c.signs = {1, 1};
  c.knots = {0.7, 0.0};
  d.phi_sigma.terms = {c};
  d.theta = Eigen::Vector2d(-1.0, 0.3);
  const std::vector<GevParams> got = short_term_params(d, pairs);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double v = pairs[i].v, s = pairs[i].s;
    const double mu = 0.5 + 0.07 * std::max(0.0, v - 10.0) -
                      0.02 * std::max(0.0, 18.0 - v) * std::max(0.0, s - 0.6);
    const double sigma = std::exp(-1.0 + 0.3 * std::max(0.0, s - 0.7));
    CHECK(got[i].mu == Approx(mu).epsilon(1e-12));
    CHECK(got[i].sigma == Approx(sigma).epsilon(1e-12));
    CHECK(got[i].sigma > 0.0);
  }
}

TEST_CASE("long-term quantile of a single GEV", "[extreme]") {
  Rng rng(1);
  const std::vector<GevParams> one{{0.0, 1.0, 0.0}};
  const TailQuantile q = long_term_quantile(one, 1000000, 1e-3, rng);
  CHECK_FALSE(q.clamped);
  CHECK(q.value == Approx(gev_quantile(1e-3, {0.0, 1.0, 0.0})).epsilon(0.03));
  const TailQuantile med = long_term_quantile(one, 200000, 0.5, rng);
  CHECK(med.value == Approx(0.36651292058166433).margin(0.01));

  const std::vector<GevParams> flat{{2.5, 1e-13, 0.0}, {2.5, 1e-13, 0.0}};
  for (double p : {0.3, 1e-2, 1e-6})
    CHECK(long_term_quantile(flat, 1000, p, rng).value == Approx(2.5).margin(1e-10));
}

TEST_CASE("identical table entries match a single distribution", "[extreme][property]") {
  const std::vector<GevParams> many(100, GevParams{1.0, 0.5, 0.1});
  Rng rng(8);
  const TailQuantile q = long_term_quantile(many, 10000, 1e-4, rng);
  CHECK(q.value == Approx(gev_quantile(1e-4, {1.0, 0.5, 0.1})).epsilon(0.05));
}

TEST_CASE("tail skipping reproduces the plain pooled quantile", "[extreme][property]") {
  Rng gen(5);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<GevParams> table;
    const std::size_t n = 1 + gen.index(300);
    for (std::size_t i = 0; i < n; ++i)
      table.push_back({gen.normal(), 0.1 + gen.uniform(), 0.6 * gen.uniform() - 0.3});
    const std::vector<double> ps{0.2, 1e-3, 1e-4, 1e-6};
    Rng a(100 + rep), b(100 + rep);
    const auto fast = long_term_quantiles(table, 500, ps, a);
    const auto slow = naive_long_term(table, 500, ps, b);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      CHECK(fast[i].value == slow[i].value);
      CHECK(fast[i].clamped == slow[i].clamped);
    }
    CHECK(a.uniform() == b.uniform());
  }
}

TEST_CASE("long-term quantile argument checks", "[extreme]") {
  Rng rng(1);
  CHECK_THROWS_AS(long_term_quantile({}, 10, 0.1, rng), InvalidArgument);
  CHECK_THROWS_AS(long_term_quantile({{0.0, 1.0, 0.0}}, 10, 0.0, rng), InvalidArgument);
  CHECK(long_term_quantile({{0.0, 1.0, 0.0}}, 10, 1e-3, rng).clamped);
}

TEST_CASE("estimate_extreme_load end to end", "[extreme]") {
  Rng rng(31);
  RecordTable data;
  std::vector<WindPair> pairs;
  for (int i = 0; i < 600; ++i) {
    const double v = 3.0 + 15.0 * rng.uniform();
    const double s = 0.3 + rng.uniform();
    data.push_back({v, s, gev_sample({0.5 + 0.05 * v, 0.2, 0.0}, rng)});
  }
  for (int i = 0; i < 200; ++i) pairs.push_back({3.0 + 15.0 * rng.uniform(), 0.3 + rng.uniform()});
  EstimateOptions opt;
  opt.chain.burn_in = 60;
  opt.chain.n_draws = 40;
  opt.n_l = 50;
  const std::vector<ExtremeTarget> targets{ExtremeTarget::from_years(20.0),
                                           ExtremeTarget::from_years(50.0),
                                           ExtremeTarget::from_probability(1e-3)};
  const SplineEstimate est = estimate_extreme_load(data, pairs, opt, targets);
  REQUIRE(est.results.size() == 3);
  CHECK(est.results[1].p_t == Approx(3.8026e-7).epsilon(1e-4));
  CHECK(est.results[1].t_years == 50.0);
  for (const QuantileResult& r : est.results) {
    CHECK(r.draws.size() == 40);
    CHECK(r.ci_lower <= r.median);
    CHECK(r.median <= r.ci_upper);
  }
  CHECK(est.results[1].mean >= est.results[0].mean);
  CHECK(est.results[0].mean >= est.results[2].mean);
  CHECK(est.results[1].clamped_draws == 40);
  CHECK(est.results[2].clamped_draws == 0);
}

TEST_CASE("pointwise credible band", "[extreme]") {
  Rng rng(2);
  RecordTable data;
  for (int i = 0; i < 400; ++i) data.push_back({3.0 + 15.0 * rng.uniform(), 0.5 + rng.uniform(), 0.0});
  const std::vector<ModelDraw> draws(200, constant_draw(1.0, 0.5, 0.05));
  const CredibleInterval ci = pointwise_credible_band(data, draws, SlabAxis::kV, 10.0, 100.0, rng);
  CHECK(ci.slab_size == 400);
  CHECK(ci.lower == Approx(gev_quantile(0.975, {1.0, 0.5, 0.05})).margin(0.01));
  CHECK(ci.upper == Approx(gev_quantile(0.025, {1.0, 0.5, 0.05})).margin(0.03));
  const CredibleInterval narrow = pointwise_credible_band(data, draws, SlabAxis::kS, 1.0, 0.05, rng);
  CHECK(narrow.lower <= narrow.upper);
  CHECK(narrow.slab_size < 400);
  CHECK_THROWS_AS(pointwise_credible_band(data, draws, SlabAxis::kV, 100.0, 0.5, rng), EmptySlab);
}
