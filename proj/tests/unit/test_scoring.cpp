#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "xload/error.hpp"
#include "xload/scoring.hpp"
#include "xload/simgen.hpp"

using namespace xload;
using Catch::Approx;

namespace {

double pinball(double l, double y, double tau) { return y > l ? tau * (y - l) : (1.0 - tau) * (l - y); }

}  // namespace

TEST_CASE("gpl oracle values", "[scoring]") {
  CHECK(gpl_score(2.0, 1.0, 0.9, 1.0) == Approx(0.1).epsilon(1e-14));
  CHECK(gpl_score(std::exp(1.0) * 2.0, 2.0, 0.5, 0.0) == Approx(0.5).epsilon(1e-14));
  CHECK(gpl_score(3.0, 1.0, 0.9, 2.0) == Approx(0.4).epsilon(1e-14));
  CHECK(gpl_score(1.0, 3.0, 0.9, 2.0) == Approx(3.6).epsilon(1e-14));
  CHECK(gpl_score(1.0, 2.0, 0.25, 0.0) == Approx(0.25 * std::log(2.0)).epsilon(1e-14));
  CHECK(gpl_score(-1.0, 2.0, 0.5, 1.0) == Approx(1.5));
  // negative powers keep the absolute-value normalizer
  CHECK(gpl_score(2.0, 1.0, 0.9, -1.0) == Approx(0.1 * (0.5 - 1.0)).epsilon(1e-14));
  CHECK_THROWS_AS(gpl_score(-1.0, 2.0, 0.5, 0.0), InvalidArgument);
  CHECK_THROWS_AS(gpl_score(1.0, 0.0, 0.5, -1.0), InvalidArgument);
  CHECK_THROWS_AS(gpl_score(1.0, 1.0, 1.0, 1.0), InvalidArgument);
}

TEST_CASE("gpl properties", "[scoring][property]") {
  Rng rng(10);
  for (int i = 0; i < 20000; ++i) {
    const double l = std::exp(3.0 * rng.normal()), y = std::exp(3.0 * rng.normal());
    const double tau = rng.uniform();
    for (double b : {0.0, 0.5, 1.0, 2.0, 2.5}) {
      CHECK(gpl_score(l, y, tau, b) >= 0.0);
      CHECK(gpl_score(y, y, tau, b) == 0.0);
    }
    CHECK(gpl_score(l, y, tau, 1.0) == Approx(pinball(l, y, tau)).margin(1e-12));
  }
  // slopes of the b = 1 branch
  const double tau = 0.7, y = 2.0;
  CHECK((gpl_score(3.5, y, tau, 1.0) - gpl_score(3.0, y, tau, 1.0)) / 0.5 == Approx(1.0 - tau));
  CHECK((gpl_score(1.5, y, tau, 1.0) - gpl_score(1.0, y, tau, 1.0)) / 0.5 == Approx(-tau));
}

TEST_CASE("mean score", "[scoring]") {
  CHECK(mean_score({2.0}, {1.0}, 0.9, 1.0) == gpl_score(2.0, 1.0, 0.9, 1.0));
  CHECK(mean_score({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}, 0.3, 0.0) == 0.0);
  CHECK_THROWS_AS(mean_score({1.0}, {1.0, 2.0}, 0.5, 1.0), InvalidArgument);
  CHECK_THROWS_AS(mean_score({}, {}, 0.5, 1.0), InvalidArgument);
  Rng rng(2);
  std::vector<double> l(500), y(500);
  for (std::size_t i = 0; i < l.size(); ++i) {
    l[i] = 0.1 + rng.uniform();
    y[i] = 0.1 + rng.uniform();
  }
  double naive = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i) naive += gpl_score(l[i], y[i], 0.9, 0.0);
  naive /= static_cast<double>(l.size());
  CHECK(mean_score(l, y, 0.9, 0.0) == Approx(naive).margin(1e-12));
  std::vector<std::size_t> perm(l.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = (i * 7) % perm.size();
  std::vector<double> lp, yp;
  for (std::size_t i : perm) {
    lp.push_back(l[i]);
    yp.push_back(y[i]);
  }
  CHECK(mean_score(lp, yp, 0.9, 0.0) == Approx(mean_score(l, y, 0.9, 0.0)).epsilon(1e-13));
  CHECK(reduction_pct(1.0, 1.0) == 0.0);
  CHECK(reduction_pct(0.8, 1.0) == Approx(20.0));
}

TEST_CASE("thin draws", "[scoring]") {
  std::vector<ModelDraw> d(10);
  for (std::size_t i = 0; i < d.size(); ++i) d[i].xi = static_cast<double>(i);
  const auto t = thin_draws(d, 5);
  REQUIRE(t.size() == 5);
  CHECK(t[0].xi == 0.0);
  CHECK(t[4].xi == 8.0);
  CHECK(thin_draws(d, 50).size() == 10);
}

TEST_CASE("compare_methods is reproducible", "[scoring]") {
  SimConfig sim;
  sim.n_blocks = 300;
  sim.block_size = 50;
  Rng gen(3);
  const RecordTable data = generate_training(sim, gen);
  CompareOptions opt;
  opt.n_repeats = 2;
  opt.spline.use_s = false;
  opt.spline.chain.burn_in = 20;
  opt.spline.chain.n_draws = 20;
  opt.posterior_draws = 10;
  opt.n_l = 20;
  Rng a(5), b(5);
  const Comparison ca = compare_methods(data, opt, a);
  const Comparison cb = compare_methods(data, opt, b);
  REQUIRE(ca.rows.size() == 6);
  CHECK(ca.failures.empty());
  for (std::size_t i = 0; i < ca.rows.size(); ++i) {
    CHECK(ca.rows[i].spline == cb.rows[i].spline);
    CHECK(ca.rows[i].binning == cb.rows[i].binning);
    CHECK(ca.rows[i].n_repeats == 2);
    CHECK(std::isfinite(ca.rows[i].spline));
    CHECK(ca.rows[i].spline > 0.0);
  }
  CHECK(ca.rows[0].tau == 0.9);
  CHECK(ca.rows[0].b == 0.0);
  CHECK(ca.rows[5].tau == 0.99);
  CHECK(ca.rows[5].b == 2.0);
}
