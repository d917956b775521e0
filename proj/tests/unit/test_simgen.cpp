#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "xload/error.hpp"
#include "xload/simgen.hpp"

using namespace xload;
using Catch::Approx;

TEST_CASE("simulation mean and scale", "[simgen]") {
  CHECK(sim_mu(10.0, 0.0) == Approx(0.030612244897959183).epsilon(1e-14));
  CHECK(sim_mu(10.0, 200.0) == Approx(1.5).epsilon(1e-14));
  CHECK(sim_mu(17.0, 5.0) - sim_mu(16.999, 5.0) == Approx(0.0104).epsilon(1e-12));
  CHECK(sim_mu(20.0, 9.0) == Approx(1.5 / (1.0 + 48.0 * std::exp(-2.7)) + 0.5 - 0.0016 * 420.0));
  CHECK(sim_sigma(std::exp(1.0)) == Approx(0.1).epsilon(1e-14));
  CHECK(sim_sigma(std::exp(2.0)) == Approx(0.2).epsilon(1e-14));
  CHECK(sim_sigma(1.0) == kSimSigmaFloor);
  CHECK(sim_sigma(-3.0) == kSimSigmaFloor);
  for (double x = 0.0; x < 30.0; x += 0.01) CHECK(sim_mu(5.0, x + 0.01) >= sim_mu(5.0, x));
}

TEST_CASE("training generator", "[simgen]") {
  SimConfig c;
  c.n_blocks = 1;
  Rng r(1);
  CHECK(generate_training(c, r).size() == 1);
  c.n_blocks = 200;
  c.block_size = 100;
  Rng a(4), b(4);
  const RecordTable x = generate_training(c, a);
  const RecordTable y = generate_training(c, b);
  REQUIRE(x.size() == 200);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(x[i].v == y[i].v);
    CHECK(x[i].y == y[i].y);
    CHECK(x[i].s == 0.0);
    CHECK(x[i].v > 3.0);
  }
  c.block_size = 0;
  CHECK_THROWS_AS(generate_training(c, a), InvalidArgument);
}

TEST_CASE("block maxima dominate single draws", "[simgen][property]") {
  SimConfig c;
  c.block_size = 20;
  SimConfig single = c;
  single.block_size = 1;
  Rng a(8), b(9);
  std::vector<double> blk, one;
  for (int i = 0; i < 10000; ++i) {
    blk.push_back(sim_block(c, a).y);
    one.push_back(sim_block(single, b).y);
  }
  std::sort(blk.begin(), blk.end());
  std::sort(one.begin(), one.end());
  for (std::size_t i = 0; i < blk.size(); i += 500) CHECK(blk[i] >= one[i]);
}

TEST_CASE("reference quantiles", "[simgen]") {
  SimConfig c;
  c.block_size = 50;
  Rng r(2);
  const ReferenceQuantiles q = generate_reference_quantiles(c, 5, 20000, {1e-2, 1e-3, 0.5}, r);
  REQUIRE(q.rows.size() == 5);
  for (const auto& row : q.rows) {
    REQUIRE(row.size() == 3);
    CHECK(row[0] < row[1]);
    CHECK(row[2] < row[0]);
  }
  CHECK(q.rows[0] != q.rows[1]);
  CHECK_THROWS_AS(generate_reference_quantiles(c, 1, 10, {1.0}, r), InvalidArgument);
}
