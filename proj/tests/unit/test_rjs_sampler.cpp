#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <vector>

#include "xload/core_dist.hpp"
#include "xload/error.hpp"
#include "xload/rjs_sampler.hpp"

using namespace xload;
using Catch::Approx;

namespace {

// A fit whose SIC depends only on the two dimensions.
FitFn table_fit(std::vector<double> sic_mu, std::vector<double> sic_sigma) {
  return [sic_mu, sic_sigma](const PhiState& mu, const PhiState& sigma,
                             const std::optional<Eigen::VectorXd>&) {
    FitResult f;
    f.k_mu = mu.k();
    f.k_sigma = sigma.k();
    f.params = Eigen::VectorXd::Zero(f.k_mu + f.k_sigma + 1);
    f.neg_hessian_inv = 1e-4 * Eigen::MatrixXd::Identity(f.dim(), f.dim());
    f.sic = sic_mu[static_cast<std::size_t>(f.k_mu - 1)] +
            sic_sigma[static_cast<std::size_t>(f.k_sigma - 1)];
    f.loglik = f.sic;
    f.converged = true;
    return f;
  };
}

struct Covariates {
  std::vector<double> v, s;
  explicit Covariates(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      v.push_back(static_cast<double>(i));
      s.push_back(0.01 * static_cast<double>(i));
    }
  }
  CovariateTable table() const { return {v, s}; }
};

}  // namespace

TEST_CASE("move probabilities at the dimension bounds", "[rjs]") {
  const MoveProbs p;
  CHECK(move_probabilities(1, 40, p) == std::array<double, 3>{1.0, 0.0, 0.0});
  const auto top = move_probabilities(40, 40, p);
  CHECK(top[0] == 0.0);
  CHECK(top[1] == Approx(2.0 / 3.0));
  CHECK(top[2] == Approx(1.0 / 3.0));
  CHECK(proposal_ratio(Move::kBirth, 1, 40, p) == Approx(1.0 / 3.0));
  CHECK(proposal_ratio(Move::kDeath, 2, 40, p) == Approx(3.0));
  CHECK(proposal_ratio(Move::kBirth, 5, 40, p) == Approx(1.0));
  CHECK(proposal_ratio(Move::kMove, 5, 40, p) == 1.0);
  CHECK(proposal_ratio(Move::kBirth, 39, 40, p) == Approx(2.0));
  CHECK(proposal_ratio(Move::kDeath, 40, 40, p) == Approx(0.5));
  CHECK_THROWS_AS(move_probabilities(41, 40, p), InvalidState);
}

TEST_CASE("detailed balance on a small model space", "[rjs][property]") {
  const Covariates x(50);
  const std::vector<double> a{0.0, 1.2, 0.3, -0.5};
  const std::vector<double> b{0.0, -0.7, 0.4, 0.1};
  ChainConfig cfg;
  cfg.k_max = 4;
  cfg.burn_in = 1000;
  cfg.n_draws = 200000;
  cfg.min_basis_support = 0;
  cfg.seed = 99;
  std::map<int, double> freq_mu, freq_sigma;
  const ChainResult r = run_chain(table_fit(a, b), x.table(),
                                  PhiState::intercept_only({BasisType::kV}),
                                  PhiState::intercept_only({BasisType::kV}), cfg);
  for (std::size_t i = static_cast<std::size_t>(cfg.burn_in); i < r.trace.size(); ++i) {
    freq_mu[r.trace[i].k_mu] += 1.0 / cfg.n_draws;
    freq_sigma[r.trace[i].k_sigma] += 1.0 / cfg.n_draws;
  }
  auto expected = [](const std::vector<double>& w, int k) {
    double z = 0.0;
    for (double x : w) z += std::exp(x);
    return std::exp(w[static_cast<std::size_t>(k - 1)]) / z;
  };
  for (int k = 1; k <= 4; ++k) {
    CHECK(freq_mu[k] == Approx(expected(a, k)).margin(0.015));
    CHECK(freq_sigma[k] == Approx(expected(b, k)).margin(0.015));
  }
}

TEST_CASE("dimension stays in bounds and MOVE keeps it", "[rjs][property]") {
  const Covariates x(60);
  ChainConfig cfg;
  cfg.k_max = 5;
  cfg.min_basis_support = 0;
  const RjsEngine engine(table_fit({0, 2, 4, 6, 8}, {0, 0, 0, 0, 0}), x.table(), cfg);
  ChainState state = engine.initial_state(PhiState::intercept_only({BasisType::kV}),
                                          PhiState::intercept_only({BasisType::kV}));
  Rng rng(3);
  for (int i = 0; i < 3000; ++i) {
    const int before = state.phi_mu.k();
    const StepOutcome r = engine.step(state, Which::kMu, rng);
    const int after = state.phi_mu.k();
    CHECK(after >= 1);
    CHECK(after <= cfg.k_max);
    if (r.move == Move::kMove) CHECK(after == before);
    if (r.accepted && r.move == Move::kBirth) CHECK(after == before + 1);
    if (r.accepted && r.move == Move::kDeath) CHECK(after == before - 1);
    if (before == 1) CHECK(r.move == Move::kBirth);
    if (before == cfg.k_max) CHECK(r.move != Move::kBirth);
  }
}

TEST_CASE("large SIC gain is always accepted", "[rjs]") {
  const Covariates x(60);
  ChainConfig cfg;
  cfg.min_basis_support = 0;
  const RjsEngine engine(table_fit({0, 10, 20}, {0, 0, 0}), x.table(), cfg);
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    ChainState state = engine.initial_state(PhiState::intercept_only({BasisType::kV}),
                                            PhiState::intercept_only({BasisType::kV}));
    const StepOutcome r = engine.step(state, Which::kMu, rng);
    CHECK(r.move == Move::kBirth);
    CHECK(r.accepted);
    CHECK(r.log_alpha == Approx(10.0 + std::log(1.0 / 3.0)));
  }
}

TEST_CASE("failed refits are rejected and eventually stall the chain", "[rjs]") {
  const Covariates x(60);
  FitFn flaky = [](const PhiState& mu, const PhiState& sigma,
                   const std::optional<Eigen::VectorXd>&) {
    FitResult f;
    f.k_mu = mu.k();
    f.k_sigma = sigma.k();
    f.params = Eigen::VectorXd::Zero(f.k_mu + f.k_sigma + 1);
    f.neg_hessian_inv = Eigen::MatrixXd::Identity(f.dim(), f.dim());
    f.converged = f.k_mu == 1 && f.k_sigma == 1;
    f.sic = f.converged ? 0.0 : 100.0;
    return f;
  };
  ChainConfig cfg;
  cfg.min_basis_support = 0;
  const RjsEngine engine(flaky, x.table(), cfg);
  ChainState state = engine.initial_state(PhiState::intercept_only({BasisType::kV}),
                                          PhiState::intercept_only({BasisType::kV}));
  Rng rng(1);
  const StepOutcome r = engine.step(state, Which::kMu, rng);
  CHECK(r.fit_failed);
  CHECK_FALSE(r.accepted);
  CHECK(state.phi_mu.k() == 1);
  cfg.burn_in = 100;
  CHECK_THROWS_AS(run_chain(flaky, x.table(), PhiState::intercept_only({BasisType::kV}),
                            PhiState::intercept_only({BasisType::kV}), cfg),
                  ChainStall);
}

TEST_CASE("chain on intercept-only GEV data stays parsimonious", "[rjs]") {
  Rng rng(12);
  RegressionData d;
  for (int i = 0; i < 1000; ++i) {
    d.v.push_back(3.0 + 15.0 * rng.uniform());
    d.s.push_back(0.3 + 1.5 * rng.uniform());
    d.y.push_back(gev_sample({1.0, 0.5, 0.05}, rng));
  }
  ChainConfig cfg;
  cfg.burn_in = 100;
  cfg.n_draws = 200;
  cfg.seed = 7;
  const std::vector<BasisType> all{BasisType::kV, BasisType::kS, BasisType::kVS};
  const ChainResult r = run_regression_chain(RegressionKind::kGev, d, all,
                                             {BasisType::kV, BasisType::kS}, cfg);
  REQUIRE(r.draws.size() == 200);
  int k1 = 0;
  for (const ModelDraw& m : r.draws) k1 += m.phi_mu.k() == 1;
  CHECK(k1 >= 160);

  const ChainResult again = run_regression_chain(RegressionKind::kGev, d, all,
                                                 {BasisType::kV, BasisType::kS}, cfg);
  REQUIRE(again.draws.size() == r.draws.size());
  for (std::size_t i = 0; i < r.draws.size(); ++i) {
    CHECK(again.draws[i].beta == r.draws[i].beta);
    CHECK(again.draws[i].theta == r.draws[i].theta);
    CHECK(again.draws[i].xi == r.draws[i].xi);
  }
  for (const TraceRow& t : r.trace) {
    CHECK(t.k_mu >= 1);
    CHECK(t.k_sigma >= 1);
  }

  cfg.n_draws = 0;
  cfg.burn_in = 5;
  const ChainResult empty = run_regression_chain(RegressionKind::kGev, d, all, all, cfg);
  CHECK(empty.draws.empty());
  CHECK(empty.trace.size() == 5);
}

TEST_CASE("chain finds a real location effect", "[rjs]") {
  Rng rng(21);
  RegressionData d;
  for (int i = 0; i < 800; ++i) {
    const double v = 3.0 + 17.0 * rng.uniform();
    d.v.push_back(v);
    d.y.push_back(gev_sample({0.5 + 0.1 * std::max(0.0, v - 10.0), 0.2, 0.0}, rng));
  }
  ChainConfig cfg;
  cfg.burn_in = 150;
  cfg.n_draws = 100;
  const ChainResult r =
      run_regression_chain(RegressionKind::kGev, d, {BasisType::kV}, {BasisType::kV}, cfg);
  double mean_at_15 = 0.0;
  for (const ModelDraw& m : r.draws) {
    CHECK(m.phi_mu.k() >= 2);
    mean_at_15 += m.location(15.0, 0.0) / static_cast<double>(r.draws.size());
  }
  // GEV location at v = 15 is 1.0.
  CHECK(mean_at_15 == Approx(1.0).margin(0.05));
}
