#pragma once

// Reversible jump sampler over the two knot configurations (location and
// scale) of a location-scale regression. Acceptance uses the SIC difference
// as the log marginal-likelihood ratio.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "xload/mars_basis.hpp"
#include "xload/mle_laplace.hpp"
#include "xload/random.hpp"

namespace xload {

struct MoveProbs {
  double birth = 1.0 / 3.0;
  double death = 1.0 / 3.0;
  double move = 1.0 / 3.0;
};

struct ChainConfig {
  int burn_in = 200;
  int n_draws = 500;
  MoveProbs probs{};
  std::uint64_t seed = 1;
  int k_max = 40;
  // Consecutive failed refits tolerated before the chain gives up.
  int max_consecutive_failures = 50;
  // Proposals whose new basis column is nonzero on fewer data points are
  // rejected outright.
  int min_basis_support = 5;
};

struct ChainState {
  PhiState phi_mu;
  PhiState phi_sigma;
  FitResult fit;
  std::size_t iteration = 0;
};

enum class Which { kMu, kSigma };

// Move probabilities (birth, death, move) at dimension k. At k = 1 all mass
// goes to BIRTH; at k = k_max the BIRTH mass moves to DEATH.
std::array<double, 3> move_probabilities(int k, int k_max, const MoveProbs& probs);

// Ratio of the reverse-move probability at the proposed dimension to the
// forward-move probability at the current one.
double proposal_ratio(Move move, int k, int k_max, const MoveProbs& probs);

// Refits a model for given bases, optionally warm-started.
using FitFn = std::function<FitResult(const PhiState& phi_mu, const PhiState& phi_sigma,
                                      const std::optional<Eigen::VectorXd>& init)>;

struct StepOutcome {
  Move move = Move::kBirth;
  bool accepted = false;
  bool fit_failed = false;
  bool inadmissible = false;
  double log_alpha = 0.0;
};

class RjsEngine {
 public:
  RjsEngine(FitFn fit, CovariateTable covariates, const ChainConfig& config);

  ChainState initial_state(PhiState phi_mu, PhiState phi_sigma) const;
  StepOutcome step(ChainState& state, Which which, Rng& rng) const;

 private:
  bool admissible(const PhiState& phi_mu, const PhiState& phi_sigma,
                  const BasisTerm* added) const;

  FitFn fit_;
  CovariateTable x_;
  ChainConfig config_;
};

struct TraceRow {
  std::size_t iteration = 0;
  int k_mu = 1;
  int k_sigma = 1;
  double loglik = 0.0;
  double sic = 0.0;
  bool accepted_mu = false;
  bool accepted_sigma = false;
};

struct ChainStats {
  std::array<std::size_t, 3> proposed{};
  std::array<std::size_t, 3> accepted{};
  std::size_t fit_failures = 0;
  std::size_t inadmissible = 0;
};

struct ChainResult {
  std::vector<ModelDraw> draws;
  std::vector<TraceRow> trace;
  ChainStats stats;
  ChainState final_state;
};

using DrawCallback = std::function<void(const ChainState&, const ModelDraw&)>;

// burn_in iterations followed by n_draws iterations, each a location update
// then a scale update; every post-burn-in iteration emits one parameter draw
// from the normal approximation of the current fit.
ChainResult run_chain(const FitFn& fit, CovariateTable covariates, PhiState init_mu,
                      PhiState init_sigma, const ChainConfig& config,
                      const DrawCallback& on_draw = nullptr);

// run_chain on a GEV or truncated normal regression.
ChainResult run_regression_chain(RegressionKind kind, const RegressionData& data,
                                 const std::vector<BasisType>& types_mu,
                                 const std::vector<BasisType>& types_sigma,
                                 const ChainConfig& config,
                                 const DrawCallback& on_draw = nullptr);

}  // namespace xload
