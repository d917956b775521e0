#include "xload/rjs_sampler.hpp"

#include <cmath>
#include <string>

#include "xload/error.hpp"

namespace xload {

namespace {

int move_index(Move m) {
  switch (m) {
    case Move::kBirth:
      return 0;
    case Move::kDeath:
      return 1;
    case Move::kMove:
      return 2;
  }
  return 0;
}

void check_probs(const MoveProbs& p) {
  if (p.birth < 0.0 || p.death < 0.0 || p.move < 0.0 ||
      std::fabs(p.birth + p.death + p.move - 1.0) > 1e-9)
    throw InvalidArgument("move probabilities must be nonnegative and sum to 1");
}

}  // namespace

std::array<double, 3> move_probabilities(int k, int k_max, const MoveProbs& probs) {
  if (k < 1 || k > k_max) throw InvalidState("dimension outside [1, k_max]");
  if (k_max == 1) return {0.0, 0.0, 0.0};
  if (k == 1) return {1.0, 0.0, 0.0};
  if (k == k_max) return {0.0, probs.death + probs.birth, probs.move};
  return {probs.birth, probs.death, probs.move};
}

double proposal_ratio(Move move, int k, int k_max, const MoveProbs& probs) {
  const auto here = move_probabilities(k, k_max, probs);
  switch (move) {
    case Move::kBirth:
      return move_probabilities(k + 1, k_max, probs)[1] / here[0];
    case Move::kDeath:
      return move_probabilities(k - 1, k_max, probs)[0] / here[1];
    case Move::kMove:
      return 1.0;
  }
  return 1.0;
}

RjsEngine::RjsEngine(FitFn fit, CovariateTable covariates, const ChainConfig& config)
    : fit_(std::move(fit)), x_(covariates), config_(config) {
  check_probs(config_.probs);
  if (config_.k_max < 1) throw InvalidArgument("k_max must be at least 1");
  if (config_.burn_in < 0 || config_.n_draws < 0)
    throw InvalidArgument("chain lengths must be nonnegative");
}

ChainState RjsEngine::initial_state(PhiState phi_mu, PhiState phi_sigma) const {
  phi_mu.k_max = config_.k_max;
  phi_sigma.k_max = config_.k_max;
  ChainState s{std::move(phi_mu), std::move(phi_sigma), {}, 0};
  s.phi_mu.validate();
  s.phi_sigma.validate();
  s.fit = fit_(s.phi_mu, s.phi_sigma, std::nullopt);
  if (!s.fit.converged) throw ChainStall("initial maximum likelihood fit did not converge");
  return s;
}

bool RjsEngine::admissible(const PhiState& phi_mu, const PhiState& phi_sigma,
                           const BasisTerm* added) const {
  const std::size_t n = x_.size();
  const std::size_t d = static_cast<std::size_t>(phi_mu.k() + phi_sigma.k()) + 1;
  if (n < d + 2) return false;
  if (added == nullptr || config_.min_basis_support <= 0) return true;
  int support = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = x_.s.empty() ? 0.0 : x_.s[i];
    if (eval_basis(*added, x_.v[i], s) != 0.0 && ++support >= config_.min_basis_support)
      return true;
  }
  return false;
}

StepOutcome RjsEngine::step(ChainState& state, Which which, Rng& rng) const {
  if (!state.fit.converged) throw InvalidState("rjs_step needs a converged current fit");
  PhiState& current = which == Which::kMu ? state.phi_mu : state.phi_sigma;
  const int k = current.k();
  const auto probs = move_probabilities(k, config_.k_max, config_.probs);

  StepOutcome out;
  const double u = rng.uniform();
  out.move = u < probs[0] ? Move::kBirth : (u < probs[0] + probs[1] ? Move::kDeath : Move::kMove);
  if (probs[move_index(out.move)] == 0.0) {
    // Only reachable when k_max = 1: nothing can be proposed.
    out.inadmissible = true;
    return out;
  }

  PhiState proposal = propose(current, out.move, x_, rng);
  const BasisTerm* added = out.move == Move::kDeath ? nullptr : &proposal.terms.back();
  const PhiState& new_mu = which == Which::kMu ? proposal : state.phi_mu;
  const PhiState& new_sigma = which == Which::kSigma ? proposal : state.phi_sigma;
  if (!admissible(new_mu, new_sigma, added)) {
    out.inadmissible = true;
    return out;
  }

  // Warm start: carry surviving coefficients into the proposed layout.
  const FitResult& fit = state.fit;
  Eigen::VectorXd beta = fit.beta(), theta = fit.theta();
  if (which == Which::kMu)
    beta = carry_coefficients(state.phi_mu, beta, proposal);
  else
    theta = carry_coefficients(state.phi_sigma, theta, proposal);
  const Eigen::Index extra = fit.params.size() - fit.k_mu - fit.k_sigma;
  Eigen::VectorXd init(beta.size() + theta.size() + extra);
  init << beta, theta, fit.params.tail(extra);

  FitResult candidate = fit_(new_mu, new_sigma, init);
  if (!candidate.converged || candidate.hessian_repaired) {
    out.fit_failed = true;
    return out;
  }
  out.log_alpha = candidate.sic - fit.sic +
                  std::log(proposal_ratio(out.move, k, config_.k_max, config_.probs));
  if (out.log_alpha >= 0.0 || std::log(rng.uniform()) < out.log_alpha) {
    out.accepted = true;
    current = std::move(proposal);
    state.fit = std::move(candidate);
  }
  return out;
}

ChainResult run_chain(const FitFn& fit, CovariateTable covariates, PhiState init_mu,
                      PhiState init_sigma, const ChainConfig& config,
                      const DrawCallback& on_draw) {
  if (covariates.size() == 0) throw InvalidArgument("run_chain: data is empty");
  const RjsEngine engine(fit, covariates, config);
  Rng rng(config.seed);
  ChainResult out;
  ChainState state = engine.initial_state(std::move(init_mu), std::move(init_sigma));
  const std::size_t total =
      static_cast<std::size_t>(config.burn_in) + static_cast<std::size_t>(config.n_draws);
  out.draws.reserve(static_cast<std::size_t>(config.n_draws));
  out.trace.reserve(total);
  int consecutive_failures = 0;

  auto update = [&](Which which) {
    const StepOutcome r = engine.step(state, which, rng);
    if (r.inadmissible) {
      ++out.stats.inadmissible;
      return false;
    }
    const int m = move_index(r.move);
    ++out.stats.proposed[static_cast<std::size_t>(m)];
    if (r.fit_failed) {
      ++out.stats.fit_failures;
      if (++consecutive_failures > config.max_consecutive_failures)
        throw ChainStall("more than " + std::to_string(config.max_consecutive_failures) +
                         " consecutive refits failed");
      return false;
    }
    consecutive_failures = 0;
    if (r.accepted) ++out.stats.accepted[static_cast<std::size_t>(m)];
    return r.accepted;
  };

  for (std::size_t it = 0; it < total; ++it) {
    state.iteration = it;
    TraceRow row;
    row.iteration = it;
    row.accepted_mu = update(Which::kMu);
    row.accepted_sigma = update(Which::kSigma);
    row.k_mu = state.phi_mu.k();
    row.k_sigma = state.phi_sigma.k();
    row.loglik = state.fit.loglik;
    row.sic = state.fit.sic;
    out.trace.push_back(row);
    if (it >= static_cast<std::size_t>(config.burn_in)) {
      const Eigen::VectorXd params = draw_params_normal_approx(state.fit, rng);
      out.draws.push_back(make_model_draw(state.fit, params, state.phi_mu, state.phi_sigma));
      if (on_draw) on_draw(state, out.draws.back());
    }
  }
  out.final_state = std::move(state);
  return out;
}

ChainResult run_regression_chain(RegressionKind kind, const RegressionData& data,
                                 const std::vector<BasisType>& types_mu,
                                 const std::vector<BasisType>& types_sigma,
                                 const ChainConfig& config, const DrawCallback& on_draw) {
  const FitFn fit = [kind, &data](const PhiState& mu, const PhiState& sigma,
                                  const std::optional<Eigen::VectorXd>& init) {
    return fit_mle(kind, mu, sigma, data, init);
  };
  return run_chain(fit, data.covariates(), PhiState::intercept_only(types_mu, config.k_max),
                   PhiState::intercept_only(types_sigma, config.k_max), config, on_draw);
}

}  // namespace xload
