#pragma once

// Variable-dimension hinge-basis machinery (Bayesian MARS): basis terms,
// knot configurations, their uniform prior and design rows.

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "xload/random.hpp"

namespace xload {

// Basis types: 1 = hinge in v, 2 = hinge in s, 3 = product of both.
enum class BasisType : int { kV = 1, kS = 2, kVS = 3 };

struct BasisTerm {
  BasisType type = BasisType::kV;
  // For kV and kS only element 0 is used; kVS uses (v, s) in that order.
  std::array<int, 2> signs{1, 1};
  std::array<double, 2> knots{0.0, 0.0};

  std::size_t factor_count() const { return type == BasisType::kVS ? 2 : 1; }
  friend bool operator==(const BasisTerm&, const BasisTerm&) = default;
};

// phi = (K, Lambda_2 .. Lambda_K). The intercept is implicit, so
// K = terms.size() + 1.
struct PhiState {
  std::vector<BasisTerm> terms;
  std::vector<BasisType> allowed_types{BasisType::kV};
  int k_max = 40;

  int k() const { return static_cast<int>(terms.size()) + 1; }
  // Throws InvalidState when the invariants do not hold.
  void validate() const;

  static PhiState intercept_only(std::vector<BasisType> allowed, int k_max = 40);
};

// Observed covariates; knots are drawn from these values.
struct CovariateTable {
  std::span<const double> v;
  std::span<const double> s;
  std::size_t size() const { return v.size(); }
};

double eval_basis(const BasisTerm& term, double v, double s);
// Length K; entry 0 is the intercept.
Eigen::VectorXd design_row(const PhiState& phi, double v, double s);
// n x K design matrix for the table.
Eigen::MatrixXd design_matrix(const PhiState& phi, const CovariateTable& x);

double log_prior_phi(const PhiState& phi, std::size_t n_obs);

enum class Move { kBirth, kDeath, kMove };

const char* to_string(Move m);

// BIRTH appends a uniformly drawn term, DEATH removes a uniformly chosen term,
// MOVE is DEATH followed by BIRTH. DEATH and MOVE on K = 1 throw IllegalMove.
PhiState propose(const PhiState& phi, Move action, const CovariateTable& x, Rng& rng);

// Draws one term from the prior over allowed types, signs and knots.
BasisTerm draw_term(const std::vector<BasisType>& allowed, const CovariateTable& x,
                    Rng& rng);

// Carries coefficients of the surviving terms from an old basis to a new
// one; new terms get zero. Useful as a warm start.
Eigen::VectorXd carry_coefficients(const PhiState& from, const Eigen::VectorXd& coef,
                                   const PhiState& to);

// Parses "1,2,3"-style lists of basis types.
std::vector<BasisType> parse_basis_types(std::string_view text);

}  // namespace xload
