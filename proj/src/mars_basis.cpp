#include "xload/mars_basis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "xload/error.hpp"

namespace xload {

namespace {

double hinge(int sign, double x, double knot) {
  return std::max(0.0, sign * (x - knot));
}

}  // namespace

void PhiState::validate() const {
  if (k_max < 1) throw InvalidState("k_max must be at least 1");
  if (k() > k_max)
    throw InvalidState("basis has K=" + std::to_string(k()) + " above k_max=" +
                       std::to_string(k_max));
  if (allowed_types.empty()) throw InvalidState("no basis types allowed");
  for (const BasisTerm& t : terms) {
    if (std::find(allowed_types.begin(), allowed_types.end(), t.type) ==
        allowed_types.end())
      throw InvalidState("basis term type not in the allowed set");
    for (std::size_t j = 0; j < t.factor_count(); ++j)
      if (t.signs[j] != 1 && t.signs[j] != -1)
        throw InvalidState("basis sign must be +1 or -1");
  }
}

PhiState PhiState::intercept_only(std::vector<BasisType> allowed, int k_max) {
  PhiState phi;
  phi.allowed_types = std::move(allowed);
  phi.k_max = k_max;
  return phi;
}

double eval_basis(const BasisTerm& term, double v, double s) {
  switch (term.type) {
    case BasisType::kV:
      return hinge(term.signs[0], v, term.knots[0]);
    case BasisType::kS:
      return hinge(term.signs[0], s, term.knots[0]);
    case BasisType::kVS:
      return hinge(term.signs[0], v, term.knots[0]) *
             hinge(term.signs[1], s, term.knots[1]);
  }
  return 0.0;
}

Eigen::VectorXd design_row(const PhiState& phi, double v, double s) {
  Eigen::VectorXd row(phi.k());
  row[0] = 1.0;
  for (std::size_t k = 0; k < phi.terms.size(); ++k)
    row[static_cast<Eigen::Index>(k) + 1] = eval_basis(phi.terms[k], v, s);
  return row;
}

Eigen::MatrixXd design_matrix(const PhiState& phi, const CovariateTable& x) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd m(n, phi.k());
  m.col(0).setOnes();
  for (std::size_t k = 0; k < phi.terms.size(); ++k) {
    const BasisTerm& t = phi.terms[k];
    auto col = m.col(static_cast<Eigen::Index>(k) + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s = x.s.empty() ? 0.0 : x.s[static_cast<std::size_t>(i)];
      col[i] = eval_basis(t, x.v[static_cast<std::size_t>(i)], s);
    }
  }
  return m;
}

double log_prior_phi(const PhiState& phi, std::size_t n_obs) {
  if (n_obs < 1) throw InvalidArgument("log_prior_phi: need at least one observation");
  phi.validate();
  const double log_inv_n = -std::log(static_cast<double>(n_obs));
  const double log_type = -std::log(static_cast<double>(phi.allowed_types.size()));
  double lp = log_inv_n;  // p(K) = 1/n
  for (const BasisTerm& t : phi.terms) {
    lp += log_type;
    const auto factors = static_cast<double>(t.factor_count());
    lp += factors * (std::log(0.5) + log_inv_n);
  }
  return lp;
}

const char* to_string(Move m) {
  switch (m) {
    case Move::kBirth:
      return "BIRTH";
    case Move::kDeath:
      return "DEATH";
    case Move::kMove:
      return "MOVE";
  }
  return "?";
}

BasisTerm draw_term(const std::vector<BasisType>& allowed, const CovariateTable& x,
                    Rng& rng) {
  if (allowed.empty()) throw InvalidState("no basis types allowed");
  if (x.size() == 0) throw InvalidArgument("knot pool is empty");
  BasisTerm t;
  t.type = allowed[rng.index(allowed.size())];
  auto sign = [&rng] { return rng.uniform() < 0.5 ? -1 : 1; };
  auto knot_from = [&](std::span<const double> pool) {
    if (pool.empty()) throw InvalidArgument("basis type needs a missing covariate");
    return pool[rng.index(pool.size())];
  };
  switch (t.type) {
    case BasisType::kV:
      t.signs[0] = sign();
      t.knots[0] = knot_from(x.v);
      break;
    case BasisType::kS:
      t.signs[0] = sign();
      t.knots[0] = knot_from(x.s);
      break;
    case BasisType::kVS:
      t.signs[0] = sign();
      t.knots[0] = knot_from(x.v);
      t.signs[1] = sign();
      t.knots[1] = knot_from(x.s);
      break;
  }
  return t;
}

PhiState propose(const PhiState& phi, Move action, const CovariateTable& x, Rng& rng) {
  PhiState out = phi;
  switch (action) {
    case Move::kBirth:
      if (phi.k() >= phi.k_max) throw IllegalMove("BIRTH at k_max");
      out.terms.push_back(draw_term(phi.allowed_types, x, rng));
      break;
    case Move::kDeath:
    case Move::kMove: {
      if (phi.k() < 2)
        throw IllegalMove(std::string(to_string(action)) + " needs K >= 2");
      const std::size_t victim = rng.index(phi.terms.size());
      out.terms.erase(out.terms.begin() + static_cast<std::ptrdiff_t>(victim));
      if (action == Move::kMove) out.terms.push_back(draw_term(phi.allowed_types, x, rng));
      break;
    }
  }
  return out;
}

Eigen::VectorXd carry_coefficients(const PhiState& from, const Eigen::VectorXd& coef,
                                   const PhiState& to) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(to.k());
  out[0] = coef[0];
  std::vector<bool> used(from.terms.size(), false);
  for (std::size_t j = 0; j < to.terms.size(); ++j) {
    for (std::size_t i = 0; i < from.terms.size(); ++i) {
      if (!used[i] && from.terms[i] == to.terms[j]) {
        used[i] = true;
        out[static_cast<Eigen::Index>(j) + 1] = coef[static_cast<Eigen::Index>(i) + 1];
        break;
      }
    }
  }
  return out;
}

std::vector<BasisType> parse_basis_types(std::string_view text) {
  std::vector<BasisType> out;
  for (char c : text) {
    if (c == ',' || c == ' ') continue;
    if (c < '1' || c > '3') throw InvalidArgument("basis types must be drawn from 1,2,3");
    const auto t = static_cast<BasisType>(c - '0');
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
  }
  if (out.empty()) throw InvalidArgument("empty basis type list");
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace xload
