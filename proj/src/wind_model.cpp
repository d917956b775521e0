#include "xload/wind_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "xload/error.hpp"
#include "xload/optimize.hpp"

namespace xload {

namespace {

constexpr double kShiftMargin = 1e-6;

struct Moments {
  double mean = 0.0;
  double var = 0.0;
  double min = 0.0;
};

Moments moments(const std::vector<double>& v, double shift = 0.0) {
  Moments m;
  m.min = std::numeric_limits<double>::infinity();
  for (double x : v) {
    m.mean += x - shift;
    m.min = std::min(m.min, x);
  }
  m.mean /= static_cast<double>(v.size());
  for (double x : v) m.var += (x - shift - m.mean) * (x - shift - m.mean);
  m.var /= static_cast<double>(v.size() - 1);
  return m;
}

// Method-of-moments start for the shift-free part of each family.
Eigen::VectorXd moment_start(WindFamily kind, const std::vector<double>& v, double shift) {
  const Moments m = moments(v, shift);
  const double sd = std::sqrt(std::max(m.var, 1e-12));
  const double mean = std::max(m.mean, 1e-6);
  Eigen::VectorXd w(static_cast<Eigen::Index>(wind_param_count(kind)));
  switch (kind) {
    case WindFamily::RAY: {
      double sq = 0.0;
      for (double x : v) sq += x * x;
      w[0] = 0.5 * std::log(sq / (2.0 * static_cast<double>(v.size())));
      return w;
    }
    case WindFamily::W2:
    case WindFamily::W3: {
      const double k = std::clamp(std::pow(sd / mean, -1.086), 0.2, 50.0);
      w[0] = std::log(k);
      w[1] = std::log(mean / std::tgamma(1.0 + 1.0 / k));
      break;
    }
    case WindFamily::LN3: {
      double ml = 0.0, sl = 0.0;
      for (double x : v) ml += std::log(x - shift);
      ml /= static_cast<double>(v.size());
      for (double x : v) sl += std::pow(std::log(x - shift) - ml, 2);
      sl = std::sqrt(sl / static_cast<double>(v.size() - 1));
      w[0] = std::log(std::max(sl, 1e-6));
      w[1] = ml;
      break;
    }
    case WindFamily::G3:
      w[0] = std::log(mean * mean / (sd * sd));
      w[1] = std::log(sd * sd / mean);
      break;
    case WindFamily::IG3:
      w[0] = std::log(mean * mean * mean / (sd * sd));
      w[1] = std::log(mean);
      break;
  }
  if (wind_has_shift(kind)) w[2] = shift;
  return w;
}

}  // namespace

WindDistParams wind_params_from_working(WindFamily kind, const Eigen::VectorXd& w) {
  WindDistParams p;
  p.kind = kind;
  p.nu.resize(wind_param_count(kind));
  if (static_cast<std::size_t>(w.size()) != p.nu.size())
    throw InvalidArgument("working vector has the wrong length");
  p.nu[0] = std::exp(w[0]);
  if (p.nu.size() > 1) p.nu[1] = std::exp(w[1]);
  if (p.nu.size() > 2) p.nu[2] = w[2];
  return p;
}

double WindFit::sic(WindFamily f) const {
  for (const WindFamilyFit& row : table)
    if (row.kind == f && row.ok) return row.sic;
  return -std::numeric_limits<double>::infinity();
}

WindFamilyFit fit_wind_family(WindFamily kind, const std::vector<double>& v) {
  WindFamilyFit out;
  out.kind = kind;
  const std::size_t d = wind_param_count(kind);
  if (v.size() < d + 2) {
    out.diagnostic = "too few observations";
    return out;
  }
  for (double x : v)
    if (!std::isfinite(x)) throw InvalidArgument("wind speeds must be finite");
  const Moments m = moments(v);
  if (!wind_has_shift(kind) && m.min <= 0.0) {
    out.diagnostic = "nonpositive speeds outside the support";
    return out;
  }

  const ObjectiveFn objective = [&](const Eigen::VectorXd& w) {
    const WindDistParams p = wind_params_from_working(kind, w);
    if (!wind_params_valid(p)) return std::numeric_limits<double>::infinity();
    double ll = 0.0;
    for (double x : v) {
      const double lp = wind_log_pdf(x, p);
      ll += std::isfinite(lp) ? lp : kLogDensityFloor;
    }
    return -ll;
  };
  Box box = Box::unbounded(static_cast<Eigen::Index>(d));
  std::vector<Eigen::VectorXd> starts;
  if (wind_has_shift(kind)) {
    box.upper[2] = m.min - kShiftMargin;
    const double sd = std::sqrt(m.var);
    for (double frac : {0.1, 1.0, 3.0}) {
      const double shift = m.min - frac * sd;
      starts.push_back(moment_start(kind, v, shift));
    }
  } else {
    starts.push_back(moment_start(kind, v, 0.0));
  }

  MinimizeOptions opts;
  opts.max_iterations = 1000;
  opts.grad_tol = 1e-8;
  MinimizeResult best;
  bool have = false;
  for (const Eigen::VectorXd& s : starts) {
    if (!s.allFinite()) continue;
    MinimizeResult r = minimize_bfgs(objective, nullptr, s, box, opts);
    if (!have || (r.converged && !best.converged) ||
        (r.converged == best.converged && r.value < best.value)) {
      best = std::move(r);
      have = true;
    }
  }
  if (!have || !best.converged || !std::isfinite(best.value) || best.value >= 1e299) {
    out.diagnostic = "maximum likelihood did not converge";
    return out;
  }
  out.working = best.x;
  out.nu = wind_params_from_working(kind, best.x);
  out.loglik = -best.value;
  out.sic = schwarz_criterion(out.loglik, static_cast<int>(d), v.size());
  const ObjectiveFn ll = [&](const Eigen::VectorXd& w) { return -objective(w); };
  Eigen::MatrixXd neg_h = -hessian_from_values(ll, best.x);
  if (!neg_h.allFinite()) {
    out.diagnostic = "Hessian is not finite";
    return out;
  }
  CovarianceResult cov = invert_negative_hessian(neg_h);
  if (cov.repaired) {
    out.diagnostic = "observed information is not positive definite";
    return out;
  }
  out.working_cov = std::move(cov.covariance);
  out.ok = true;
  return out;
}

WindFit select_wind_family(const std::vector<double>& v) {
  if (v.size() < 30) throw InvalidArgument("wind family selection needs at least 30 speeds");
  WindFit out;
  const WindFamilyFit* best = nullptr;
  out.table.reserve(std::size(kAllWindFamilies));
  for (WindFamily f : kAllWindFamilies) out.table.push_back(fit_wind_family(f, v));
  for (const WindFamilyFit& row : out.table)
    if (row.ok && (best == nullptr || row.sic > best->sic)) best = &row;
  if (best == nullptr) throw NumericError("no wind-speed family could be fitted");
  out.chosen = best->kind;
  out.nu_hat = best->nu;
  out.working_hat = best->working;
  out.nu_cov = best->working_cov;
  return out;
}

WindDistParams draw_wind_params(const WindFit& fit, Rng& rng) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    const Eigen::VectorXd w = draw_multivariate_normal(fit.working_hat, fit.nu_cov, rng);
    if (!w.allFinite()) continue;
    WindDistParams p = wind_params_from_working(fit.chosen, w);
    if (wind_params_valid(p)) return p;
  }
  throw NumericError("wind parameter draws stayed outside the valid region");
}

TurbulenceFit fit_turbulence(const std::vector<double>& v, const std::vector<double>& s,
                             const ChainConfig& config) {
  if (v.size() != s.size()) throw InvalidArgument("turbulence data columns differ in length");
  RegressionData data;
  data.v = v;
  data.y = s;
  for (double x : s)
    if (!(x >= 0.0) || !std::isfinite(x))
      throw InvalidArgument("turbulence values must be finite and nonnegative");
  ChainResult chain = run_regression_chain(RegressionKind::kTruncNormal, data, {BasisType::kV},
                                           {BasisType::kV}, config);
  TurbulenceFit out;
  out.draws = std::move(chain.draws);
  out.stats = chain.stats;
  out.trace = std::move(chain.trace);
  return out;
}

std::vector<WindPair> sample_wind_joint(const WindFit& wind, const TurbulenceFit* turb,
                                        int m_w, int n_w, Rng& rng) {
  if (m_w < 1 || n_w < 1) throw InvalidArgument("m_w and n_w must be positive");
  if (turb != nullptr && turb->draws.empty())
    throw InvalidArgument("turbulence fit has no posterior draws");
  std::vector<WindPair> out;
  out.reserve(static_cast<std::size_t>(m_w) * static_cast<std::size_t>(n_w));
  for (int j = 0; j < m_w; ++j) {
    const WindDistParams nu = draw_wind_params(wind, rng);
    const ModelDraw* t =
        turb ? &turb->draws[static_cast<std::size_t>(j) % turb->draws.size()] : nullptr;
    for (int i = 0; i < n_w; ++i) {
      WindPair p;
      p.v = wind_sample(nu, rng);
      if (t) {
        const TruncNormParams tn{t->location(p.v, 0.0), t->scale(p.v, 0.0), 0.0};
        p.s = trunc_norm_sample(tn, rng);
      }
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace xload
