#include "xload/core_dist.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/inverse_gaussian.hpp>
#include <boost/math/distributions/normal.hpp>

#include "xload/error.hpp"

namespace xload {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

void check_gev(const GevParams& p) {
  if (!std::isfinite(p.mu) || !std::isfinite(p.sigma) || !std::isfinite(p.xi))
    throw InvalidArgument("GEV parameters must be finite");
  if (!(p.sigma > 0.0)) throw InvalidArgument("GEV scale must be positive");
}

// Standard normal quantile of the upper tail probability q.
double normal_upper_quantile(double q) {
  static const boost::math::normal_distribution<double> unit;
  return boost::math::quantile(boost::math::complement(unit, q));
}

}  // namespace

double gev_log_pdf(double y, const GevParams& p) {
  check_gev(p);
  if (!std::isfinite(y)) throw InvalidArgument("gev_log_pdf: y must be finite");
  const double z = (y - p.mu) / p.sigma;
  if (std::fabs(p.xi) < kXiEps) return -std::log(p.sigma) - z - std::exp(-z);
  const double t = 1.0 + p.xi * z;
  if (!(t > 0.0)) return kNegInf;
  const double log_t = std::log1p(p.xi * z);
  return -std::log(p.sigma) - (1.0 + 1.0 / p.xi) * log_t -
         std::exp(-log_t / p.xi);
}

double gev_cdf(double y, const GevParams& p) {
  check_gev(p);
  const double z = (y - p.mu) / p.sigma;
  if (std::fabs(p.xi) < kXiEps) return std::exp(-std::exp(-z));
  const double t = 1.0 + p.xi * z;
  if (!(t > 0.0)) return p.xi > 0.0 ? 0.0 : 1.0;
  return std::exp(-std::exp(-std::log1p(p.xi * z) / p.xi));
}

double gev_quantile(double p_exceed, const GevParams& p) {
  check_gev(p);
  if (!(p_exceed > 0.0 && p_exceed < 1.0))
    throw InvalidArgument("gev_quantile: exceedance probability outside (0,1)");
  // w = -log(1 - p)
  const double log_w = std::log(-std::log1p(-p_exceed));
  if (std::fabs(p.xi) < kXiEps) return p.mu - p.sigma * log_w;
  return p.mu + p.sigma * std::expm1(-p.xi * log_w) / p.xi;
}

double gev_sample(const GevParams& p, Rng& rng) {
  return gev_quantile(rng.uniform(), p);
}

std::string_view to_string(WindFamily f) {
  switch (f) {
    case WindFamily::W2:
      return "W2";
    case WindFamily::W3:
      return "W3";
    case WindFamily::RAY:
      return "RAY";
    case WindFamily::LN3:
      return "LN3";
    case WindFamily::G3:
      return "G3";
    case WindFamily::IG3:
      return "IG3";
  }
  return "?";
}

std::optional<WindFamily> parse_wind_family(std::string_view name) {
  for (WindFamily f : kAllWindFamilies)
    if (to_string(f) == name) return f;
  return std::nullopt;
}

std::size_t wind_param_count(WindFamily f) {
  switch (f) {
    case WindFamily::RAY:
      return 1;
    case WindFamily::W2:
      return 2;
    default:
      return 3;
  }
}

bool wind_has_shift(WindFamily f) { return wind_param_count(f) == 3; }

bool wind_params_valid(const WindDistParams& p) {
  if (p.nu.size() != wind_param_count(p.kind)) return false;
  for (double x : p.nu)
    if (!std::isfinite(x)) return false;
  if (p.kind == WindFamily::RAY) return p.nu[0] > 0.0;
  return p.nu[0] > 0.0 && p.nu[1] > 0.0;
}

double wind_support_lower(const WindDistParams& p) {
  return wind_has_shift(p.kind) ? p.nu[2] : 0.0;
}

double wind_log_pdf(double v, const WindDistParams& p) {
  if (!wind_params_valid(p)) throw InvalidArgument("invalid wind parameters");
  if (!std::isfinite(v)) throw InvalidArgument("wind_log_pdf: v must be finite");
  const double x = v - wind_support_lower(p);
  if (x < 0.0) return kNegInf;
  const double a = p.nu[0];
  switch (p.kind) {
    case WindFamily::RAY:
      return std::log(x) - 2.0 * std::log(a) - x * x / (2.0 * a * a);
    case WindFamily::W2:
    case WindFamily::W3: {
      const double lam = p.nu[1];
      const double r = x / lam;
      return std::log(a / lam) + (a - 1.0) * std::log(r) - std::pow(r, a);
    }
    case WindFamily::LN3: {
      if (x == 0.0) return kNegInf;
      const double d = (std::log(x) - std::log(p.nu[1])) / a;
      return -std::log(x) - std::log(a) - kLogSqrt2Pi - 0.5 * d * d;
    }
    case WindFamily::G3: {
      const double theta = p.nu[1];
      return (a - 1.0) * std::log(x) - x / theta - std::lgamma(a) -
             a * std::log(theta);
    }
    case WindFamily::IG3: {
      if (x == 0.0) return kNegInf;
      const double m = p.nu[1];
      return 0.5 * (std::log(a) - std::log(2.0 * M_PI) - 3.0 * std::log(x)) -
             a * (x - m) * (x - m) / (2.0 * m * m * x);
    }
  }
  return kNegInf;
}

double wind_cdf(double v, const WindDistParams& p) {
  if (!wind_params_valid(p)) throw InvalidArgument("invalid wind parameters");
  const double x = v - wind_support_lower(p);
  if (x <= 0.0) return 0.0;
  const double a = p.nu[0];
  switch (p.kind) {
    case WindFamily::RAY:
      return -std::expm1(-x * x / (2.0 * a * a));
    case WindFamily::W2:
    case WindFamily::W3:
      return -std::expm1(-std::pow(x / p.nu[1], a));
    case WindFamily::LN3:
      return 0.5 * std::erfc(-(std::log(x) - std::log(p.nu[1])) /
                             (a * M_SQRT2));
    case WindFamily::G3:
      return boost::math::cdf(boost::math::gamma_distribution<double>(a, p.nu[1]),
                              x);
    case WindFamily::IG3:
      return boost::math::cdf(
          boost::math::inverse_gaussian_distribution<double>(p.nu[1], a), x);
  }
  return 0.0;
}

double wind_sample(const WindDistParams& p, Rng& rng) {
  if (!wind_params_valid(p)) throw InvalidArgument("invalid wind parameters");
  const double shift = wind_support_lower(p);
  const double a = p.nu[0];
  switch (p.kind) {
    case WindFamily::RAY:
      return a * std::sqrt(-2.0 * std::log(rng.uniform()));
    case WindFamily::W2:
    case WindFamily::W3:
      return shift + p.nu[1] * std::pow(-std::log(rng.uniform()), 1.0 / a);
    case WindFamily::LN3:
      return shift + std::exp(std::log(p.nu[1]) + a * rng.normal());
    case WindFamily::G3: {
      std::gamma_distribution<double> gamma(a, p.nu[1]);
      return shift + gamma(rng.engine());
    }
    case WindFamily::IG3: {
      // Michael, Schucany and Haas transformation with one rejection.
      const double m = p.nu[1];
      const double z = rng.normal();
      const double nu = z * z;
      const double x = m + m * m * nu / (2.0 * a) -
                       m / (2.0 * a) * std::sqrt(4.0 * m * a * nu + m * m * nu * nu);
      const double u = rng.uniform();
      return shift + (u <= m / (m + x) ? x : m * m / x);
    }
  }
  return shift;
}

double log_normal_cdf(double c) {
  if (c > -30.0) return std::log(0.5 * std::erfc(-c / M_SQRT2));
  // Asymptotic Mills-ratio expansion.
  const double c2 = c * c;
  const double series = 1.0 - 1.0 / c2 + 3.0 / (c2 * c2) - 15.0 / (c2 * c2 * c2);
  return -0.5 * c2 - kLogSqrt2Pi - std::log(-c) + std::log(series);
}

double normal_inverse_mills(double c) {
  if (c > -30.0) {
    const double phi = std::exp(-0.5 * c * c - kLogSqrt2Pi);
    return phi / (0.5 * std::erfc(-c / M_SQRT2));
  }
  const double c2 = c * c;
  const double series = 1.0 - 1.0 / c2 + 3.0 / (c2 * c2) - 15.0 / (c2 * c2 * c2);
  return -c / series;
}

double trunc_norm_log_pdf(double s, const TruncNormParams& p) {
  if (!(p.delta > 0.0) || !std::isfinite(p.eta))
    throw InvalidArgument("truncated normal needs finite eta and delta > 0");
  if (!std::isfinite(s)) throw InvalidArgument("trunc_norm_log_pdf: s must be finite");
  if (s < p.lower) return kNegInf;
  const double z = (s - p.eta) / p.delta;
  double log_mass = 0.0;
  if (std::isfinite(p.lower)) log_mass = log_normal_cdf((p.eta - p.lower) / p.delta);
  return -0.5 * z * z - std::log(p.delta) - kLogSqrt2Pi - log_mass;
}

double trunc_norm_sample(const TruncNormParams& p, Rng& rng) {
  if (!(p.delta > 0.0) || !std::isfinite(p.eta))
    throw InvalidArgument("truncated normal needs finite eta and delta > 0");
  if (!std::isfinite(p.lower)) return p.eta + p.delta * rng.normal();
  const double alpha = (p.lower - p.eta) / p.delta;
  if (alpha < 0.5) {
    // Plain rejection accepts with probability >= 0.3.
    for (;;) {
      const double z = rng.normal();
      if (z > alpha) return p.eta + p.delta * z;
    }
  }
  // Inverse CDF on the upper tail: P(Z > z) = u * P(Z > alpha).
  const double tail = 0.5 * std::erfc(alpha / M_SQRT2);
  double z = normal_upper_quantile(rng.uniform() * tail);
  if (!(z > alpha)) z = std::nextafter(alpha, std::numeric_limits<double>::infinity());
  return p.eta + p.delta * z;
}

namespace {
constexpr double kMinutesPerYear = 365.25 * 24.0 * 60.0;
}

double target_exceedance(double t_years) {
  if (!(t_years > 0.0) || !std::isfinite(t_years))
    throw InvalidArgument("target_exceedance: T must be positive");
  return 10.0 / (t_years * kMinutesPerYear);
}

double years_for_exceedance(double p) {
  if (!(p > 0.0 && p <= 1.0))
    throw InvalidArgument("years_for_exceedance: p outside (0,1]");
  return 10.0 / (p * kMinutesPerYear);
}

}  // namespace xload
