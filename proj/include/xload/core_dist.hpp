#pragma once

// Closed-form probability machinery: the GEV family, the six candidate
// wind-speed families and the truncated normal used for turbulence.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xload/random.hpp"

namespace xload {

// |xi| below this switches the GEV to its Gumbel limit.
inline constexpr double kXiEps = 1e-8;

// Finite stand-in for log(0) inside optimizers. User-facing densities return
// -infinity instead.
inline constexpr double kLogDensityFloor = -1e300;

struct GevParams {
  double mu = 0.0;     // location
  double sigma = 1.0;  // scale, > 0
  double xi = 0.0;     // shape
};

double gev_log_pdf(double y, const GevParams& p);
double gev_cdf(double y, const GevParams& p);
// Level l with P[Y > l] = p_exceed.
double gev_quantile(double p_exceed, const GevParams& p);
double gev_sample(const GevParams& p, Rng& rng);

// Candidate families for the 10-minute mean wind speed.
enum class WindFamily { W2, W3, RAY, LN3, G3, IG3 };

inline constexpr WindFamily kAllWindFamilies[] = {
    WindFamily::W2,  WindFamily::W3, WindFamily::RAY,
    WindFamily::LN3, WindFamily::G3, WindFamily::IG3};

std::string_view to_string(WindFamily f);
std::optional<WindFamily> parse_wind_family(std::string_view name);
std::size_t wind_param_count(WindFamily f);
bool wind_has_shift(WindFamily f);

// Parameter layout per family (nu):
//   W2  (shape k, scale lambda)
//   W3  (shape k, scale lambda, shift c)
//   RAY (scale b)
//   LN3 (shape = sdlog, scale = exp(meanlog), shift c)
//   G3  (shape alpha, scale theta, shift c)
//   IG3 (shape lambda, scale = mean m, shift c)
struct WindDistParams {
  WindFamily kind = WindFamily::W2;
  std::vector<double> nu;
};

bool wind_params_valid(const WindDistParams& p);
// Lower end of the support (0 or the shift).
double wind_support_lower(const WindDistParams& p);
double wind_log_pdf(double v, const WindDistParams& p);
double wind_cdf(double v, const WindDistParams& p);
double wind_sample(const WindDistParams& p, Rng& rng);

// Normal truncated to (lower, inf).
struct TruncNormParams {
  double eta = 0.0;    // location
  double delta = 1.0;  // scale, > 0
  double lower = 0.0;
};

double trunc_norm_log_pdf(double s, const TruncNormParams& p);
double trunc_norm_sample(const TruncNormParams& p, Rng& rng);

// log Phi(c), accurate far into the lower tail.
double log_normal_cdf(double c);
// phi(c) / Phi(c).
double normal_inverse_mills(double c);

// Probability that a 10-minute maximum exceeds the T-year level.
double target_exceedance(double t_years);
// Inverse of target_exceedance.
double years_for_exceedance(double p);

}  // namespace xload
