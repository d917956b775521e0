#include "xload/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "xload/error.hpp"
#include "xload/stats.hpp"

namespace xload {

void SimConfig::validate() const {
  if (n_blocks < 1 || block_size < 1) throw InvalidArgument("simulation counts must be positive");
  if (!wind_params_valid(weibull)) throw InvalidArgument("invalid wind distribution for the simulation");
}

double sim_mu(double x_block_mean, double x_point) {
  double mu = 1.5 / (1.0 + 48.0 * std::exp(-0.3 * x_point));
  if (x_block_mean >= kSimRatedSpeed)
    mu += 0.5 - 0.0016 * (x_block_mean + x_block_mean * x_block_mean);
  return mu;
}

double sim_sigma(double x_point) {
  if (!(x_point > 1.0)) return kSimSigmaFloor;
  return std::max(kSimSigmaFloor, 0.1 * std::log(x_point));
}

TenMinRecord sim_block(const SimConfig& config, Rng& rng) {
  const double x = wind_sample(config.weibull, rng);
  double y = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < config.block_size; ++j) {
    const double xj = x + rng.normal();
    const double z = rng.normal();
    y = std::max(y, sim_mu(x, xj) + sim_sigma(xj) * z);
  }
  return {x, 0.0, y};
}

RecordTable generate_training(const SimConfig& config, Rng& rng) {
  config.validate();
  RecordTable out;
  out.reserve(config.n_blocks);
  for (std::size_t i = 0; i < config.n_blocks; ++i) out.push_back(sim_block(config, rng));
  return out;
}

ReferenceQuantiles generate_reference_quantiles(const SimConfig& config, std::size_t n_datasets,
                                                std::size_t dataset_size,
                                                const std::vector<double>& probs, Rng& rng) {
  config.validate();
  if (n_datasets < 1 || dataset_size < 1) throw InvalidArgument("reference counts must be positive");
  if (probs.empty()) throw InvalidArgument("reference quantiles need probabilities");
  for (double p : probs)
    if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("probability outside (0,1)");
  const double p_max = *std::max_element(probs.begin(), probs.end());
  ReferenceQuantiles out;
  out.probs = probs;
  for (std::size_t d = 0; d < n_datasets; ++d) {
    Rng stream = rng.split();
    TailPool pool(TailPool::capacity_for(dataset_size, p_max));
    for (std::size_t i = 0; i < dataset_size; ++i) pool.push(sim_block(config, stream).y);
    std::vector<double> row;
    for (double p : probs) row.push_back(pool.upper_tail_quantile(p).value);
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace xload
