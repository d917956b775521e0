#pragma once

// Synthetic single-covariate load data: block means from a three-parameter
// Weibull, within-block speeds around them and a normal load response whose
// block maximum is the observed load.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "xload/core_dist.hpp"
#include "xload/random.hpp"
#include "xload/record.hpp"

namespace xload {

struct SimConfig {
  std::size_t n_blocks = 1000;
  std::size_t block_size = 1000;
  WindDistParams weibull{WindFamily::W3, {2.0, 8.0, 3.0}};
  std::uint64_t seed = 1;

  void validate() const;
};

inline constexpr double kSimRatedSpeed = 17.0;
inline constexpr double kSimSigmaFloor = 1e-4;

double sim_mu(double x_block_mean, double x_point);
double sim_sigma(double x_point);

// One block: its mean speed and maximum load.
TenMinRecord sim_block(const SimConfig& config, Rng& rng);

// n_blocks records with v = block mean, s = 0, y = block maximum.
RecordTable generate_training(const SimConfig& config, Rng& rng);

struct ReferenceQuantiles {
  std::vector<double> probs;
  // One row per dataset, one column per probability.
  std::vector<std::vector<double>> rows;
};

// Upper-tail empirical quantiles of independent simulated datasets. Each
// dataset uses its own stream split from rng.
ReferenceQuantiles generate_reference_quantiles(const SimConfig& config, std::size_t n_datasets,
                                                std::size_t dataset_size,
                                                const std::vector<double>& probs, Rng& rng);

}  // namespace xload
