#pragma once

// Run configuration: flat key=value settings with a desk-scale default
// profile and a full-scale profile.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "xload/mars_basis.hpp"

namespace xload {

struct RunConfig {
  std::uint64_t seed = 1;
  std::vector<double> t_years{20.0, 50.0};

  int burn_in = 200;
  int m_l = 500;
  int m_w = 100;
  int n_w = 100;
  int n_l = 100;
  int k_max = 40;
  // "vs" models the load on wind speed and turbulence, "v" on speed only.
  std::string covariates = "vs";
  std::vector<BasisType> types_mu{BasisType::kV, BasisType::kS, BasisType::kVS};
  std::vector<BasisType> types_sigma{BasisType::kV, BasisType::kS};

  int v_bins = 10;
  int s_bins = 6;
  double exclusion_threshold = 0.5;

  std::vector<double> score_taus{0.9, 0.99};
  std::vector<double> score_bs{0.0, 1.0, 2.0};
  std::vector<double> tau_sweep{0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99};
  int score_repeats = 10;
  double split_frac = 0.8;
  int posterior_draws = 50;

  std::string band_axis = "v";
  int band_points = 20;
  double band_halfwidth = 0.5;

  std::size_t sim_blocks = 1000;
  std::size_t sim_block_size = 1000;
  std::vector<double> sim_weibull{2.0, 8.0, 3.0};
  std::size_t ref_datasets = 100;
  std::size_t ref_size = 100000;
  std::vector<double> ref_probs{1e-4, 1e-5};

  bool use_s() const { return covariates == "vs"; }

  // Throws InvalidArgument for unknown keys or unparsable values.
  void set(const std::string& key, const std::string& value);
  void load_file(const std::filesystem::path& path);
  void apply_paper_scale();
  void validate() const;

  // Every setting as canonical key=value text, in a fixed order.
  std::vector<std::pair<std::string, std::string>> entries() const;
  // FNV-1a over the canonical entries.
  std::uint64_t hash() const;
};

std::string format_double(double x);
std::string format_list(const std::vector<double>& x);
std::vector<double> parse_double_list(const std::string& text);

}  // namespace xload
