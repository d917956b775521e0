#pragma once

// End-to-end runs shared by the command-line tool and the acceptance checks.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xload/binning.hpp"
#include "xload/config.hpp"
#include "xload/extreme_estimator.hpp"
#include "xload/io.hpp"
#include "xload/random.hpp"
#include "xload/scoring.hpp"
#include "xload/simgen.hpp"
#include "xload/wind_model.hpp"

namespace xload {

// Independent streams derived from the run seed in a fixed order, so every
// command sees the same wind pairs for the same seed.
struct Streams {
  Rng wind;
  Rng sim;
  Rng reference;
  Rng binned;
  Rng score;
  Rng band;
  std::uint64_t chain_seed;
  std::uint64_t turbulence_seed;
};

Streams make_streams(std::uint64_t seed);

Metadata run_metadata(const RunConfig& config, const std::string& command);

ChainConfig chain_config(const RunConfig& config, std::uint64_t seed);
std::vector<ExtremeTarget> year_targets(const RunConfig& config);

struct WindStage {
  WindFit wind;
  std::optional<TurbulenceFit> turbulence;
  std::vector<WindPair> pairs;
};

WindStage run_wind_stage(const RecordTable& data, const RunConfig& config, Streams& streams);

struct SplineRun {
  WindStage wind;
  SplineEstimate estimate;
};

SplineRun run_spline(const RecordTable& data, const RunConfig& config,
                     const std::vector<ExtremeTarget>& targets);

struct BinnedRun {
  WindStage wind;
  BinnedModel model;
  std::vector<QuantileResult> results;
};

BinGrid default_grid(const RecordTable& data, const RunConfig& config);
BinnedRun run_binned(const RecordTable& data, const RunConfig& config,
                     const std::vector<ExtremeTarget>& targets);

struct ScoreRun {
  Comparison table;
  Comparison sweep;
  std::vector<BinDifference> differences;
};

ScoreRun run_score(const RecordTable& data, const RunConfig& config);

struct BandPoint {
  double center = 0.0;
  std::optional<CredibleInterval> interval;
};

std::vector<BandPoint> run_credible_band(const RecordTable& data, const RunConfig& config);

SimConfig sim_config(const RunConfig& config);

struct VerdictCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SimReplication {
  ReferenceQuantiles reference;
  std::vector<ExtremeTarget> targets;  // reference probabilities, then T-year targets
  std::vector<QuantileResult> spline;
  std::vector<QuantileResult> binned;
  WindFamily wind_family = WindFamily::W2;
  ChainStats chain_stats;
  double xi_shared = 0.0;
  double spline_parameters = 0.0;
  int binned_parameters = 0;
  std::vector<VerdictCheck> verdict;

  bool all_pass() const;
};

SimReplication replicate_sim(const RunConfig& config);

// Model sizes: K_mu + K_sigma + 1 averaged over posterior draws, and two
// parameters per fitted bin plus the shared shape.
double spline_parameter_count(const std::vector<ModelDraw>& draws);
int binned_parameter_count(const BinnedModel& model);

// Numeric payload of a replication as key=value entries.
Metadata replication_payload(const SimReplication& rep);
Metadata quantile_payload(const QuantileResult& r, const std::string& method, std::uint64_t seed);

}  // namespace xload
