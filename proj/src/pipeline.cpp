#include "xload/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "xload/error.hpp"
#include "xload/stats.hpp"

#ifndef XLOAD_VERSION
#define XLOAD_VERSION "unknown"
#endif

namespace xload {

Streams make_streams(std::uint64_t seed) {
  Rng master(seed);
  Streams s{master.split(), master.split(), master.split(), master.split(),
            master.split(), master.split(), 0,              0};
  s.chain_seed = master.engine()();
  s.turbulence_seed = master.engine()();
  return s;
}

Metadata run_metadata(const RunConfig& config, const std::string& command) {
  char hash[20];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config.hash()));
  return {{"command", command},
          {"version", XLOAD_VERSION},
          {"config_hash", hash},
          {"seed", std::to_string(config.seed)},
          {"burn_in", std::to_string(config.burn_in)},
          {"m_l", std::to_string(config.m_l)},
          {"m_w", std::to_string(config.m_w)},
          {"n_w", std::to_string(config.n_w)},
          {"n_l", std::to_string(config.n_l)},
          {"covariates", config.covariates},
          {"sim_weibull", format_list(config.sim_weibull)}};
}

ChainConfig chain_config(const RunConfig& config, std::uint64_t seed) {
  ChainConfig c;
  c.burn_in = config.burn_in;
  c.n_draws = config.m_l;
  c.seed = seed;
  c.k_max = config.k_max;
  return c;
}

std::vector<ExtremeTarget> year_targets(const RunConfig& config) {
  std::vector<ExtremeTarget> out;
  for (double t : config.t_years) out.push_back(ExtremeTarget::from_years(t));
  return out;
}

WindStage run_wind_stage(const RecordTable& data, const RunConfig& config, Streams& streams) {
  std::vector<double> v, s;
  for (const TenMinRecord& r : data) {
    v.push_back(r.v);
    s.push_back(r.s);
  }
  WindStage out;
  out.wind = select_wind_family(v);
  if (config.use_s()) {
    ChainConfig tc = chain_config(config, streams.turbulence_seed);
    tc.n_draws = config.m_w;
    out.turbulence = fit_turbulence(v, s, tc);
  }
  out.pairs = sample_wind_joint(out.wind, out.turbulence ? &*out.turbulence : nullptr, config.m_w,
                                config.n_w, streams.wind);
  return out;
}

namespace {

EstimateOptions estimate_options(const RunConfig& config, std::uint64_t seed) {
  EstimateOptions o;
  o.chain = chain_config(config, seed);
  o.n_l = config.n_l;
  o.types_mu = config.types_mu;
  o.types_sigma = config.types_sigma;
  o.use_s = config.use_s();
  return o;
}

ChainResult spline_chain(const RecordTable& data, const RunConfig& config, std::uint64_t seed) {
  const EstimateOptions o = estimate_options(config, seed);
  std::vector<BasisType> mu = o.types_mu, sigma = o.types_sigma;
  if (!o.use_s) mu = sigma = {BasisType::kV};
  return run_regression_chain(RegressionKind::kGev, RegressionData::loads(data, o.use_s), mu, sigma,
                              o.chain);
}

}  // namespace

SplineRun run_spline(const RecordTable& data, const RunConfig& config,
                     const std::vector<ExtremeTarget>& targets) {
  config.validate();
  Streams streams = make_streams(config.seed);
  SplineRun out;
  out.wind = run_wind_stage(data, config, streams);
  out.estimate =
      estimate_extreme_load(data, out.wind.pairs, estimate_options(config, streams.chain_seed), targets);
  return out;
}

BinGrid default_grid(const RecordTable& data, const RunConfig& config) {
  return BinGrid::equal_width(data, config.v_bins, config.use_s() ? config.s_bins : 1);
}

BinnedRun run_binned(const RecordTable& data, const RunConfig& config,
                     const std::vector<ExtremeTarget>& targets) {
  config.validate();
  Streams streams = make_streams(config.seed);
  BinnedRun out;
  out.wind = run_wind_stage(data, config, streams);
  out.model = fit_binned(data, default_grid(data, config));
  out.results = binned_extreme_load(out.model, out.wind.pairs, targets, config.m_l, config.n_l,
                                    streams.binned);
  return out;
}

ScoreRun run_score(const RecordTable& data, const RunConfig& config) {
  config.validate();
  Streams streams = make_streams(config.seed);
  CompareOptions o;
  o.taus = config.score_taus;
  for (double t : config.tau_sweep)
    if (std::find(o.taus.begin(), o.taus.end(), t) == o.taus.end()) o.taus.push_back(t);
  o.bs = config.score_bs;
  if (std::find(o.bs.begin(), o.bs.end(), 1.0) == o.bs.end()) o.bs.push_back(1.0);
  o.n_repeats = config.score_repeats;
  o.split_frac = config.split_frac;
  o.posterior_draws = config.posterior_draws;
  o.n_l = config.n_l;
  o.spline = estimate_options(config, streams.chain_seed);
  o.n_v_bins = config.v_bins;
  o.n_s_bins = config.s_bins;
  o.exclusion_threshold = config.exclusion_threshold;
  const Comparison all = compare_methods(data, o, streams.score);

  ScoreRun out;
  out.table.failures = out.sweep.failures = all.failures;
  for (const ScoreReport& r : all.rows) {
    const bool in_table = std::find(config.score_taus.begin(), config.score_taus.end(), r.tau) !=
                              config.score_taus.end() &&
                          std::find(config.score_bs.begin(), config.score_bs.end(), r.b) !=
                              config.score_bs.end();
    if (in_table) out.table.rows.push_back(r);
    if (r.b == 1.0 && std::find(config.tau_sweep.begin(), config.tau_sweep.end(), r.tau) !=
                          config.tau_sweep.end())
      out.sweep.rows.push_back(r);
  }
  std::sort(out.sweep.rows.begin(), out.sweep.rows.end(),
            [](const ScoreReport& a, const ScoreReport& b) { return a.tau < b.tau; });

  const ChainResult chain = spline_chain(data, config, streams.chain_seed);
  const BinnedModel binned = fit_binned(data, default_grid(data, config));
  out.differences = standardized_differences(
      data, binned, thin_draws(chain.draws, config.posterior_draws), 0.99, config.n_l, streams.score);
  return out;
}

std::vector<BandPoint> run_credible_band(const RecordTable& data, const RunConfig& config) {
  config.validate();
  if (data.empty()) throw InvalidArgument("credible band needs data");
  if (config.band_axis == "s" && !config.use_s()) throw InvalidArgument("band over s needs covariates=vs");
  Streams streams = make_streams(config.seed);
  const ChainResult chain = spline_chain(data, config, streams.chain_seed);
  const SlabAxis axis = config.band_axis == "v" ? SlabAxis::kV : SlabAxis::kS;
  std::vector<double> x;
  for (const TenMinRecord& r : data) x.push_back(axis == SlabAxis::kV ? r.v : r.s);
  std::sort(x.begin(), x.end());
  const double lo = quantile_sorted(x, 0.05), hi = quantile_sorted(x, 0.95);
  std::vector<BandPoint> out;
  for (int i = 0; i < config.band_points; ++i) {
    BandPoint p;
    p.center = config.band_points == 1 ? 0.5 * (lo + hi)
                                       : lo + (hi - lo) * i / (config.band_points - 1);
    try {
      p.interval = pointwise_credible_band(data, chain.draws, axis, p.center, config.band_halfwidth,
                                           streams.band);
    } catch (const EmptySlab&) {
    }
    out.push_back(p);
  }
  return out;
}

SimConfig sim_config(const RunConfig& config) {
  SimConfig s;
  s.n_blocks = config.sim_blocks;
  s.block_size = config.sim_block_size;
  s.weibull = {WindFamily::W3, config.sim_weibull};
  s.seed = config.seed;
  s.validate();
  return s;
}

bool SimReplication::all_pass() const {
  return std::all_of(verdict.begin(), verdict.end(), [](const VerdictCheck& c) { return c.pass; });
}

SimReplication replicate_sim(const RunConfig& base) {
  RunConfig config = base;
  config.covariates = "v";
  config.validate();
  Streams streams = make_streams(config.seed);
  const SimConfig sim = sim_config(config);
  const RecordTable training = generate_training(sim, streams.sim);

  SimReplication out;
  out.reference = generate_reference_quantiles(sim, config.ref_datasets, config.ref_size,
                                               config.ref_probs, streams.reference);
  for (double p : config.ref_probs) out.targets.push_back(ExtremeTarget::from_probability(p));
  std::vector<std::size_t> year_index;
  for (const ExtremeTarget& t : year_targets(config)) {
    year_index.push_back(out.targets.size());
    out.targets.push_back(t);
  }

  const WindStage wind = run_wind_stage(training, config, streams);
  out.wind_family = wind.wind.chosen;
  const SplineEstimate est =
      estimate_extreme_load(training, wind.pairs, estimate_options(config, streams.chain_seed), out.targets);
  out.spline = est.results;
  out.chain_stats = est.stats;
  out.spline_parameters = spline_parameter_count(est.draws);
  const BinnedModel model = fit_binned(training, default_grid(training, config));
  out.xi_shared = model.xi_shared;
  out.binned_parameters = binned_parameter_count(model);
  out.binned = binned_extreme_load(model, wind.pairs, out.targets, config.m_l, config.n_l, streams.binned);

  for (std::size_t j = 0; j < config.ref_probs.size(); ++j) {
    const std::string p = format_double(config.ref_probs[j]);
    std::vector<double> ref;
    for (const auto& row : out.reference.rows) ref.push_back(row[j]);
    const auto [lo, hi] = std::minmax_element(ref.begin(), ref.end());
    const QuantileResult& s = out.spline[j];
    const QuantileResult& b = out.binned[j];
    out.verdict.push_back({"spline_mean_in_reference_range_p" + p, *lo <= s.mean && s.mean <= *hi,
                           format_double(s.mean) + " in [" + format_double(*lo) + "," + format_double(*hi) + "]"});
    out.verdict.push_back({"binned_mean_above_spline_p" + p, b.mean > s.mean,
                           format_double(b.mean) + " > " + format_double(s.mean)});
    const double ws = s.ci_upper - s.ci_lower, wb = b.ci_upper - b.ci_lower;
    out.verdict.push_back({"binned_interval_wider_p" + p, wb > ws,
                           format_double(wb) + " > " + format_double(ws)});
  }
  for (std::size_t a = 0; a < year_index.size(); ++a) {
    for (std::size_t b = 0; b < year_index.size(); ++b) {
      const ExtremeTarget& ta = out.targets[year_index[a]];
      const ExtremeTarget& tb = out.targets[year_index[b]];
      if (!(tb.t_years > ta.t_years)) continue;
      for (const auto* set : {&out.spline, &out.binned}) {
        const std::string method = set == &out.spline ? "spline" : "binned";
        const double la = (*set)[year_index[a]].mean, lb = (*set)[year_index[b]].mean;
        out.verdict.push_back({method + "_monotone_T" + format_double(ta.t_years) + "_T" +
                                   format_double(tb.t_years),
                               lb >= la, format_double(lb) + " >= " + format_double(la)});
      }
    }
  }
  return out;
}

double spline_parameter_count(const std::vector<ModelDraw>& draws) {
  if (draws.empty()) return 0.0;
  double total = 0.0;
  for (const ModelDraw& d : draws) total += static_cast<double>(d.phi_mu.k() + d.phi_sigma.k() + 1);
  return total / static_cast<double>(draws.size());
}

int binned_parameter_count(const BinnedModel& model) {
  int fitted = 0;
  for (const BinFit& b : model.bins)
    if (b.source != BinFit::Source::kInterpolated) ++fitted;
  return 2 * fitted + 1;
}

Metadata quantile_payload(const QuantileResult& r, const std::string& method, std::uint64_t seed) {
  return {{"method", method},
          {"t_years", format_double(r.t_years)},
          {"p_t", format_double(r.p_t)},
          {"mean", format_double(r.mean)},
          {"median", format_double(r.median)},
          {"ci_lower", format_double(r.ci_lower)},
          {"ci_upper", format_double(r.ci_upper)},
          {"n_draws", std::to_string(r.draws.size())},
          {"clamped_draws", std::to_string(r.clamped_draws)},
          {"seed", std::to_string(seed)}};
}

Metadata replication_payload(const SimReplication& rep) {
  Metadata out;
  out.emplace_back("wind_family", std::string(to_string(rep.wind_family)));
  out.emplace_back("xi_shared", format_double(rep.xi_shared));
  out.emplace_back("spline_parameters_mean", format_double(rep.spline_parameters));
  out.emplace_back("binned_parameters", std::to_string(rep.binned_parameters));
  for (int m = 0; m < 3; ++m) {
    out.emplace_back("chain_proposed_" + std::string(to_string(static_cast<Move>(m))),
                     std::to_string(rep.chain_stats.proposed[m]));
    out.emplace_back("chain_accepted_" + std::string(to_string(static_cast<Move>(m))),
                     std::to_string(rep.chain_stats.accepted[m]));
  }
  for (std::size_t j = 0; j < rep.reference.probs.size(); ++j) {
    std::vector<double> ref;
    for (const auto& row : rep.reference.rows) ref.push_back(row[j]);
    const DrawSummary s = summarize(ref);
    const std::string p = format_double(rep.reference.probs[j]);
    out.emplace_back("reference_p" + p + "_min", format_double(*std::min_element(ref.begin(), ref.end())));
    out.emplace_back("reference_p" + p + "_median", format_double(s.median));
    out.emplace_back("reference_p" + p + "_max", format_double(*std::max_element(ref.begin(), ref.end())));
  }
  for (std::size_t i = 0; i < rep.targets.size(); ++i) {
    const std::string key = "p" + format_double(rep.targets[i].p_t);
    for (const auto* set : {&rep.spline, &rep.binned}) {
      const std::string method = set == &rep.spline ? "spline" : "binned";
      const QuantileResult& r = (*set)[i];
      out.emplace_back(method + "_" + key + "_t_years", format_double(r.t_years));
      out.emplace_back(method + "_" + key + "_mean", format_double(r.mean));
      out.emplace_back(method + "_" + key + "_median", format_double(r.median));
      out.emplace_back(method + "_" + key + "_ci_lower", format_double(r.ci_lower));
      out.emplace_back(method + "_" + key + "_ci_upper", format_double(r.ci_upper));
      out.emplace_back(method + "_" + key + "_clamped_draws", std::to_string(r.clamped_draws));
    }
  }
  for (const VerdictCheck& c : rep.verdict) out.emplace_back("verdict_" + c.name, c.pass ? "PASS" : "FAIL");
  out.emplace_back("verdict", rep.all_pass() ? "PASS" : "FAIL");
  return out;
}

}  // namespace xload
