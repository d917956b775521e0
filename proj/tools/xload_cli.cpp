#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "xload/error.hpp"
#include "xload/io.hpp"
#include "xload/pipeline.hpp"

using namespace xload;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config_path;
  bool paper_scale = false;
  std::vector<std::string> sets;
  std::string out_dir = ".";
  std::string input;
};

RunConfig build_config(const Common& c) {
  RunConfig cfg;
  if (c.paper_scale) cfg.apply_paper_scale();
  if (!c.config_path.empty()) cfg.load_file(c.config_path);
  for (const std::string& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InvalidArgument("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

fs::path out_path(const Common& c, const std::string& name) {
  std::error_code ec;
  fs::create_directories(c.out_dir, ec);
  if (ec) throw IoError("cannot create " + c.out_dir + ": " + ec.message());
  return fs::path(c.out_dir) / name;
}

RecordTable load_input(const Common& c) {
  if (c.input.empty()) throw InvalidArgument("--input is required");
  if (c.input == "-") return parse_records_csv(std::cin, "stdin");
  return read_records_csv(c.input);
}

std::string years_tag(double t) {
  std::string s = format_double(t);
  for (char& ch : s)
    if (ch == '.') ch = 'p';
  return s;
}

void write_quantiles(const Common& c, const Metadata& meta, const std::string& method,
                     const std::vector<QuantileResult>& results, std::uint64_t seed) {
  for (const QuantileResult& r : results) {
    const std::string stem = method + "_T" + years_tag(r.t_years);
    atomic_write(out_path(c, stem + ".txt"), key_value_text(meta, quantile_payload(r, method, seed)));
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < r.draws.size(); ++i) rows.push_back({std::to_string(i), format_double(r.draws[i])});
    atomic_write(out_path(c, stem + "_draws.csv"), table_csv(meta, {"draw", "l_t"}, rows));
    std::cout << stem << " mean=" << format_double(r.mean) << " median=" << format_double(r.median)
              << " ci=[" << format_double(r.ci_lower) << "," << format_double(r.ci_upper) << "]\n";
  }
}

std::string sic_table(const Metadata& meta, const WindFit& w) {
  std::vector<std::vector<std::string>> rows;
  for (const WindFamilyFit& f : w.table)
    rows.push_back({std::string(to_string(f.kind)), f.ok ? "1" : "0", format_double(f.loglik),
                    format_double(f.sic), format_list(f.nu.nu), f.kind == w.chosen ? "1" : "0",
                    f.diagnostic.empty() ? "-" : f.diagnostic});
  return table_csv(meta, {"family", "ok", "loglik", "sic", "params", "chosen", "diagnostic"}, rows);
}

int cmd_ingest(const Common& c, double block_len, const std::string& output) {
  AggregateResult agg;
  if (c.input.empty() || c.input == "-") {
    agg = aggregate_raw(std::cin, block_len, "stdin");
  } else {
    std::ifstream in(c.input);
    if (!in) throw IoError("cannot open " + c.input);
    agg = aggregate_raw(in, block_len, c.input);
  }
  const Metadata meta{{"command", "ingest"},
                      {"block_len", format_double(block_len)},
                      {"blocks", std::to_string(agg.records.size())},
                      {"dropped_blocks", std::to_string(agg.dropped_blocks)}};
  const std::string text = records_to_csv(agg.records, meta);
  if (output.empty() || output == "-") std::cout << text;
  else atomic_write(output, text);
  std::cerr << "blocks=" << agg.records.size() << " dropped_blocks=" << agg.dropped_blocks << "\n";
  return 0;
}

int cmd_fit_wind(const Common& c) {
  const RunConfig cfg = build_config(c);
  const RecordTable data = load_input(c);
  Streams streams = make_streams(cfg.seed);
  const WindStage w = run_wind_stage(data, cfg, streams);
  const Metadata meta = run_metadata(cfg, "fit-wind");
  atomic_write(out_path(c, "wind_sic.csv"), sic_table(meta, w.wind));
  Metadata body{{"family", std::string(to_string(w.wind.chosen))},
                {"params", format_list(w.wind.nu_hat.nu)},
                {"sic", format_double(w.wind.sic(w.wind.chosen))},
                {"n_pairs", std::to_string(w.pairs.size())}};
  if (w.turbulence) {
    body.emplace_back("turbulence_draws", std::to_string(w.turbulence->draws.size()));
    body.emplace_back("turbulence_final_k_eta", std::to_string(w.turbulence->trace.back().k_mu));
    body.emplace_back("turbulence_final_k_delta", std::to_string(w.turbulence->trace.back().k_sigma));
  }
  atomic_write(out_path(c, "wind_fit.txt"), key_value_text(meta, body));
  std::vector<std::vector<std::string>> rows;
  for (const WindPair& p : w.pairs) rows.push_back({format_double(p.v), format_double(p.s)});
  atomic_write(out_path(c, "wind_pairs.csv"), table_csv(meta, {"v", "s"}, rows));
  std::cout << "family=" << to_string(w.wind.chosen) << " params=" << format_list(w.wind.nu_hat.nu) << "\n";
  return 0;
}

int cmd_estimate(const Common& c) {
  const RunConfig cfg = build_config(c);
  const RecordTable data = load_input(c);
  const SplineRun run = run_spline(data, cfg, year_targets(cfg));
  Metadata meta = run_metadata(cfg, "estimate");
  meta.emplace_back("parameters_mean", format_double(spline_parameter_count(run.estimate.draws)));
  write_quantiles(c, meta, "spline", run.estimate.results, cfg.seed);
  std::vector<std::vector<std::string>> rows;
  for (const TraceRow& t : run.estimate.trace)
    rows.push_back({std::to_string(t.iteration), std::to_string(t.k_mu), std::to_string(t.k_sigma),
                    format_double(t.loglik), format_double(t.sic), t.accepted_mu ? "1" : "0",
                    t.accepted_sigma ? "1" : "0"});
  atomic_write(out_path(c, "spline_trace.csv"),
               table_csv(meta, {"iteration", "k_mu", "k_sigma", "loglik", "sic", "accepted_mu", "accepted_sigma"}, rows));
  atomic_write(out_path(c, "wind_sic.csv"), sic_table(meta, run.wind.wind));
  return 0;
}

int cmd_estimate_binned(const Common& c) {
  const RunConfig cfg = build_config(c);
  const RecordTable data = load_input(c);
  const BinnedRun run = run_binned(data, cfg, year_targets(cfg));
  Metadata meta = run_metadata(cfg, "estimate-binned");
  meta.emplace_back("xi_shared", format_double(run.model.xi_shared));
  meta.emplace_back("parameters", std::to_string(binned_parameter_count(run.model)));
  write_quantiles(c, meta, "binned", run.results, cfg.seed);
  std::vector<std::vector<std::string>> rows;
  const BinGrid& g = run.model.grid;
  for (int b = 0; b < g.size(); ++b) {
    const auto [iv, is] = g.coords(b);
    const BinFit& f = run.model.bins[static_cast<std::size_t>(b)];
    rows.push_back({std::to_string(b), format_double(g.v_edges[iv]), format_double(g.v_edges[iv + 1]),
                    format_double(g.s_edges[is]), format_double(g.s_edges[is + 1]), std::to_string(f.count),
                    format_double(f.mu), format_double(f.sigma), to_string(f.source)});
  }
  atomic_write(out_path(c, "bins.csv"),
               table_csv(meta, {"bin", "v_lo", "v_hi", "s_lo", "s_hi", "count", "mu", "sigma", "source"}, rows));
  return 0;
}

std::string score_rows(const Metadata& meta, const std::vector<ScoreReport>& rows) {
  std::vector<std::vector<std::string>> out;
  for (const ScoreReport& r : rows)
    out.push_back({format_double(r.tau), format_double(r.b), format_double(r.spline),
                   format_double(r.binning), format_double(r.reduction_pct), std::to_string(r.n_repeats)});
  return table_csv(meta, {"tau", "b", "spline", "binning", "reduction_pct", "n_repeats"}, out);
}

int cmd_score(const Common& c) {
  const RunConfig cfg = build_config(c);
  const RecordTable data = load_input(c);
  const ScoreRun run = run_score(data, cfg);
  const Metadata meta = run_metadata(cfg, "score");
  atomic_write(out_path(c, "scores.csv"), score_rows(meta, run.table.rows));
  atomic_write(out_path(c, "tau_sweep.csv"), score_rows(meta, run.sweep.rows));
  std::vector<std::vector<std::string>> rows;
  for (const BinDifference& d : run.differences)
    rows.push_back({std::to_string(d.bin), std::to_string(d.count), format_double(d.spline),
                    format_double(d.binning), format_double(d.standardized)});
  atomic_write(out_path(c, "bin_differences.csv"),
               table_csv(meta, {"bin", "count", "spline_q99", "binned_q99", "standardized"}, rows));
  std::string failures = metadata_block(meta);
  for (const std::string& f : run.table.failures) failures += f + "\n";
  atomic_write(out_path(c, "score_failures.txt"), failures);
  for (const ScoreReport& r : run.table.rows)
    std::cout << "tau=" << format_double(r.tau) << " b=" << format_double(r.b)
              << " spline=" << format_double(r.spline) << " binning=" << format_double(r.binning)
              << " reduction_pct=" << format_double(r.reduction_pct) << "\n";
  return 0;
}

std::string reference_table(const Metadata& meta, const ReferenceQuantiles& q) {
  std::vector<std::string> header{"dataset"};
  for (double p : q.probs) header.push_back("p" + format_double(p));
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < q.rows.size(); ++i) {
    std::vector<std::string> row{std::to_string(i)};
    for (double x : q.rows[i]) row.push_back(format_double(x));
    rows.push_back(row);
  }
  return table_csv(meta, header, rows);
}

int cmd_simulate(const Common& c) {
  const RunConfig cfg = build_config(c);
  Streams streams = make_streams(cfg.seed);
  const SimConfig sim = sim_config(cfg);
  const Metadata meta = run_metadata(cfg, "simulate");
  atomic_write(out_path(c, "training.csv"), records_to_csv(generate_training(sim, streams.sim), meta));
  const ReferenceQuantiles q =
      generate_reference_quantiles(sim, cfg.ref_datasets, cfg.ref_size, cfg.ref_probs, streams.reference);
  atomic_write(out_path(c, "reference_quantiles.csv"), reference_table(meta, q));
  return 0;
}

int cmd_replicate(const Common& c) {
  const RunConfig cfg = build_config(c);
  const SimReplication rep = replicate_sim(cfg);
  RunConfig shown = cfg;
  shown.covariates = "v";
  const Metadata meta = run_metadata(shown, "replicate-sim");
  atomic_write(out_path(c, "replication.txt"), key_value_text(meta, replication_payload(rep)));
  atomic_write(out_path(c, "reference_quantiles.csv"), reference_table(meta, rep.reference));
  std::string verdict = metadata_block(meta);
  for (const VerdictCheck& v : rep.verdict)
    verdict += std::string(v.pass ? "PASS " : "FAIL ") + v.name + " " + v.detail + "\n";
  verdict += std::string("verdict=") + (rep.all_pass() ? "PASS" : "FAIL") + "\n";
  atomic_write(out_path(c, "verdict.txt"), verdict);
  std::cout << verdict.substr(metadata_block(meta).size());
  return 0;
}

int cmd_band(const Common& c) {
  const RunConfig cfg = build_config(c);
  const RecordTable data = load_input(c);
  const std::vector<BandPoint> band = run_credible_band(data, cfg);
  std::vector<std::vector<std::string>> rows;
  for (const BandPoint& p : band) {
    if (p.interval)
      rows.push_back({format_double(p.center), format_double(p.interval->lower),
                      format_double(p.interval->upper), std::to_string(p.interval->slab_size)});
    else
      rows.push_back({format_double(p.center), "nan", "nan", "0"});
  }
  Metadata meta = run_metadata(cfg, "credible-band");
  meta.emplace_back("band_axis", cfg.band_axis);
  meta.emplace_back("band_halfwidth", format_double(cfg.band_halfwidth));
  atomic_write(out_path(c, "credible_band.csv"), table_csv(meta, {"center", "lower", "upper", "slab_size"}, rows));
  return 0;
}

std::string one_line(std::string s) {
  for (char& ch : s)
    if (ch == '\n' || ch == '\r') ch = ' ';
  return s;
}

int fail(ErrorCode code, const std::string& message) {
  std::cerr << "error: code=" << error_code_name(code) << " message=" << one_line(message) << "\n";
  return static_cast<int>(code);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extreme load estimation from 10-minute wind and load statistics"};
  app.set_version_flag("--version", XLOAD_VERSION);
  app.require_subcommand(1);
  Common common;
  double block_len = 600.0;
  std::string ingest_output;

  const auto add_common = [&](CLI::App* sub, bool needs_input) {
    sub->add_option("--config", common.config_path, "key=value configuration file");
    sub->add_flag("--paper-scale", common.paper_scale, "full-scale iteration counts");
    sub->add_option("--set", common.sets, "override a configuration key (key=value)");
    sub->add_option("--out", common.out_dir, "output directory");
    if (needs_input) sub->add_option("--input", common.input, "record file (v,s,y) or - for stdin");
  };

  CLI::App* ingest = app.add_subcommand("ingest", "aggregate raw t,v,y samples into blocks");
  ingest->add_option("--input", common.input, "raw file or - for stdin");
  ingest->add_option("--output", ingest_output, "record file or - for stdout");
  ingest->add_option("--block-len", block_len, "block length in seconds");
  CLI::App* fit_wind = app.add_subcommand("fit-wind", "wind family selection and turbulence model");
  add_common(fit_wind, true);
  CLI::App* estimate = app.add_subcommand("estimate", "spline extreme-load estimate");
  add_common(estimate, true);
  CLI::App* binned = app.add_subcommand("estimate-binned", "binning extreme-load estimate");
  add_common(binned, true);
  CLI::App* score = app.add_subcommand("score", "train/test quantile score comparison");
  add_common(score, true);
  CLI::App* simulate = app.add_subcommand("simulate", "synthetic training data and reference quantiles");
  add_common(simulate, false);
  CLI::App* replicate = app.add_subcommand("replicate-sim", "simulation comparison with verdict");
  add_common(replicate, false);
  CLI::App* band = app.add_subcommand("credible-band", "point-wise predictive bands");
  add_common(band, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(ErrorCode::kPrecondition, e.what());
  }

  try {
    if (*ingest) return cmd_ingest(common, block_len, ingest_output);
    if (*fit_wind) return cmd_fit_wind(common);
    if (*estimate) return cmd_estimate(common);
    if (*binned) return cmd_estimate_binned(common);
    if (*score) return cmd_score(common);
    if (*simulate) return cmd_simulate(common);
    if (*replicate) return cmd_replicate(common);
    if (*band) return cmd_band(common);
  } catch (const Error& e) {
    return fail(e.code(), e.what());
  } catch (const fs::filesystem_error& e) {
    return fail(ErrorCode::kIo, e.what());
  } catch (const std::exception& e) {
    return fail(ErrorCode::kNumeric, e.what());
  }
  return fail(ErrorCode::kPrecondition, "no subcommand");
}
