#include "xload/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "xload/error.hpp"

namespace xload {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw InvalidArgument("bad number for " + key + ": '" + text + "'");
  return x;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  Int x = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw InvalidArgument("bad integer for " + key + ": '" + text + "'");
  return x;
}

std::string format_types(const std::vector<BasisType>& types) {
  std::string out;
  for (BasisType t : types) {
    if (!out.empty()) out += ',';
    out += std::to_string(static_cast<int>(t));
  }
  return out;
}

struct Field {
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
};

template <class T>
Field int_field(T RunConfig::*m) {
  return {[m](const RunConfig& c) { return std::to_string(c.*m); },
          [m](RunConfig& c, const std::string& k, const std::string& v) { c.*m = parse_int<T>(k, v); }};
}

Field double_field(double RunConfig::*m) {
  return {[m](const RunConfig& c) { return format_double(c.*m); },
          [m](RunConfig& c, const std::string& k, const std::string& v) { c.*m = parse_double(k, v); }};
}

Field list_field(std::vector<double> RunConfig::*m) {
  return {[m](const RunConfig& c) { return format_list(c.*m); },
          [m](RunConfig& c, const std::string&, const std::string& v) { c.*m = parse_double_list(v); }};
}

Field string_field(std::string RunConfig::*m) {
  return {[m](const RunConfig& c) { return c.*m; },
          [m](RunConfig& c, const std::string&, const std::string& v) { c.*m = trim(v); }};
}

Field types_field(std::vector<BasisType> RunConfig::*m) {
  return {[m](const RunConfig& c) { return format_types(c.*m); },
          [m](RunConfig& c, const std::string&, const std::string& v) { c.*m = parse_basis_types(v); }};
}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table{
      {"seed", int_field(&RunConfig::seed)},
      {"t_years", list_field(&RunConfig::t_years)},
      {"burn_in", int_field(&RunConfig::burn_in)},
      {"m_l", int_field(&RunConfig::m_l)},
      {"m_w", int_field(&RunConfig::m_w)},
      {"n_w", int_field(&RunConfig::n_w)},
      {"n_l", int_field(&RunConfig::n_l)},
      {"k_max", int_field(&RunConfig::k_max)},
      {"covariates", string_field(&RunConfig::covariates)},
      {"types_mu", types_field(&RunConfig::types_mu)},
      {"types_sigma", types_field(&RunConfig::types_sigma)},
      {"v_bins", int_field(&RunConfig::v_bins)},
      {"s_bins", int_field(&RunConfig::s_bins)},
      {"exclusion_threshold", double_field(&RunConfig::exclusion_threshold)},
      {"score_taus", list_field(&RunConfig::score_taus)},
      {"score_bs", list_field(&RunConfig::score_bs)},
      {"tau_sweep", list_field(&RunConfig::tau_sweep)},
      {"score_repeats", int_field(&RunConfig::score_repeats)},
      {"split_frac", double_field(&RunConfig::split_frac)},
      {"posterior_draws", int_field(&RunConfig::posterior_draws)},
      {"band_axis", string_field(&RunConfig::band_axis)},
      {"band_points", int_field(&RunConfig::band_points)},
      {"band_halfwidth", double_field(&RunConfig::band_halfwidth)},
      {"sim_blocks", int_field(&RunConfig::sim_blocks)},
      {"sim_block_size", int_field(&RunConfig::sim_block_size)},
      {"sim_weibull", list_field(&RunConfig::sim_weibull)},
      {"ref_datasets", int_field(&RunConfig::ref_datasets)},
      {"ref_size", int_field(&RunConfig::ref_size)},
      {"ref_probs", list_field(&RunConfig::ref_probs)},
  };
  return table;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_list(const std::vector<double>& x) {
  std::string out;
  for (double d : x) {
    if (!out.empty()) out += ',';
    out += format_double(d);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double("list", item));
  if (out.empty()) throw InvalidArgument("empty list '" + text + "'");
  return out;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  for (const auto& [name, field] : fields()) {
    if (name == trim(key)) {
      field.set(*this, name, value);
      return;
    }
  }
  throw InvalidArgument("unknown config key '" + key + "'");
}

void RunConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    set(t.substr(0, eq), t.substr(eq + 1));
  }
}

void RunConfig::apply_paper_scale() {
  burn_in = 1000;
  m_l = 10000;
  m_w = 1000;
  n_w = 100;
  n_l = 100;
}

void RunConfig::validate() const {
  for (int c : {burn_in, m_l, m_w, n_w, n_l, v_bins, s_bins, score_repeats, posterior_draws, band_points})
    if (c < 1) throw InvalidArgument("counts must be at least 1");
  if (sim_blocks < 1 || sim_block_size < 1 || ref_datasets < 1 || ref_size < 1)
    throw InvalidArgument("simulation counts must be at least 1");
  if (k_max < 1) throw InvalidArgument("k_max must be at least 1");
  if (covariates != "v" && covariates != "vs") throw InvalidArgument("covariates must be v or vs");
  if (band_axis != "v" && band_axis != "s") throw InvalidArgument("band_axis must be v or s");
  if (!(band_halfwidth > 0.0)) throw InvalidArgument("band_halfwidth must be positive");
  if (!(split_frac > 0.0 && split_frac < 1.0)) throw InvalidArgument("split_frac outside (0,1)");
  for (double t : t_years)
    if (!(t > 0.0)) throw InvalidArgument("t_years must be positive");
  for (const auto* taus : {&score_taus, &tau_sweep})
    for (double tau : *taus)
      if (!(tau > 0.0 && tau < 1.0)) throw InvalidArgument("tau outside (0,1)");
  for (double p : ref_probs)
    if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("ref_probs outside (0,1)");
  if (sim_weibull.size() != 3) throw InvalidArgument("sim_weibull needs shape,scale,shift");
  if (types_mu.empty() || types_sigma.empty()) throw InvalidArgument("basis type sets must be nonempty");
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [name, field] : fields()) out.emplace_back(name, field.get(*this));
  return out;
}

std::uint64_t RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [k, v] : entries()) {
    for (char c : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace xload
