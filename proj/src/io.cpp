#include "xload/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "xload/config.hpp"
#include "xload/error.hpp"

namespace xload {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto a = cell.find_first_not_of(" \t\r");
    const auto b = cell.find_last_not_of(" \t\r");
    out.push_back(a == std::string::npos ? "" : cell.substr(a, b - a + 1));
  }
  return out;
}

double parse_cell(const std::string& cell, const std::string& source, std::size_t lineno) {
  try {
    std::size_t used = 0;
    const double x = std::stod(cell, &used);
    if (used == cell.size() && std::isfinite(x)) return x;
  } catch (const std::exception&) {
  }
  throw IoError(source + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
}

bool skip_line(const std::string& line) {
  const auto a = line.find_first_not_of(" \t\r");
  return a == std::string::npos || line[a] == '#';
}

}  // namespace

std::string metadata_block(const Metadata& meta) {
  std::string out;
  for (const auto& [k, v] : meta) out += "# " + k + "=" + v + "\n";
  return out;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string records_to_csv(const RecordTable& records, const Metadata& meta) {
  std::string out = metadata_block(meta) + "v,s,y\n";
  for (const TenMinRecord& r : records)
    out += format_double(r.v) + "," + format_double(r.s) + "," + format_double(r.y) + "\n";
  return out;
}

RecordTable parse_records_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (skip_line(line)) continue;
    header = split_csv(line);
    break;
  }
  const bool with_s = header == std::vector<std::string>{"v", "s", "y"};
  if (!with_s && header != std::vector<std::string>{"v", "y"})
    throw IoError(source + ":" + std::to_string(lineno) + ": expected header v,s,y or v,y");
  RecordTable out;
  while (std::getline(in, line)) {
    ++lineno;
    if (skip_line(line)) continue;
    const std::vector<std::string> cells = split_csv(line);
    if (cells.size() != header.size())
      throw IoError(source + ":" + std::to_string(lineno) + ": expected " +
                    std::to_string(header.size()) + " columns");
    TenMinRecord r;
    r.v = parse_cell(cells[0], source, lineno);
    r.s = with_s ? parse_cell(cells[1], source, lineno) : 0.0;
    r.y = parse_cell(cells.back(), source, lineno);
    if (r.s < 0.0) throw IoError(source + ":" + std::to_string(lineno) + ": negative s");
    out.push_back(r);
  }
  return out;
}

RecordTable read_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_records_csv(in, path.string());
}

AggregateResult aggregate_raw(std::istream& in, double block_len, const std::string& source) {
  if (!(block_len > 0.0)) throw InvalidArgument("block length must be positive");
  struct Block {
    long index = -1;
    std::vector<double> v;
    double y_max = -std::numeric_limits<double>::infinity();
    double t_last = 0.0;
  };
  AggregateResult out;
  Block cur;
  double t0 = 0.0, t_prev = 0.0, dt_min = std::numeric_limits<double>::infinity();
  bool first = true;
  const auto flush = [&](const Block& b) {
    if (b.v.size() < 2) {
      ++out.dropped_blocks;
      return;
    }
    double mean = 0.0;
    for (double x : b.v) mean += x;
    mean /= static_cast<double>(b.v.size());
    double ss = 0.0;
    for (double x : b.v) ss += (x - mean) * (x - mean);
    out.records.push_back({mean, std::sqrt(ss / static_cast<double>(b.v.size() - 1)), b.y_max});
  };

  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (skip_line(line)) continue;
    const std::vector<std::string> cells = split_csv(line);
    if (!header_seen) {
      header_seen = true;
      if (cells == std::vector<std::string>{"t", "v", "y"}) continue;
    }
    if (cells.size() != 3) throw IoError(source + ":" + std::to_string(lineno) + ": expected t,v,y");
    const double t = parse_cell(cells[0], source, lineno);
    const double v = parse_cell(cells[1], source, lineno);
    const double y = parse_cell(cells[2], source, lineno);
    if (first) {
      t0 = t;
      first = false;
    } else {
      if (!(t > t_prev))
        throw IoError(source + ":" + std::to_string(lineno) + ": timestamps not increasing");
      dt_min = std::min(dt_min, t - t_prev);
    }
    t_prev = t;
    const long index = static_cast<long>(std::floor((t - t0) / block_len));
    if (index != cur.index) {
      if (cur.index >= 0) flush(cur);
      out.dropped_blocks += static_cast<std::size_t>(std::max(0L, index - cur.index - 1)) *
                            (cur.index >= 0 ? 1 : 0);
      cur = Block{};
      cur.index = index;
    }
    cur.v.push_back(v);
    cur.y_max = std::max(cur.y_max, y);
    cur.t_last = t;
  }
  if (cur.index >= 0) {
    const double end = t0 + block_len * static_cast<double>(cur.index + 1);
    const double slack = std::isfinite(dt_min) ? dt_min : 0.0;
    if (cur.t_last + slack >= end * (1.0 - 1e-12)) flush(cur);
    else ++out.dropped_blocks;
  }
  return out;
}

std::string key_value_text(const Metadata& meta, const Metadata& body) {
  std::string out = metadata_block(meta);
  for (const auto& [k, v] : body) out += k + "=" + v + "\n";
  return out;
}

std::map<std::string, std::string> read_key_value(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (skip_line(line)) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw IoError(path.string() + ": expected key=value");
    out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

std::string table_csv(const Metadata& meta, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  std::string out = metadata_block(meta);
  const auto join = [](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
    return s + "\n";
  };
  out += join(header);
  for (const auto& r : rows) out += join(r);
  return out;
}

}  // namespace xload
