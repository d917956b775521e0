#pragma once

// Delimited-text input and output: record tables, raw high-frequency
// streams, key=value result files and atomic file replacement.

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "xload/record.hpp"

namespace xload {

using Metadata = std::vector<std::pair<std::string, std::string>>;

// "# key=value" lines.
std::string metadata_block(const Metadata& meta);

// Writes to a sibling temporary file and renames it over the target.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::string records_to_csv(const RecordTable& records, const Metadata& meta);
// Header v,s,y or v,y; '#' lines are skipped.
RecordTable parse_records_csv(std::istream& in, const std::string& source);
RecordTable read_records_csv(const std::filesystem::path& path);

struct AggregateResult {
  RecordTable records;
  std::size_t dropped_blocks = 0;
};

// Raw rows "t,v,y" with t in seconds are grouped into consecutive blocks of
// block_len seconds starting at the first timestamp. A block counts as
// complete once a later block has started, or when its last sample reaches
// the block end to within one sampling interval.
AggregateResult aggregate_raw(std::istream& in, double block_len, const std::string& source);

std::string key_value_text(const Metadata& meta, const Metadata& body);
std::map<std::string, std::string> read_key_value(const std::filesystem::path& path);

// Delimited table with a metadata block, a header row and string cells.
std::string table_csv(const Metadata& meta, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows);

}  // namespace xload
