#pragma once

#include <istream>
#include <string>
#include <unordered_map>
#include <vector>

#include "vpforest/stream.hpp"

namespace vpforest {

/// Shortest decimal string that parses back to exactly this double;
/// locale-independent, '.' decimal point.
std::string format_double(double x);

/// Strict double parse of a whole field; SchemaError carrying `line` on
/// trailing garbage, empty fields, or non-numeric text.
double parse_double(const std::string& field, std::size_t line);

/// Strict non-negative integer parse of a whole field.
long long parse_int(const std::string& field, std::size_t line);

/// Strict full-range unsigned parse (seeds use all 64 bits).
std::uint64_t parse_uint64(const std::string& field, std::size_t line);

/// Splits one CSV record on commas; no quoting (none of the schemas here
/// need it).
std::vector<std::string> split_csv_line(const std::string& line);

/// Raw sensor schema: a header row where one column is named `label` and
/// every other column is a numeric axis, one reading per row.
std::vector<RawSensorRow> read_raw_csv(std::istream& in);

/// Featurized schema: same layout, but non-label columns are the already
/// computed feature values of one sample per row.
std::vector<StreamSample> read_featurized_csv(std::istream& in);

/// Label-merge table with header `old_label,new_label`.
std::unordered_map<int, int> read_relabel_csv(std::istream& in);

}  // namespace vpforest
