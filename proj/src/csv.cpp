#include "vpforest/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <system_error>

namespace vpforest {

std::string format_double(double x) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, ptr);
}

double parse_double(const std::string& field, std::size_t line) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || field.empty()) {
        throw SchemaError("expected a number, got '" + field + "'", line);
    }
    return value;
}

long long parse_int(const std::string& field, std::size_t line) {
    long long value = 0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || field.empty()) {
        throw SchemaError("expected an integer, got '" + field + "'", line);
    }
    if (value < 0) {
        throw SchemaError("expected a non-negative integer, got '" + field + "'", line);
    }
    return value;
}

std::uint64_t parse_uint64(const std::string& field, std::size_t line) {
    std::uint64_t value = 0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || field.empty()) {
        throw SchemaError("expected an unsigned integer, got '" + field + "'", line);
    }
    return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

namespace {

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return line;
}

// Shared reader for both input schemas: N numeric columns plus one column
// named `label`, in any order. Returns per-row values and labels.
struct Table {
    std::vector<std::vector<double>> values;
    std::vector<int> labels;
};

Table read_table(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw SchemaError("missing header row", 1);
    }
    const std::vector<std::string> header = split_csv_line(strip_cr(line));
    std::size_t label_col = header.size();
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "label") {
            if (label_col != header.size()) {
                throw SchemaError("duplicate 'label' column", 1);
            }
            label_col = c;
        }
    }
    if (label_col == header.size()) {
        throw SchemaError("no column named 'label'", 1);
    }
    if (header.size() < 2) {
        throw SchemaError("need at least one value column besides 'label'", 1);
    }

    Table table;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) {
            continue;
        }
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw SchemaError("expected " + std::to_string(header.size()) + " fields, got " +
                                  std::to_string(fields.size()),
                              line_no);
        }
        std::vector<double> values;
        values.reserve(header.size() - 1);
        int label = 0;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (c == label_col) {
                label = static_cast<int>(parse_int(fields[c], line_no));
            } else {
                values.push_back(parse_double(fields[c], line_no));
            }
        }
        for (double v : values) {
            if (!std::isfinite(v)) {
                throw SchemaError("non-finite value", line_no);
            }
        }
        table.values.push_back(std::move(values));
        table.labels.push_back(label);
    }
    return table;
}

}  // namespace

std::vector<RawSensorRow> read_raw_csv(std::istream& in) {
    Table table = read_table(in);
    std::vector<RawSensorRow> rows;
    rows.reserve(table.values.size());
    for (std::size_t i = 0; i < table.values.size(); ++i) {
        rows.push_back({std::move(table.values[i]), table.labels[i]});
    }
    return rows;
}

std::vector<StreamSample> read_featurized_csv(std::istream& in) {
    Table table = read_table(in);
    std::vector<StreamSample> samples;
    samples.reserve(table.values.size());
    for (std::size_t i = 0; i < table.values.size(); ++i) {
        samples.push_back({std::move(table.values[i]), table.labels[i]});
    }
    return samples;
}

std::unordered_map<int, int> read_relabel_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw SchemaError("missing header row", 1);
    }
    if (split_csv_line(strip_cr(line)) != std::vector<std::string>{"old_label", "new_label"}) {
        throw SchemaError("expected header 'old_label,new_label'", 1);
    }
    std::unordered_map<int, int> mapping;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) {
            continue;
        }
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != 2) {
            throw SchemaError("expected 2 fields", line_no);
        }
        mapping[static_cast<int>(parse_int(fields[0], line_no))] =
            static_cast<int>(parse_int(fields[1], line_no));
    }
    return mapping;
}

}  // namespace vpforest
