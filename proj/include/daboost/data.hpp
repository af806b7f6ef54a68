#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "daboost/core.hpp"
#include "daboost/random.hpp"

namespace daboost {

/// Anything wrong with an input file (missing, malformed, bad schema).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public DataError {
 public:
  using DataError::DataError;
};

class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

struct CsvSchema {
  std::optional<std::size_t> label_column;  // empty means last column
  std::string positive_label;  // empty: infer the numeric 1 / {-1,0} convention
  char delimiter = ',';
  bool has_header = false;
};

namespace detail {

inline bool parse_double(std::string_view token, double& out) {
  if (token.starts_with('+')) {  // from_chars takes no leading plus
    token.remove_prefix(1);
    if (token.starts_with('-') || token.starts_with('+')) return false;
  }
  if (token.empty()) return false;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// RFC-4180-style field split: quoted fields may contain the delimiter,
// "" inside quotes is a literal quote. Unquoted fields get trimmed.
inline std::vector<std::string> split_csv_line(std::string_view line, char delimiter) {
  std::vector<std::string> fields;
  std::string current;
  bool in_quotes = false;
  bool was_quoted = false;
  auto push = [&] {
    if (!was_quoted) current = std::string(trim(current));
    fields.push_back(std::move(current));
    current.clear();
    was_quoted = false;
  };
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"' && trim(current).empty()) {
      in_quotes = true;
      was_quoted = true;
      current.clear();
    } else if (c == delimiter) {
      push();
    } else {
      current.push_back(c);
    }
  }
  push();
  return fields;
}

}  // namespace detail

/// Loads a delimited text file. The label column maps positive_label to +1
/// and the single other token to -1; with positive_label unset the numeric
/// convention (1 against -1 or 0) is inferred. Column types are fixed by the
/// first data row: a column whose first token is numeric must stay numeric;
/// any other column is categorical and its tokens are integer-coded in order
/// of first appearance.
inline Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("load_csv: cannot open " + path.string());

  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_lines;  // physical line per data row, for messages
  std::string line;
  std::size_t line_no = 0;
  std::size_t header_lines = schema.has_header ? 1 : 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.ends_with('\r')) line.pop_back();
    if (header_lines > 0) {
      --header_lines;
      continue;
    }
    if (detail::trim(line).empty()) continue;
    rows.push_back(detail::split_csv_line(line, schema.delimiter));
    row_lines.push_back(line_no);
    if (rows.size() > 1 && rows.back().size() != rows.front().size()) {
      throw ParseError("load_csv: row at line " + std::to_string(line_no) + " has " +
                       std::to_string(rows.back().size()) + " fields, expected " +
                       std::to_string(rows.front().size()));
    }
  }
  if (rows.empty()) throw DataError("load_csv: no data rows in " + path.string());

  const std::size_t columns = rows.front().size();
  if (columns < 2) throw SchemaError("load_csv: need at least one feature and a label column");
  const std::size_t label_col = schema.label_column.value_or(columns - 1);
  if (label_col >= columns) {
    throw SchemaError("load_csv: label column " + std::to_string(label_col) +
                      " out of range for " + std::to_string(columns) + " columns");
  }

  // Label tokens: exactly two distinct values, one of them positive_label.
  std::vector<std::string> label_tokens;
  for (const auto& row : rows) {
    const std::string& token = row[label_col];
    if (std::find(label_tokens.begin(), label_tokens.end(), token) == label_tokens.end()) {
      label_tokens.push_back(token);
      if (label_tokens.size() > 2) {
        throw SchemaError("load_csv: more than two distinct label values");
      }
    }
  }
  if (label_tokens.size() != 2) {
    throw SchemaError("load_csv: expected exactly two distinct label values, found " +
                      std::to_string(label_tokens.size()));
  }
  std::string positive_label = schema.positive_label;
  if (positive_label.empty()) {
    double a, b;
    if (detail::parse_double(label_tokens[0], a) && detail::parse_double(label_tokens[1], b) &&
        ((a == 1.0 && (b == -1.0 || b == 0.0)) || (b == 1.0 && (a == -1.0 || a == 0.0)))) {
      positive_label = a == 1.0 ? label_tokens[0] : label_tokens[1];
    } else {
      throw SchemaError("load_csv: cannot infer the positive label from tokens '" +
                        label_tokens[0] + "'/'" + label_tokens[1] +
                        "'; set positive_label");
    }
  } else if (std::find(label_tokens.begin(), label_tokens.end(), positive_label) ==
             label_tokens.end()) {
    throw SchemaError("load_csv: positive label '" + positive_label +
                      "' never appears in the file");
  }

  // Column typing from the first data row.
  std::vector<bool> numeric(columns, false);
  for (std::size_t c = 0; c < columns; ++c) {
    double ignored;
    numeric[c] = detail::parse_double(rows.front()[c], ignored);
  }
  std::vector<std::map<std::string, double>> codes(columns);
  std::vector<double> next_code(columns, 0.0);

  std::vector<Sample> samples;
  samples.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::vector<double> features;
    features.reserve(columns - 1);
    for (std::size_t c = 0; c < columns; ++c) {
      if (c == label_col) continue;
      const std::string& token = rows[r][c];
      double value;
      if (numeric[c]) {
        if (!detail::parse_double(token, value)) {
          throw ParseError("load_csv: non-numeric value '" + token + "' at row " +
                           std::to_string(row_lines[r]) + ", column " +
                           std::to_string(c + 1));
        }
      } else {
        auto [it, inserted] = codes[c].try_emplace(token, next_code[c]);
        if (inserted) next_code[c] += 1.0;
        value = it->second;
      }
      features.push_back(value);
    }
    const Label label =
        rows[r][label_col] == positive_label ? Label::positive() : Label::negative();
    samples.push_back({std::move(features), label});
  }
  return Dataset(std::move(samples));
}

/// Loads "<label> <index>:<value> ..." sparse text. Labels +1/1, -1, or 0
/// (0 maps to -1); indices are 1-based; '#' starts a comment; absent
/// indices are zero and dim is the largest index seen anywhere.
inline Dataset load_libsvm(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("load_libsvm: cannot open " + path.string());

  struct SparseRow {
    Label label = Label::positive();
    std::vector<std::pair<std::size_t, double>> entries;
  };
  std::vector<SparseRow> rows;
  std::size_t dim = 0;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.ends_with('\r')) line.pop_back();
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream tokens{line};
    std::string token;
    if (!(tokens >> token)) continue;  // blank or comment-only line

    const auto fail = [&](const std::string& what) -> ParseError {
      return ParseError("load_libsvm: " + what + " at line " + std::to_string(line_no));
    };

    double label_value;
    if (!detail::parse_double(token, label_value)) throw fail("bad label '" + token + "'");
    SparseRow row;
    if (label_value == 1.0) {
      row.label = Label::positive();
    } else if (label_value == -1.0 || label_value == 0.0) {
      row.label = Label::negative();
    } else {
      throw fail("label must be +1, -1, or 0");
    }

    while (tokens >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos) throw fail("expected index:value, got '" + token + "'");
      std::size_t index = 0;
      double value;
      if (!detail::parse_double(token.substr(colon + 1), value) ||
          std::from_chars(token.data(), token.data() + colon, index).ptr !=
              token.data() + colon ||
          index == 0) {
        throw fail("bad feature entry '" + token + "'");
      }
      dim = std::max(dim, index);
      row.entries.emplace_back(index - 1, value);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("load_libsvm: no data rows in " + path.string());

  std::vector<Sample> samples;
  samples.reserve(rows.size());
  for (SparseRow& row : rows) {
    std::vector<double> features(dim, 0.0);
    for (const auto& [index, value] : row.entries) features[index] = value;
    samples.push_back({std::move(features), row.label});
  }
  return Dataset(std::move(samples));
}

/// Writes features then a +1/-1 label token per row; load_csv round-trips
/// the result with positive_label "+1".
inline void write_csv(std::ostream& out, const Dataset& data, char delimiter = ',') {
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.features(i)) out << detail::format_double(v) << delimiter;
    out << (data.label(i) == Label::positive() ? "+1" : "-1") << '\n';
  }
}

/// Sparse text dump; the last index is always written so dim survives a
/// round-trip through load_libsvm even when the final feature is zero.
inline void write_libsvm(std::ostream& out, const Dataset& data) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << (data.label(i) == Label::positive() ? "+1" : "-1");
    const auto features = data.features(i);
    for (std::size_t j = 0; j < features.size(); ++j) {
      if (features[j] != 0.0 || j + 1 == features.size()) {
        out << ' ' << (j + 1) << ':' << detail::format_double(features[j]);
      }
    }
    out << '\n';
  }
}

/// Majority vote of the first three coordinates, sign(0) counting as +1.
inline Label majority_toy_label(std::span<const double> features) {
  if (features.size() < 3) {
    throw std::invalid_argument("majority_toy_label: need at least three coordinates");
  }
  int votes = 0;
  for (std::size_t k = 0; k < 3; ++k) votes += features[k] >= 0.0 ? 1 : -1;
  return Label::from_sign(static_cast<double>(votes));
}

/// Synthetic dataset: x uniform on [-1,1]^dim, y the majority vote of the
/// first three coordinates.
inline Dataset generate_majority_toy(std::size_t n, std::size_t dim, std::uint64_t seed) {
  if (dim < 3) throw std::invalid_argument("generate_majority_toy: dim must be >= 3");
  if (n < 1) throw std::invalid_argument("generate_majority_toy: n must be >= 1");
  Rng rng = make_rng(seed);
  std::vector<Sample> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> features(dim);
    for (double& v : features) v = uniform_in(rng, -1.0, 1.0);
    const Label label = majority_toy_label(features);
    samples.push_back({std::move(features), label});
  }
  return Dataset(std::move(samples));
}

/// Seeded shuffle, then partition into (train, test) with
/// |test| = round(n * test_fraction).
inline std::pair<Dataset, Dataset> train_test_split(const Dataset& data, double test_fraction,
                                                    std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("train_test_split: test_fraction must lie in (0, 1)");
  }
  const std::size_t n = data.size();
  const auto test_n = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * test_fraction));
  if (test_n < 1 || test_n >= n) {
    throw std::invalid_argument("train_test_split: both parts must be non-empty");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng = make_rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = uniform_below(rng, i + 1);
    std::swap(order[i], order[j]);
  }
  std::vector<Sample> train_samples, test_samples;
  train_samples.reserve(n - test_n);
  test_samples.reserve(test_n);
  for (std::size_t i = 0; i < n; ++i) {
    (i < n - test_n ? train_samples : test_samples).push_back(data[order[i]]);
  }
  return {Dataset(std::move(train_samples)), Dataset(std::move(test_samples))};
}

}  // namespace daboost
