#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "mscan/generators.hpp"
#include "mscan/matrix.hpp"

namespace mscan {

/// Malformed or unreadable input file.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal form, independent of the C locale.
inline std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, end);
}

inline void write_matrix_csv(std::ostream& os, const DataMatrix& X) {
  std::string line;
  for (Index i = 0; i < X.rows(); ++i) {
    line.clear();
    const auto r = X.row(i);
    for (Index j = 0; j < X.cols(); ++j) {
      if (j) line += ',';
      line += format_double(r[j]);
    }
    line += '\n';
    os << line;
  }
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

/// Headerless numeric CSV, one matrix row per line; blank lines are ignored.
inline DataMatrix read_matrix_csv(std::istream& is) {
  std::vector<double> values;
  std::string line;
  Index rows = 0, cols = 0, line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string_view content = detail::trim(line);
    if (content.empty()) continue;
    Index count = 0;
    std::string_view rest = content;
    for (;;) {
      const auto comma = rest.find(',');
      const std::string_view field = detail::trim(rest.substr(0, comma));
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size() ||
          !std::isfinite(v)) {
        throw InputError("malformed CSV: line " + std::to_string(line_no) + ", field " +
                         std::to_string(count + 1) + " is not a finite number: '" +
                         std::string(field) + "'");
      }
      values.push_back(v);
      ++count;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      throw InputError("malformed CSV: line " + std::to_string(line_no) + " has " +
                       std::to_string(count) + " fields, expected " + std::to_string(cols));
    }
    ++rows;
  }
  if (rows == 0) throw InputError("malformed CSV: no data rows");
  return DataMatrix(rows, cols, std::move(values));
}

inline DataMatrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open matrix file '" + path + "'");
  return read_matrix_csv(in);
}

inline void write_matrix_csv(const std::string& path, const DataMatrix& X) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_matrix_csv(out, X);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

/// {"rows": [...], "cols": [...], "objective": x} with 1-based indices.
inline nlohmann::ordered_json selection_to_json(const Selection& s,
                                                std::optional<double> objective = std::nullopt) {
  nlohmann::ordered_json j;
  auto one_based = [](const IndexSet& set) {
    std::vector<std::uint64_t> out;
    out.reserve(set.size());
    for (Index i : set) out.push_back(i + 1);
    return out;
  };
  j["rows"] = one_based(s.rows);
  j["cols"] = one_based(s.cols);
  if (objective) j["objective"] = *objective;
  return j;
}

/// Inverse of selection_to_json; validates against an M x N matrix.
inline Selection selection_from_json(const nlohmann::json& j, Index M, Index N) {
  auto zero_based = [](const nlohmann::json& arr, const char* key) {
    if (!arr.is_array()) throw InputError(std::string("selection JSON: '") + key + "' is not an array");
    IndexSet out;
    for (const auto& v : arr) {
      if (!v.is_number_integer() || v.get<std::int64_t>() < 1) {
        throw InputError(std::string("selection JSON: '") + key + "' needs positive integers");
      }
      out.push_back(static_cast<Index>(v.get<std::int64_t>() - 1));
    }
    return out;
  };
  if (!j.contains("rows") || !j.contains("cols")) {
    throw InputError("selection JSON needs 'rows' and 'cols'");
  }
  Selection s{zero_based(j.at("rows"), "rows"), zero_based(j.at("cols"), "cols")};
  if (!is_valid(s, M, N)) throw InputError("selection JSON does not fit the matrix");
  return s;
}

inline nlohmann::ordered_json spec_to_json(const GenerationSpec& spec) {
  nlohmann::ordered_json j;
  j["family"] = std::string(to_string(spec.family));
  j["M"] = spec.M;
  j["N"] = spec.N;
  j["m"] = spec.m_star;
  j["n"] = spec.n_star;
  j["theta"] = spec.theta;
  j["seed"] = spec.seed;
  return j;
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open JSON file '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("malformed JSON in '" + path + "': " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace mscan
