#pragma once

// Minimal CSV emission and parsing: '.' decimal, ',' separator, header row,
// LF line endings. Doubles are written in shortest round-trip form so that
// identical inputs produce identical bytes.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <vector>

namespace semiband::harness {

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header) : out_(out) {
    bool first = true;
    for (auto h : header) {
      if (!first) out_ << ',';
      out_ << h;
      first = false;
    }
    out_ << '\n';
    columns_ = header.size();
  }

  template <typename... Ts>
  void row(const Ts&... fields) {
    static_assert(sizeof...(Ts) > 0);
    if (sizeof...(Ts) != columns_) throw std::logic_error("CsvWriter: column count mismatch");
    bool first = true;
    ((write_field(fields, first)), ...);
    out_ << '\n';
  }

 private:
  template <typename T>
  void write_field(const T& v, bool& first) {
    if (!first) out_ << ',';
    first = false;
    if constexpr (std::is_floating_point_v<T>) {
      out_ << format_double(static_cast<double>(v));
    } else {
      out_ << v;
    }
  }

  std::ostream& out_;
  std::size_t columns_ = 0;
};

/// A parsed CSV table keyed by header names; cells stay as strings.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw std::invalid_argument("CSV schema mismatch: missing column '" + std::string(name) + "'");
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open CSV '" + path + "'");
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("CSV '" + path + "' is empty");
  table.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != table.header.size())
      throw std::invalid_argument("CSV schema mismatch in '" + path + "': ragged row");
    table.rows.push_back(std::move(cells));
  }
  return table;
}

}  // namespace semiband::harness
