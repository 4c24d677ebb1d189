#include "csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace mvsde::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()), path_(path) {
  if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
  if (cells.size() != columns_) throw std::logic_error("CsvWriter: wrong number of cells for " + path_);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    std::visit(
        [this](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, std::string>) {
            out_ << c;
          } else if constexpr (std::is_same_v<T, double>) {
            out_ << format_double(c);
          } else {
            out_ << std::to_string(c);
          }
        },
        cells[i]);
  }
  out_ << '\n';
}

void CsvWriter::close() {
  out_.close();
  if (out_.fail()) throw std::runtime_error("failed writing " + path_);
}

}  // namespace mvsde::cli
