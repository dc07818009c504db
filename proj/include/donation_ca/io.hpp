#pragma once

// Output formats: plain PBM ("P1") space-time bitmaps and CSV cells with
// shortest round-trip number formatting.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <vector>

#include "donation_ca/history.hpp"

namespace donation_ca::io {

/// Shortest decimal that parses back to the same double.
inline std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return {buf, res.ptr};
}

template <typename T>
  requires std::is_integral_v<T>
std::string format_number(T value) {
  return std::to_string(value);
}

/// Joins cells with commas; cells are emitted verbatim.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  template <typename... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((emit(cells, first)), ...);
    out_ << '\n';
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

 private:
  template <typename T>
  void emit(const T& cell, bool& first) {
    if (!first) out_ << ',';
    first = false;
    if constexpr (std::is_arithmetic_v<T>) {
      out_ << format_number(cell);
    } else {
      out_ << cell;
    }
  }

  std::ostream& out_;
};

/// Plain PBM: "P1", width and height, then one line of 0/1 digits per row.
/// 1 is black, i.e. High reputation.
inline void write_pbm(std::ostream& out, const Matrix<std::uint8_t>& bits) {
  out << "P1\n" << bits.cols() << ' ' << bits.rows() << '\n';
  std::string line;
  for (std::size_t r = 0; r < bits.rows(); ++r) {
    line.clear();
    for (auto b : bits.row(r)) line.push_back(b ? '1' : '0');
    out << line << '\n';
  }
}

inline Matrix<std::uint8_t> read_pbm(std::istream& in) {
  std::string magic;
  in >> magic;
  if (magic != "P1") throw std::runtime_error("not a plain PBM file");
  std::size_t width = 0, height = 0;
  auto skip_comments = [&] {
    while (in >> std::ws && in.peek() == '#') {
      std::string ignored;
      std::getline(in, ignored);
    }
  };
  skip_comments();
  in >> width;
  skip_comments();
  in >> height;
  if (!in) throw std::runtime_error("malformed PBM header");
  Matrix<std::uint8_t> bits(height, width);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      char ch = 0;
      do {
        if (!in.get(ch)) throw std::runtime_error("truncated PBM raster");
      } while (ch == ' ' || ch == '\n' || ch == '\r' || ch == '\t');
      if (ch != '0' && ch != '1') throw std::runtime_error("invalid PBM pixel");
      bits(r, c) = static_cast<std::uint8_t>(ch == '1');
    }
  }
  return bits;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::system_error(errno, std::generic_category(), "cannot open '" + path + "' for writing");
  return out;
}

inline void finish_output(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw std::system_error(errno, std::generic_category(), "failed writing '" + path + "'");
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::system_error(errno, std::generic_category(), "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace donation_ca::io
