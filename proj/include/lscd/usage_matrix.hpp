#pragma once

// UMX1 usage matrices: "UMX1", u32 LE rows, u32 LE dim, rows*dim f32 LE.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <iterator>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lscd/common.hpp"

namespace lscd {

class UsageMatrix {
 public:
  UsageMatrix() = default;
  UsageMatrix(std::size_t rows, std::size_t dim, std::vector<float> data = {})
      : rows_(rows), dim_(dim), data_(std::move(data)) {
    if (data_.empty()) data_.assign(rows * dim, 0.0f);
    if (rows > 0 && dim == 0) throw ContractError("usage matrix: dimension must be positive");
    if (data_.size() != rows * dim) throw ContractError("usage matrix: data size != rows * dim");
  }

  static UsageMatrix from_rows(const std::vector<std::vector<float>>& rows) {
    if (rows.empty()) return {};
    std::size_t d = rows.front().size();
    std::vector<float> data;
    data.reserve(rows.size() * d);
    for (const auto& r : rows) {
      if (r.size() != d) throw ContractError("usage matrix: ragged rows");
      data.insert(data.end(), r.begin(), r.end());
    }
    return UsageMatrix(rows.size(), d, std::move(data));
  }

  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }
  bool empty() const { return rows_ == 0; }

  std::span<const float> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  std::span<float> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
  std::span<const float> data() const { return data_; }

  std::string lemma;
  Period period = Period::T1;

  friend bool operator==(const UsageMatrix& a, const UsageMatrix& b) {
    return a.rows_ == b.rows_ && a.dim_ == b.dim_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<float> data_;
};

namespace detail {

inline std::uint32_t load_u32_le(const unsigned char* p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
         (std::uint32_t(p[3]) << 24);
}

inline void store_u32_le(std::ostream& out, std::uint32_t v) {
  const char b[4] = {char(v & 0xFF), char((v >> 8) & 0xFF), char((v >> 16) & 0xFF), char((v >> 24) & 0xFF)};
  out.write(b, 4);
}

}  // namespace detail

inline UsageMatrix read_usage_matrix(std::istream& in) {
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "UMX1", 4) != 0)
    throw FormatError("UMX1 magic: expected \"UMX1\"");
  if (bytes.size() < 8) throw FormatError("UMX1 row count: header truncated");
  if (bytes.size() < 12) throw FormatError("UMX1 dimension: header truncated");
  const std::size_t n = detail::load_u32_le(bytes.data() + 4);
  const std::size_t d = detail::load_u32_le(bytes.data() + 8);
  if (n > 0 && d == 0) throw FormatError("UMX1 dimension: must be positive when rows > 0");
  const std::size_t expected = n * d * 4;
  const std::size_t payload = bytes.size() - 12;
  if (payload < expected)
    throw FormatError("UMX1 payload: truncated, expected " + std::to_string(n * d) + " values, found " +
                      std::to_string(payload / 4));
  if (payload > expected)
    throw FormatError("UMX1 payload: " + std::to_string(payload - expected) +
                      " trailing bytes beyond rows * dim values");
  std::vector<float> data(n * d);
  const unsigned char* p = bytes.data() + 12;
  for (std::size_t i = 0; i < data.size(); ++i, p += 4)
    data[i] = std::bit_cast<float>(detail::load_u32_le(p));
  return UsageMatrix(n, d, std::move(data));
}

inline void write_usage_matrix(std::ostream& out, const UsageMatrix& m) {
  out.write("UMX1", 4);
  detail::store_u32_le(out, static_cast<std::uint32_t>(m.rows()));
  detail::store_u32_le(out, static_cast<std::uint32_t>(m.dim()));
  for (float v : m.data()) detail::store_u32_le(out, std::bit_cast<std::uint32_t>(v));
}

}  // namespace lscd
