#pragma once

// Flat binary container of named float64 tensors.
//
// Layout (all integers little-endian):
//   magic     4 bytes  "UMPS"
//   version   u32      1
//   count     u32      number of tensors
//   per tensor:
//     name_len u32, name (UTF-8, no terminator)
//     rows u32, cols u32
//     rows * cols IEEE-754 float64 values, row-major

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace unimotion {

struct NamedTensor {
  std::string name;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<double> values;  // row-major

  bool operator==(const NamedTensor&) const = default;
};

void write_snapshot(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors);
/// Throws ParseError on a malformed or truncated file.
std::vector<NamedTensor> read_snapshot(const std::filesystem::path& path);

}  // namespace unimotion
