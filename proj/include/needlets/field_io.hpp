#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "needlets/sampling.hpp"

namespace needlets {

enum class Payload : std::uint8_t { coefficients = 0, field = 1 };

/// Binary layout, little-endian, 32-byte header then count float64 values:
///   0  char[6]  "NDLT1\0"
///   6  uint8    expansion (0 kl, 1 needlet)
///   7  uint8    payload (0 coefficients, 1 field)
///   8  uint64   count
///   16 uint64   seed
///   24 uint32   field: n_theta (0 for point lists); coefficients: truncation
///   28 uint32   field: n_phi; coefficients: 0
struct BinaryRecord {
  Expansion expansion = Expansion::needlet;
  Payload payload = Payload::field;
  std::uint64_t seed = 0;
  std::uint32_t dim0 = 0;
  std::uint32_t dim1 = 0;
  std::vector<double> values;
};

inline constexpr std::size_t kBinaryHeaderSize = 32;

BinaryRecord to_record(const FieldRealization& f);
BinaryRecord to_record(const CoefficientVector& c);

void write_binary(std::ostream& out, const BinaryRecord& r);
/// ParseError on a bad magic, unknown tags, or a truncated payload.
BinaryRecord read_binary(std::istream& in);

/// "index,value" header, then one row per value printed with 17 significant digits.
void write_csv(std::ostream& out, std::span<const double> values);
/// ParseError (with line number) on malformed rows or non-consecutive indices.
std::vector<double> read_csv(std::istream& in);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

}  // namespace needlets
