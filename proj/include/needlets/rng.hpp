#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace needlets {

/// Philox4x32-10 counter-based generator (Salmon et al. 2011 constants).
/// Key = 64-bit seed; counter = (block lo, block hi, stream lo, stream hi).
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  explicit Philox4x32(std::uint64_t seed) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  /// The raw bijection on (counter, key).
  static Block round10(Block counter, std::array<std::uint32_t, 2> key) noexcept;

  Block operator()(std::uint64_t block, std::uint64_t stream = 0) const noexcept;

 private:
  std::array<std::uint32_t, 2> key_;
};

/// Standard normal variates. Variate i uses block i/2: two 53-bit uniforms
/// u1 = (a + 1) 2^-53 in (0, 1] and u2 = b 2^-53 feed Box-Muller, even i taking
/// the cosine branch and odd i the sine branch.
std::vector<double> standard_normals(std::uint64_t seed, std::size_t count, std::uint64_t stream = 0);

}  // namespace needlets
