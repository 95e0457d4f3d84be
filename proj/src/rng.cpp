#include "needlets/rng.hpp"

#include <cmath>

#include "needlets/sphere.hpp"

namespace needlets {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Block Philox4x32::round10(Block c, std::array<std::uint32_t, 2> k) noexcept {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      k[0] += kW0;
      k[1] += kW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

Philox4x32::Block Philox4x32::operator()(std::uint64_t block, std::uint64_t stream) const noexcept {
  return round10({static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                  static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)},
                 key_);
}

std::vector<double> standard_normals(std::uint64_t seed, std::size_t count, std::uint64_t stream) {
  const Philox4x32 gen(seed);
  std::vector<double> out(count);
  constexpr double kScale = 0x1.0p-53;
  for (std::size_t i = 0; i < count; i += 2) {
    const auto w = gen(i / 2, stream);
    const std::uint64_t a = ((static_cast<std::uint64_t>(w[0]) << 32) | w[1]) >> 11;
    const std::uint64_t b = ((static_cast<std::uint64_t>(w[2]) << 32) | w[3]) >> 11;
    const double u1 = static_cast<double>(a + 1) * kScale;
    const double u2 = static_cast<double>(b) * kScale;
    const double r = std::sqrt(-2.0 * std::log(u1));
    out[i] = r * std::cos(2.0 * kPi * u2);
    if (i + 1 < count) out[i + 1] = r * std::sin(2.0 * kPi * u2);
  }
  return out;
}

}  // namespace needlets
