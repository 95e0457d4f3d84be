#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace needlets {

enum class Palette { gray, diverging };

std::string to_string(Palette p);
Palette palette_from_string(const std::string& name);

/// Raster of an equirectangular field, row 0 at the north pole.
struct Image {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  int channels = 1;  ///< 1 gray, 3 RGB
  double min = 0.0;
  double max = 0.0;
  std::vector<std::uint8_t> pixels;
};

/// gray: round(255 (v - min) / (max - min)), or 128 everywhere when max == min.
/// diverging: v / max|v| mapped blue (-1) .. white (0) .. red (+1).
Image render_field(std::span<const double> values, std::uint32_t n_theta, std::uint32_t n_phi, Palette palette);

/// Binary PGM (P5) or PPM (P6): "P5\n# min=<v> max=<v>\n<w> <h>\n255\n" then raw bytes.
std::string encode_pnm(const Image& image);

}  // namespace needlets
