#include "needlets/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "needlets/error.hpp"

namespace needlets {

std::string to_string(Palette p) { return p == Palette::gray ? "gray" : "diverging"; }

Palette palette_from_string(const std::string& name) {
  if (name == "gray" || name == "grey") return Palette::gray;
  if (name == "diverging") return Palette::diverging;
  throw DomainError("unknown palette '" + name + "' (expected gray or diverging)");
}

namespace {

std::uint8_t to_byte(double x) { return static_cast<std::uint8_t>(std::lround(std::clamp(x, 0.0, 255.0))); }

}  // namespace

Image render_field(std::span<const double> values, std::uint32_t n_theta, std::uint32_t n_phi, Palette palette) {
  if (n_theta == 0 || n_phi == 0 || static_cast<std::size_t>(n_theta) * n_phi != values.size()) {
    throw DomainError("render_field: value count does not match the grid");
  }
  Image img;
  img.width = n_phi;
  img.height = n_theta;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  img.min = *lo;
  img.max = *hi;
  if (!std::isfinite(img.min) || !std::isfinite(img.max)) throw DomainError("render_field: non-finite values");
  if (palette == Palette::gray) {
    img.channels = 1;
    img.pixels.resize(values.size());
    const double span = img.max - img.min;
    for (std::size_t i = 0; i < values.size(); ++i) {
      img.pixels[i] = span > 0.0 ? to_byte(255.0 * (values[i] - img.min) / span) : std::uint8_t{128};
    }
    return img;
  }
  img.channels = 3;
  img.pixels.resize(3 * values.size());
  const double scale = std::max(std::abs(img.min), std::abs(img.max));
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = scale > 0.0 ? values[i] / scale : 0.0;
    std::uint8_t* px = img.pixels.data() + 3 * i;
    if (x < 0.0) {
      px[0] = to_byte(255.0 * (1.0 + x));
      px[1] = to_byte(255.0 * (1.0 + x));
      px[2] = 255;
    } else {
      px[0] = 255;
      px[1] = to_byte(255.0 * (1.0 - x));
      px[2] = to_byte(255.0 * (1.0 - x));
    }
  }
  return img;
}

std::string encode_pnm(const Image& image) {
  char header[160];
  std::snprintf(header, sizeof header, "%s\n# min=%.17g max=%.17g\n%u %u\n255\n", image.channels == 1 ? "P5" : "P6",
                image.min, image.max, image.width, image.height);
  std::string out(header);
  out.append(reinterpret_cast<const char*>(image.pixels.data()), image.pixels.size());
  return out;
}

}  // namespace needlets
