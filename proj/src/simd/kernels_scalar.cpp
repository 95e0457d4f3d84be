// Reference implementations. The vector variants are tested against these.

#include <algorithm>
#include <cmath>

#include "kernels_internal.hpp"

namespace needlets::simd::detail {

namespace {

inline double chebyshev_clenshaw(std::span<const double> c, double t) {
  if (c.empty()) return 0.0;
  const double tt = 2.0 * t;
  double b1 = 0.0;
  double b2 = 0.0;
  for (std::size_t n = c.size(); n-- > 1;) {
    const double b0 = tt * b1 - b2 + c[n];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + c[0];
}

void chebyshev_eval(std::span<const double> coeffs, std::span<const double> t, std::span<double> out) {
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = chebyshev_clenshaw(coeffs, t[i]);
}

void legendre_eval(std::span<const double> coeffs, std::span<const double> t, std::span<double> out) {
  const std::size_t n = coeffs.size();
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double x = t[i];
    double b1 = 0.0;
    double b2 = 0.0;
    for (std::size_t k = n; k-- > 1;) {
      const double dk = static_cast<double>(k);
      const double b0 = coeffs[k] + (2.0 * dk + 1.0) / (dk + 1.0) * x * b1 - (dk + 1.0) / (dk + 2.0) * b2;
      b2 = b1;
      b1 = b0;
    }
    out[i] = n == 0 ? 0.0 : coeffs[0] + x * b1 - 0.5 * b2;
  }
}

double radial_sum(std::span<const double> coeffs, const NodeView& nodes, double sx, double sy, double sz,
                  bool absolute) {
  double sum = 0.0;
  for (std::size_t k = 0; k < nodes.x.size(); ++k) {
    const double t = std::clamp(sx * nodes.x[k] + sy * nodes.y[k] + sz * nodes.z[k], -1.0, 1.0);
    const double v = nodes.scale[k] * chebyshev_clenshaw(coeffs, t);
    sum += absolute ? std::abs(v) : v;
  }
  return sum;
}

}  // namespace

const KernelSet& scalar_kernels() {
  static const KernelSet set{Isa::scalar, &chebyshev_eval, &legendre_eval, &radial_sum};
  return set;
}

}  // namespace needlets::simd::detail
