// NEON (AArch64 Advanced SIMD) variants, two doubles per register.

#include <arm_neon.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "kernels_internal.hpp"

namespace needlets::simd::detail {

namespace {

constexpr std::size_t kLanes = 2;
constexpr std::size_t kUnroll = 4;
constexpr std::size_t kBlock = kLanes * kUnroll;

inline double scalar_cheb(std::span<const double> c, double t) {
  const double tt = 2.0 * t;
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t n = c.size(); n-- > 1;) {
    const double b0 = tt * b1 - b2 + c[n];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + c[0];
}

inline void cheb_block(std::span<const double> c, const float64x2_t* t, float64x2_t* out) {
  float64x2_t tt[kUnroll], b1[kUnroll], b2[kUnroll];
  for (std::size_t u = 0; u < kUnroll; ++u) {
    tt[u] = vaddq_f64(t[u], t[u]);
    b1[u] = vdupq_n_f64(0.0);
    b2[u] = vdupq_n_f64(0.0);
  }
  for (std::size_t n = c.size(); n-- > 1;) {
    const float64x2_t cn = vdupq_n_f64(c[n]);
    for (std::size_t u = 0; u < kUnroll; ++u) {
      const float64x2_t b0 = vfmaq_f64(vsubq_f64(cn, b2[u]), tt[u], b1[u]);
      b2[u] = b1[u];
      b1[u] = b0;
    }
  }
  const float64x2_t c0 = vdupq_n_f64(c[0]);
  for (std::size_t u = 0; u < kUnroll; ++u) out[u] = vfmaq_f64(vsubq_f64(c0, b2[u]), t[u], b1[u]);
}

void chebyshev_eval(std::span<const double> coeffs, std::span<const double> t, std::span<double> out) {
  const std::size_t n = t.size();
  if (coeffs.empty()) {
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n), 0.0);
    return;
  }
  std::size_t i = 0;
  for (; i + kBlock <= n; i += kBlock) {
    float64x2_t tv[kUnroll], r[kUnroll];
    for (std::size_t u = 0; u < kUnroll; ++u) tv[u] = vld1q_f64(t.data() + i + u * kLanes);
    cheb_block(coeffs, tv, r);
    for (std::size_t u = 0; u < kUnroll; ++u) vst1q_f64(out.data() + i + u * kLanes, r[u]);
  }
  for (; i < n; ++i) out[i] = scalar_cheb(coeffs, t[i]);
}

void legendre_eval(std::span<const double> coeffs, std::span<const double> t, std::span<double> out) {
  const std::size_t nc = coeffs.size();
  const std::size_t n = t.size();
  if (nc == 0) {
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n), 0.0);
    return;
  }
  std::vector<double> alpha(nc), beta(nc);
  for (std::size_t k = 0; k < nc; ++k) {
    const double dk = static_cast<double>(k);
    alpha[k] = (2.0 * dk + 1.0) / (dk + 1.0);
    beta[k] = (dk + 1.0) / (dk + 2.0);
  }
  std::size_t i = 0;
  for (; i + kBlock <= n; i += kBlock) {
    float64x2_t x[kUnroll], b1[kUnroll], b2[kUnroll];
    for (std::size_t u = 0; u < kUnroll; ++u) {
      x[u] = vld1q_f64(t.data() + i + u * kLanes);
      b1[u] = vdupq_n_f64(0.0);
      b2[u] = vdupq_n_f64(0.0);
    }
    for (std::size_t k = nc; k-- > 1;) {
      const float64x2_t ck = vdupq_n_f64(coeffs[k]);
      const float64x2_t bk = vdupq_n_f64(beta[k]);
      for (std::size_t u = 0; u < kUnroll; ++u) {
        const float64x2_t ax = vmulq_n_f64(x[u], alpha[k]);
        const float64x2_t b0 = vfmaq_f64(vfmsq_f64(ck, bk, b2[u]), ax, b1[u]);
        b2[u] = b1[u];
        b1[u] = b0;
      }
    }
    const float64x2_t c0 = vdupq_n_f64(coeffs[0]);
    const float64x2_t half = vdupq_n_f64(0.5);
    for (std::size_t u = 0; u < kUnroll; ++u) {
      const float64x2_t r = vfmaq_f64(vfmsq_f64(c0, half, b2[u]), x[u], b1[u]);
      vst1q_f64(out.data() + i + u * kLanes, r);
    }
  }
  for (; i < n; ++i) {
    const double xi = t[i];
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = nc; k-- > 1;) {
      const double b0 = coeffs[k] + alpha[k] * xi * b1 - beta[k] * b2;
      b2 = b1;
      b1 = b0;
    }
    out[i] = coeffs[0] + xi * b1 - 0.5 * b2;
  }
}

double radial_sum(std::span<const double> coeffs, const NodeView& nodes, double sx, double sy, double sz,
                  bool absolute) {
  if (coeffs.empty()) return 0.0;
  const std::size_t n = nodes.x.size();
  const float64x2_t vx = vdupq_n_f64(sx), vy = vdupq_n_f64(sy), vz = vdupq_n_f64(sz);
  const float64x2_t one = vdupq_n_f64(1.0), mone = vdupq_n_f64(-1.0);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + kBlock <= n; k += kBlock) {
    float64x2_t t[kUnroll], r[kUnroll];
    for (std::size_t u = 0; u < kUnroll; ++u) {
      const std::size_t o = k + u * kLanes;
      float64x2_t d = vmulq_f64(vz, vld1q_f64(nodes.z.data() + o));
      d = vfmaq_f64(d, vy, vld1q_f64(nodes.y.data() + o));
      d = vfmaq_f64(d, vx, vld1q_f64(nodes.x.data() + o));
      t[u] = vmaxq_f64(mone, vminq_f64(one, d));
    }
    cheb_block(coeffs, t, r);
    for (std::size_t u = 0; u < kUnroll; ++u) {
      float64x2_t v = vmulq_f64(r[u], vld1q_f64(nodes.scale.data() + k + u * kLanes));
      if (absolute) v = vabsq_f64(v);
      acc = vaddq_f64(acc, v);
    }
  }
  double sum = vaddvq_f64(acc);
  for (; k < n; ++k) {
    const double t = std::clamp(sx * nodes.x[k] + sy * nodes.y[k] + sz * nodes.z[k], -1.0, 1.0);
    const double v = nodes.scale[k] * scalar_cheb(coeffs, t);
    sum += absolute ? std::abs(v) : v;
  }
  return sum;
}

}  // namespace

const KernelSet& neon_kernels() {
  static const KernelSet set{Isa::neon, &chebyshev_eval, &legendre_eval, &radial_sum};
  return set;
}

}  // namespace needlets::simd::detail
