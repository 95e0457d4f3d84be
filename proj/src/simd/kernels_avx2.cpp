// AVX2/FMA variants. This translation unit is the only one built with -mavx2,
// and is only entered after the CPUID check in dispatch.cpp.

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "kernels_internal.hpp"

namespace needlets::simd::detail {

namespace {

constexpr std::size_t kLanes = 4;
constexpr std::size_t kUnroll = 4;  // independent Clenshaw chains to cover FMA latency
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

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Clenshaw for kUnroll vectors of arguments at once.
inline void cheb_block(std::span<const double> c, const __m256d* t, __m256d* out) {
  __m256d tt[kUnroll], b1[kUnroll], b2[kUnroll];
  for (std::size_t u = 0; u < kUnroll; ++u) {
    tt[u] = _mm256_add_pd(t[u], t[u]);
    b1[u] = _mm256_setzero_pd();
    b2[u] = _mm256_setzero_pd();
  }
  for (std::size_t n = c.size(); n-- > 1;) {
    const __m256d cn = _mm256_set1_pd(c[n]);
    for (std::size_t u = 0; u < kUnroll; ++u) {
      const __m256d b0 = _mm256_fmadd_pd(tt[u], b1[u], _mm256_sub_pd(cn, b2[u]));
      b2[u] = b1[u];
      b1[u] = b0;
    }
  }
  const __m256d c0 = _mm256_set1_pd(c[0]);
  for (std::size_t u = 0; u < kUnroll; ++u) out[u] = _mm256_fmadd_pd(t[u], b1[u], _mm256_sub_pd(c0, b2[u]));
}

void chebyshev_eval(std::span<const double> coeffs, std::span<const double> t, std::span<double> out) {
  const std::size_t n = t.size();
  if (coeffs.empty()) {
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n), 0.0);
    return;
  }
  std::size_t i = 0;
  for (; i + kBlock <= n; i += kBlock) {
    __m256d tv[kUnroll], r[kUnroll];
    for (std::size_t u = 0; u < kUnroll; ++u) tv[u] = _mm256_loadu_pd(t.data() + i + u * kLanes);
    cheb_block(coeffs, tv, r);
    for (std::size_t u = 0; u < kUnroll; ++u) _mm256_storeu_pd(out.data() + i + u * kLanes, r[u]);
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
  // alpha_k = (2k+1)/(k+1), beta_k = (k+1)/(k+2) for the recurrence at step k
  std::vector<double> alpha(nc), beta(nc);
  for (std::size_t k = 0; k < nc; ++k) {
    const double dk = static_cast<double>(k);
    alpha[k] = (2.0 * dk + 1.0) / (dk + 1.0);
    beta[k] = (dk + 1.0) / (dk + 2.0);
  }
  std::size_t i = 0;
  for (; i + kBlock <= n; i += kBlock) {
    __m256d x[kUnroll], b1[kUnroll], b2[kUnroll];
    for (std::size_t u = 0; u < kUnroll; ++u) {
      x[u] = _mm256_loadu_pd(t.data() + i + u * kLanes);
      b1[u] = _mm256_setzero_pd();
      b2[u] = _mm256_setzero_pd();
    }
    for (std::size_t k = nc; k-- > 1;) {
      const __m256d ck = _mm256_set1_pd(coeffs[k]);
      const __m256d ak = _mm256_set1_pd(alpha[k]);
      const __m256d bk = _mm256_set1_pd(beta[k]);
      for (std::size_t u = 0; u < kUnroll; ++u) {
        const __m256d b0 = _mm256_fmadd_pd(_mm256_mul_pd(ak, x[u]), b1[u], _mm256_fnmadd_pd(bk, b2[u], ck));
        b2[u] = b1[u];
        b1[u] = b0;
      }
    }
    const __m256d c0 = _mm256_set1_pd(coeffs[0]);
    const __m256d half = _mm256_set1_pd(0.5);
    for (std::size_t u = 0; u < kUnroll; ++u) {
      const __m256d r = _mm256_fmadd_pd(x[u], b1[u], _mm256_fnmadd_pd(half, b2[u], c0));
      _mm256_storeu_pd(out.data() + i + u * kLanes, r);
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
  const __m256d vx = _mm256_set1_pd(sx), vy = _mm256_set1_pd(sy), vz = _mm256_set1_pd(sz);
  const __m256d one = _mm256_set1_pd(1.0), mone = _mm256_set1_pd(-1.0);
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + kBlock <= n; k += kBlock) {
    __m256d t[kUnroll], r[kUnroll];
    for (std::size_t u = 0; u < kUnroll; ++u) {
      const std::size_t o = k + u * kLanes;
      __m256d d = _mm256_mul_pd(vz, _mm256_loadu_pd(nodes.z.data() + o));
      d = _mm256_fmadd_pd(vy, _mm256_loadu_pd(nodes.y.data() + o), d);
      d = _mm256_fmadd_pd(vx, _mm256_loadu_pd(nodes.x.data() + o), d);
      t[u] = _mm256_max_pd(mone, _mm256_min_pd(one, d));
    }
    cheb_block(coeffs, t, r);
    for (std::size_t u = 0; u < kUnroll; ++u) {
      __m256d v = _mm256_mul_pd(r[u], _mm256_loadu_pd(nodes.scale.data() + k + u * kLanes));
      if (absolute) v = _mm256_andnot_pd(sign, v);
      acc = _mm256_add_pd(acc, v);
    }
  }
  double sum = hsum(acc);
  for (; k < n; ++k) {
    const double t = std::clamp(sx * nodes.x[k] + sy * nodes.y[k] + sz * nodes.z[k], -1.0, 1.0);
    const double v = nodes.scale[k] * scalar_cheb(coeffs, t);
    sum += absolute ? std::abs(v) : v;
  }
  return sum;
}

}  // namespace

const KernelSet& avx2_kernels() {
  static const KernelSet set{Isa::avx2, &chebyshev_eval, &legendre_eval, &radial_sum};
  return set;
}

}  // namespace needlets::simd::detail
