#include "needlets/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "needlets/error.hpp"

namespace needlets {

namespace {

void check_argument(double x, const char* who) {
  if (!(x >= -1.0 && x <= 1.0)) throw DomainError(std::string(who) + ": argument must lie in [-1, 1]");
}

// log of N_mm^2 (2m-1)!!^2 = (2m+1)/(4 pi) (2m)! / (2^m m!)^2
double log_diagonal_seed(int m) {
  const double dm = m;
  return 0.5 * (std::log((2.0 * dm + 1.0) / kFourPi) + std::lgamma(2.0 * dm + 1.0) -
                2.0 * std::lgamma(dm + 1.0) - 2.0 * dm * std::log(2.0));
}

// N_mm P_mm(x) including the (-1)^m phase.
double normalized_diagonal(int m, double x) {
  const double s2 = std::max(0.0, (1.0 - x) * (1.0 + x));
  if (m == 0) return 1.0 / std::sqrt(kFourPi);
  if (s2 == 0.0) return 0.0;
  const double value = std::exp(log_diagonal_seed(m) + 0.5 * m * std::log(s2));
  return (m % 2 == 0) ? value : -value;
}

}  // namespace

double legendre_P(int ell, double x) {
  if (ell < 0) throw DomainError("legendre_P: degree must be non-negative");
  check_argument(x, "legendre_P");
  if (ell == 0) return 1.0;
  double p_prev = 1.0;
  double p = x;
  for (int l = 1; l < ell; ++l) {
    const double next = ((2.0 * l + 1.0) * x * p - l * p_prev) / (l + 1.0);
    p_prev = p;
    p = next;
  }
  return p;
}

double legendre_series_eval(std::span<const double> coeffs, double x) {
  check_argument(x, "legendre_series_eval");
  // P_{k+1} = alpha_k P_k + beta_k P_{k-1}, alpha_k = (2k+1) x / (k+1), beta_k = -k / (k+1)
  double b1 = 0.0;
  double b2 = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 1;) {
    const double k = static_cast<double>(i);
    const double alpha = (2.0 * k + 1.0) * x / (k + 1.0);
    const double beta_next = -(k + 1.0) / (k + 2.0);
    const double b0 = coeffs[i] + alpha * b1 + beta_next * b2;
    b2 = b1;
    b1 = b0;
  }
  if (coeffs.empty()) return 0.0;
  return coeffs[0] + x * b1 - 0.5 * b2;
}

double legendre_series_eval(const LegendreSeries& s, double x) { return legendre_series_eval(s.coeffs, x); }

double assoc_legendre(int ell, int m, double x) {
  if (ell < 0 || m < 0) throw DomainError("assoc_legendre: degree and order must be non-negative");
  if (m > ell) throw DomainError("assoc_legendre: order m must not exceed degree l");
  check_argument(x, "assoc_legendre");
  double pmm = 1.0;
  if (m > 0) {
    const double s = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
    double odd = 1.0;
    for (int i = 1; i <= m; ++i) {
      pmm *= -odd * s;
      odd += 2.0;
    }
  }
  if (ell == m) return pmm;
  double pmm1 = x * (2.0 * m + 1.0) * pmm;
  if (ell == m + 1) return pmm1;
  double pll = 0.0;
  for (int l = m + 2; l <= ell; ++l) {
    pll = (x * (2.0 * l - 1.0) * pmm1 - (l + m - 1.0) * pmm) / (l - m);
    pmm = pmm1;
    pmm1 = pll;
  }
  return pll;
}

double sph_normalization(int ell, int m) {
  const int am = std::abs(m);
  if (ell < 0 || am > ell) throw DomainError("sph_normalization: need 0 <= |m| <= l");
  const double log_ratio = std::lgamma(ell - am + 1.0) - std::lgamma(ell + am + 1.0);
  return std::sqrt((2.0 * ell + 1.0) / kFourPi) * std::exp(0.5 * log_ratio);
}

void normalized_legendre_table(int L, double x, std::span<double> out) {
  if (L < 0) throw DomainError("normalized_legendre_table: degree must be non-negative");
  check_argument(x, "normalized_legendre_table");
  if (out.size() < triangular_size(L)) throw DomainError("normalized_legendre_table: output too small");
  for (int m = 0; m <= L; ++m) {
    double p_prev = normalized_diagonal(m, x);
    out[triangular_index(m, m)] = p_prev;
    if (m == L) break;
    double p = x * std::sqrt(2.0 * m + 3.0) * p_prev;
    out[triangular_index(m + 1, m)] = p;
    for (int l = m + 2; l <= L; ++l) {
      const double dl = l;
      const double dm = m;
      const double a = std::sqrt((4.0 * dl * dl - 1.0) / (dl * dl - dm * dm));
      const double b = std::sqrt(((dl - 1.0) * (dl - 1.0) - dm * dm) / (4.0 * (dl - 1.0) * (dl - 1.0) - 1.0));
      const double next = a * (x * p - b * p_prev);
      out[triangular_index(l, m)] = next;
      p_prev = p;
      p = next;
    }
  }
}

double real_sph_harm(int ell, int m, const UnitVector& s) {
  const int am = std::abs(m);
  if (ell < 0 || am > ell) throw DomainError("real_sph_harm: need 0 <= |m| <= l");
  const double x = std::clamp(s.z(), -1.0, 1.0);
  double p_prev = normalized_diagonal(am, x);
  double p = p_prev;
  if (ell > am) {
    p = x * std::sqrt(2.0 * am + 3.0) * p_prev;
    for (int l = am + 2; l <= ell; ++l) {
      const double dl = l;
      const double dm = am;
      const double a = std::sqrt((4.0 * dl * dl - 1.0) / (dl * dl - dm * dm));
      const double b = std::sqrt(((dl - 1.0) * (dl - 1.0) - dm * dm) / (4.0 * (dl - 1.0) * (dl - 1.0) - 1.0));
      const double next = a * (x * p - b * p_prev);
      p_prev = p;
      p = next;
    }
  }
  if (m == 0) return p;
  const double phi = angles_from_point(s).phi;
  return std::sqrt(2.0) * p * (m > 0 ? std::cos(am * phi) : std::sin(am * phi));
}

void real_sph_harm_all(int L, const UnitVector& s, std::span<double> out) {
  if (L < 0) throw DomainError("real_sph_harm_all: degree must be non-negative");
  if (out.size() < harmonic_count(L)) throw DomainError("real_sph_harm_all: output too small");
  std::vector<double> table(triangular_size(L));
  normalized_legendre_table(L, std::clamp(s.z(), -1.0, 1.0), table);

  const double rho = std::hypot(s.x(), s.y());
  const double c1 = rho > 0.0 ? s.x() / rho : 1.0;
  const double s1 = rho > 0.0 ? s.y() / rho : 0.0;
  double cm = 1.0;
  double sm = 0.0;
  for (int m = 0; m <= L; ++m) {
    if (m == 0) {
      for (int l = 0; l <= L; ++l) out[harmonic_index(l, 0)] = table[triangular_index(l, 0)];
    } else {
      const double next_c = cm * c1 - sm * s1;
      const double next_s = sm * c1 + cm * s1;
      cm = next_c;
      sm = next_s;
      const double rc = std::sqrt(2.0) * cm;
      const double rs = std::sqrt(2.0) * sm;
      for (int l = m; l <= L; ++l) {
        const double p = table[triangular_index(l, m)];
        out[harmonic_index(l, m)] = rc * p;
        out[harmonic_index(l, -m)] = rs * p;
      }
    }
  }
}

}  // namespace needlets
