#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "needlets/sphere.hpp"

namespace needlets {

/// Coefficients c_0..c_L of sum_l c_l P_l(x). Trailing zeros are allowed.
struct LegendreSeries {
  std::vector<double> coeffs;
};

/// P_l(x) by the three-term recurrence. Throws DomainError for l < 0 or |x| > 1.
double legendre_P(int ell, double x);

/// Clenshaw evaluation of sum_l c_l P_l(x). Throws DomainError for |x| > 1.
double legendre_series_eval(std::span<const double> coeffs, double x);
double legendre_series_eval(const LegendreSeries& s, double x);

/// Associated Legendre function P_lm(x), Condon-Shortley phase included.
/// Overflows to +-inf once (2m-1)!! exceeds the double range (m around 150).
double assoc_legendre(int ell, int m, double x);

/// N_lm = sqrt((2l+1)/(4 pi) (l-|m|)!/(l+|m|)!), evaluated through log-Gamma.
double sph_normalization(int ell, int m);

/// Index of (l, m >= 0) in a triangular table: l (l + 1) / 2 + m.
constexpr std::size_t triangular_index(int ell, int m) {
  return static_cast<std::size_t>(ell) * (static_cast<std::size_t>(ell) + 1) / 2 + static_cast<std::size_t>(m);
}
constexpr std::size_t triangular_size(int L) { return triangular_index(L + 1, 0); }

/// Fills out[triangular_index(l, m)] = N_lm P_lm(x) for 0 <= m <= l <= L using the
/// fully normalised recurrence; stable for large l where P_lm itself overflows.
void normalized_legendre_table(int L, double x, std::span<double> out);

/// Index of Y_lm in l-major order with m ascending from -l: l^2 + l + m.
constexpr std::size_t harmonic_index(int ell, int m) {
  return static_cast<std::size_t>(ell * ell + ell + m);
}
constexpr std::size_t harmonic_count(int L) { return static_cast<std::size_t>((L + 1) * (L + 1)); }

/// Real spherical harmonic Y_lm(s): sqrt2 N P_lm cos(m phi) for m > 0, N P_l for m = 0,
/// sqrt2 N P_l|m| sin(|m| phi) for m < 0. Throws DomainError if |m| > l.
double real_sph_harm(int ell, int m, const UnitVector& s);

/// All Y_lm(s) for l <= L into out[harmonic_index(l, m)]; out needs harmonic_count(L) slots.
void real_sph_harm_all(int L, const UnitVector& s, std::span<double> out);

}  // namespace needlets
