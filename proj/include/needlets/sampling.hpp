#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "needlets/needlet.hpp"
#include "needlets/spectrum.hpp"
#include "needlets/sphere.hpp"

namespace needlets {

enum class Expansion : std::uint8_t { kl = 0, needlet = 1 };

std::string to_string(Expansion e);
Expansion expansion_from_string(const std::string& name);

/// i.i.d. N(0, 1) coefficients in a fixed order: KL is l-major with m from -l
/// to l; needlet follows the frame's flat index.
struct CoefficientVector {
  Expansion expansion = Expansion::needlet;
  int truncation = 0;         ///< L for KL, J for needlet
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::vector<double> values;
};

/// Philox4x32-10 + Box-Muller normals; identical on every platform with IEEE doubles
/// and a correctly rounded libm (log/cos/sin are the only transcendental calls).
CoefficientVector draw_coefficients(std::uint64_t seed, std::size_t count, std::uint64_t stream = 0);

struct Provenance {
  Expansion expansion = Expansion::needlet;
  int truncation = 0;
  std::uint64_t seed = 0;
  std::string spectrum;
};

struct FieldRealization {
  EvalGrid grid;
  std::vector<double> values;
  Provenance provenance;
};

enum class SynthesisMethod {
  automatic,  ///< spectral on equirectangular grids, direct otherwise
  direct,     ///< sum of interpolated needlets at every point
  spectral,   ///< project to harmonics, then synthesise ring by ring
};

/// u(s) = sum_{l <= L} sqrt(A_l) sum_m y_lm Y_lm(s). DomainError if the spectrum
/// does not reach L or the coefficient count is not (L + 1)^2.
FieldRealization kl_synthesize(const PowerSpectrum& spec, int L, std::span<const double> coeffs, const EvalGrid& grid);
FieldRealization kl_sample(std::uint64_t seed, const PowerSpectrum& spec, int L, const EvalGrid& grid);

/// u(s) = sum_{j <= J, k} y_jk psi_jk(s).
FieldRealization needlet_synthesize(const NeedletFrame& frame, std::span<const double> coeffs, const EvalGrid& grid,
                                    SynthesisMethod method = SynthesisMethod::automatic);
FieldRealization needlet_sample(std::uint64_t seed, const NeedletFrame& frame, const EvalGrid& grid,
                                SynthesisMethod method = SynthesisMethod::automatic);

/// Harmonic coefficients (harmonic_index order, l <= 2^J - 1) of sum y_jk psi_jk.
std::vector<double> needlet_to_harmonics(const NeedletFrame& frame, std::span<const double> coeffs);

/// sum_{l,m} a_lm Y_lm on the grid; rings are handled with one Legendre table each
/// when the grid is equirectangular.
std::vector<double> synthesize_harmonics(std::span<const double> alm, int L, const EvalGrid& grid);

/// rho_L(t) = sum_{l <= L} A_l (2l + 1)/(4 pi) P_l(t). DomainError for |t| > 1.
double covariance(const PowerSpectrum& spec, double t, int L);

/// g_J(l) = sum_{j <= J} b_j(l)^2 for the frame's cutoff, l = 0..2^J - 1.
std::vector<double> band_filter(const NeedletFrame& frame);

/// Exact covariance of the level-truncated needlet field:
/// sum_l g_J(l) A_l (2l + 1)/(4 pi) P_l(t).
double truncated_covariance(const NeedletFrame& frame, double t);

/// sum_{l <= lmax} (1 - g_J(l)) A_l (2l + 1)/(4 pi), the variance missing after truncation at J.
double covariance_deficit(const NeedletFrame& frame, int lmax);

/// Basis rows: the field at s is dot(row, coefficients).
std::vector<double> kl_basis(const PowerSpectrum& spec, int L, const UnitVector& s);
std::vector<double> needlet_basis(const NeedletFrame& frame, const UnitVector& s);

}  // namespace needlets
