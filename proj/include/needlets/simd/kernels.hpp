#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace needlets::simd {

enum class Isa { scalar, avx2, neon };

std::string to_string(Isa isa);
std::optional<Isa> isa_from_string(std::string_view name);

/// Structure-of-arrays view of quadrature nodes for radial sums.
struct NodeView {
  std::span<const double> x;
  std::span<const double> y;
  std::span<const double> z;
  std::span<const double> scale;  ///< per-node multiplier
};

/// One implementation of the data-parallel inner loops.
///
/// Every variant computes the same quantities; only the association order of
/// floating-point sums differs, so results agree to rounding.
struct KernelSet {
  Isa isa;

  /// out[i] = sum_n c[n] T_n(t[i])
  void (*chebyshev_eval)(std::span<const double> coeffs, std::span<const double> t, std::span<double> out);

  /// out[i] = sum_l c[l] P_l(t[i])
  void (*legendre_eval)(std::span<const double> coeffs, std::span<const double> t, std::span<double> out);

  /// sum_k scale[k] R(clamp(s . x_k)), or sum_k |scale[k] R(...)| when `absolute`,
  /// where R is the Chebyshev series with coefficients `coeffs`.
  double (*radial_sum)(std::span<const double> coeffs, const NodeView& nodes, double sx, double sy, double sz,
                       bool absolute);
};

bool isa_supported(Isa isa);

/// Kernel set for a specific ISA; throws std::runtime_error if unsupported here.
const KernelSet& kernels(Isa isa);

/// The process-wide selection: NEEDLETS_ISA if set, else the best supported ISA.
const KernelSet& active_kernels();

/// Overrides the process-wide selection.
void select_isa(Isa isa);

}  // namespace needlets::simd
