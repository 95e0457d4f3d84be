#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "needlets/quadrature.hpp"
#include "needlets/spectrum.hpp"
#include "needlets/sphere.hpp"

namespace needlets {

/// Meyer-type cutoff: kappa(t) = sin(pi/2 eta(2t - 1)) on (1/2, 1],
/// cos(pi/2 eta(t - 1)) on (1, 2), zero elsewhere, with
/// eta(x) = eta0(x) / (eta0(x) + eta0(1 - x)) and eta0(x) = exp(-1/x) for x > 0.
class CutoffFunction {
 public:
  CutoffFunction() = default;

  double operator()(double t) const noexcept;

  static constexpr double support_min() { return 0.5; }
  static constexpr double support_max() { return 2.0; }
  std::string smoothness() const { return "Meyer-type, infinitely smooth"; }

  /// Test hook: a copy whose rising half (1/2, 1] is scaled by (1 + amplitude),
  /// which breaks kappa(t)^2 + kappa(2t)^2 = 1.
  CutoffFunction with_fault(double amplitude) const;
  bool is_faulty() const noexcept { return fault_ != 0.0; }

 private:
  double fault_ = 0.0;
};

double kappa_eval(double t) noexcept;

/// b_j(t) = kappa(2^{-j} (2t + 1)).
double window_b(int level, double t) noexcept;
double window_b(const CutoffFunction& kappa, int level, double t) noexcept;

struct Band {
  int lo = 0;  ///< ceil(2^{j-2} - 1/2)
  int hi = 0;  ///< 2^j - 1
};

/// Degrees where b_j can be non-zero.
Band active_band(int level);

/// sum_{j <= J} b_j(l)^2
double window_mass(const CutoffFunction& kappa, int top_level, int ell);

/// K_j(t) = sum_l c_l P_l(t), c_l = b_j(l) sqrt(A_l) (2l + 1) / (4 pi) on the active band.
class RadialKernel {
 public:
  int level() const noexcept { return level_; }
  bool is_standard() const noexcept { return standard_; }
  Band band() const noexcept { return band_; }
  /// c_0..c_{band.hi}; entries below band.lo are zero.
  std::span<const double> coefficients() const noexcept { return coeffs_; }
  /// b_j(l) for l = 0..band.hi, straight from the cutoff
  std::span<const double> window() const noexcept { return window_; }
  /// sqrt(A_l) for l = 0..band.hi (1 for the standard kernel)
  std::span<const double> sqrt_spectrum() const noexcept { return sqrt_a_; }
  /// K_j(1)
  double value_at_one() const noexcept;

 private:
  friend RadialKernel build_radial_kernel(int, const PowerSpectrum*, const CutoffFunction&);
  int level_ = 0;
  bool standard_ = true;
  Band band_;
  std::vector<double> coeffs_;
  std::vector<double> window_;
  std::vector<double> sqrt_a_;
};

/// Standard kernel when `spec` is null. DomainError if the spectrum does not reach 2^j - 1.
RadialKernel build_radial_kernel(int level, const PowerSpectrum* spec, const CutoffFunction& kappa = {});
inline RadialKernel build_radial_kernel(int level, const PowerSpectrum& spec, const CutoffFunction& kappa = {}) {
  return build_radial_kernel(level, &spec, kappa);
}

/// Direct Legendre summation. DomainError for |t| > 1.
double kernel_value(const RadialKernel& k, double t);

/// Chebyshev interpolant of t -> K_j(t) on [-1, 1].
class RadialInterpolant {
 public:
  int level() const noexcept { return level_; }
  std::size_t node_count() const noexcept { return coeffs_.size(); }
  std::span<const double> chebyshev_coefficients() const noexcept { return coeffs_; }
  /// max |K_j| on the probe grid
  double peak() const noexcept { return peak_; }
  /// max |interpolant - K_j| on the probe grid
  double certified_abs_error() const noexcept { return abs_error_; }
  /// certified_abs_error / peak (0 for the zero kernel)
  double certified_error() const noexcept { return peak_ > 0.0 ? abs_error_ / peak_ : 0.0; }

  /// Clamps t to [-1, 1].
  double operator()(double t) const noexcept;

 private:
  friend RadialInterpolant build_interpolant(const RadialKernel&, double, std::size_t);
  int level_ = 0;
  std::vector<double> coeffs_;
  double peak_ = 0.0;
  double abs_error_ = 0.0;
};

inline constexpr std::size_t kMaxInterpolantNodes = std::size_t{1} << 16;

/// Doubles the Chebyshev node count from 8 until the error over 10 2^j + 1
/// equispaced colatitudes is within target * peak. ConvergenceError past max_nodes.
RadialInterpolant build_interpolant(const RadialKernel& k, double target_rel_error = 1e-10,
                                    std::size_t max_nodes = kMaxInterpolantNodes);

using QuadratureProvider = std::function<QuadratureLevel(int level)>;

/// Provider for a builtin source, or t-designs from `tdesign_dir`.
QuadratureProvider quadrature_provider(QuadratureSource source, const std::filesystem::path& tdesign_dir = {});

/// Node data of one level in structure-of-arrays form for the vector kernels.
struct LevelNodes {
  std::vector<double> x, y, z;
  std::vector<double> sqrt_weight;
};

struct FrameOptions {
  CutoffFunction cutoff;
  double interpolant_tolerance = 1e-10;
};

class NeedletFrame;

/// Levels 0..J. Standard needlets when `spec` is nullopt.
NeedletFrame build_frame(int top_level, const std::optional<PowerSpectrum>& spec, const QuadratureProvider& quadrature,
                         const FrameOptions& options = {});

/// All levels j = 0..J of (modified) needlets psi_jk(s) = sqrt(lambda_jk) K_j(s . xi_jk).
///
/// Flat coefficient index: level-major, node k ascending within a level.
class NeedletFrame {
 public:
  int top_level() const noexcept { return top_level_; }
  int level_count() const noexcept { return top_level_ + 1; }
  bool is_standard() const noexcept { return !spectrum_.has_value(); }
  const std::optional<PowerSpectrum>& spectrum() const noexcept { return spectrum_; }
  const CutoffFunction& cutoff() const noexcept { return cutoff_; }

  const QuadratureLevel& quadrature(int level) const { return levels_.at(check(level)).quadrature; }
  const RadialKernel& kernel(int level) const { return levels_.at(check(level)).kernel; }
  const RadialInterpolant& interpolant(int level) const { return levels_.at(check(level)).interpolant; }
  const LevelNodes& nodes(int level) const { return levels_.at(check(level)).nodes; }

  /// Total number of coefficients, sum_j n_j.
  std::size_t size() const noexcept { return offsets_.back(); }
  std::size_t level_offset(int level) const { return offsets_.at(static_cast<std::size_t>(check(level))); }
  std::size_t level_size(int level) const { return quadrature(level).size(); }

  /// DomainError on an invalid pair or index.
  std::size_t flat_index(int level, std::size_t k) const;
  std::pair<int, std::size_t> level_and_node(std::size_t flat) const;

  /// Structured metadata: levels, n_j, band edges, certified interpolant errors.
  std::string metadata_json(int indent = 2) const;

 private:
  friend NeedletFrame build_frame(int, const std::optional<PowerSpectrum>&, const QuadratureProvider&,
                                  const FrameOptions&);
  struct Level {
    QuadratureLevel quadrature;
    RadialKernel kernel;
    RadialInterpolant interpolant;
    LevelNodes nodes;
  };
  NeedletFrame(int top_level, std::optional<PowerSpectrum> spec, CutoffFunction cutoff)
      : top_level_(top_level), spectrum_(std::move(spec)), cutoff_(cutoff) {}
  int check(int level) const;

  int top_level_;
  std::optional<PowerSpectrum> spectrum_;
  CutoffFunction cutoff_;
  std::vector<Level> levels_;
  std::vector<std::size_t> offsets_{0};
};

/// sqrt(lambda_jk) times the interpolant at s . xi_jk.
double evaluate_needlet(const NeedletFrame& frame, int level, std::size_t k, const UnitVector& s);
/// Same through direct Legendre summation.
double evaluate_needlet_direct(const NeedletFrame& frame, int level, std::size_t k, const UnitVector& s);

/// sum_k w_k psi_jk(s) for per-node weights w (w = 1 gives the level sum);
/// with `absolute`, sum_k |w_k psi_jk(s)|.
double level_sum(const NeedletFrame& frame, int level, std::span<const double> node_weights, const UnitVector& s,
                 bool absolute = false);

/// Closed-form L2 inner product
/// sqrt(lambda lambda') sum_l b_j(l) b_j'(l) A_l (2l + 1)/(4 pi) P_l(xi . xi').
double inner_product(const NeedletFrame& frame, int level, std::size_t k, int level2, std::size_t k2);

/// <psi_jk, Y_lm> = sqrt(lambda_jk) b_j(l) sqrt(A_l) Y_lm(xi_jk); exactly 0 where b_j(l) = 0.
double harmonic_coefficient(const NeedletFrame& frame, int level, std::size_t k, int ell, int m);

}  // namespace needlets
