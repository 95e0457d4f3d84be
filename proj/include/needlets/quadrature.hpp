#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "needlets/sphere.hpp"

namespace needlets {

enum class QuadratureSource {
  gauss_product,  ///< Gauss-Legendre in cos(theta) times equispaced longitudes
  quasi_uniform,  ///< latitude rings with ~equal spacing, weights corrected to exactness
  tdesign,        ///< equal-weight spherical design read from a file
};

std::string to_string(QuadratureSource s);
QuadratureSource quadrature_source_from_string(const std::string& name);

struct QuadratureNode {
  double weight = 0.0;
  UnitVector point;
};

/// Smallest exactness degree a level-j rule must have: 2 (2^j - 1).
constexpr int required_degree(int level) { return 2 * ((1 << level) - 1); }

/// Positive-weight cubature for one needlet level.
///
/// Construction checks that every weight is positive, that the weights sum to
/// 4 pi within 1e-9, and that the stated exactness degree is at least
/// required_degree(level).
class QuadratureLevel {
 public:
  QuadratureLevel(int level, std::vector<QuadratureNode> nodes, int exactness_degree, QuadratureSource source);

  int level() const noexcept { return level_; }
  std::span<const QuadratureNode> nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  const QuadratureNode& operator[](std::size_t k) const { return nodes_[k]; }
  int exactness_degree() const noexcept { return exactness_degree_; }
  QuadratureSource source() const noexcept { return source_; }
  double max_weight() const noexcept;

 private:
  int level_;
  std::vector<QuadratureNode> nodes_;
  int exactness_degree_;
  QuadratureSource source_;
};

/// Gauss-Legendre nodes (descending) and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(int n);

/// 2^j Gauss-Legendre latitudes times 2^(j+1) longitudes; exact to degree 2^(j+1) - 1.
QuadratureLevel gauss_product_rule(int level);

/// Latitude rings at 2^(j+1) Gauss-Legendre nodes, each carrying about
/// 2^(j+2) sin(theta) equispaced points, with the minimum-norm weight
/// correction that makes the rule exact to required_degree(j).
/// Throws ConvergenceError if the corrected weights are not all positive.
QuadratureLevel quasi_uniform_rule(int level);

/// Reads "x y z" lines, renormalises, assigns weights 4 pi / n and checks
/// exactness through min(degree, required_degree(level)).
/// ParseError (with line number) on malformed lines, points off the sphere by
/// more than 1e-6, or empty input; DomainError if the exactness check fails.
QuadratureLevel load_tdesign(std::istream& in, int level, int degree);
QuadratureLevel load_tdesign_file(const std::filesystem::path& path, int level, int degree);

/// First run of digits in the file stem, read as the design degree ("sf014.00114" -> 14).
std::optional<int> degree_from_filename(const std::filesystem::path& path);

/// Smallest-degree design in `dir` that is exact enough for `level`.
QuadratureLevel tdesign_for_level(const std::filesystem::path& dir, int level);

/// sum_k lambda_k f(x_k)
double integrate(const std::function<double(const UnitVector&)>& f, const QuadratureLevel& q);

struct ExactnessEntry {
  int ell = 0;
  int m = 0;
  double value = 0.0;
  double expected = 0.0;
  bool pass = true;
};

struct ExactnessReport {
  int degree = 0;
  double tolerance = 0.0;
  bool pass = true;
  double worst_error = 0.0;
  int worst_ell = 0;
  int worst_m = 0;
  std::optional<int> first_failing_degree;
  std::vector<ExactnessEntry> entries;  ///< harmonic_index order
};

/// Checks integral of Y_lm = sqrt(4 pi) delta_l0 for all l <= degree, tolerance 1e-8 n.
ExactnessReport verify_exactness(const QuadratureLevel& q, int degree);

struct QuadratureReport {
  int level = 0;
  std::size_t node_count = 0;
  double max_weight = 0.0;
  double min_weight = 0.0;
  double mesh_norm = 0.0;
  double min_separation = 0.0;
  double weight_constant = 0.0;  ///< c used in lambda <= c 2^{-2j}
  double count_constant = 0.0;   ///< C used in n <= C 2^{2j}
  bool weight_bound_ok = false;
  bool count_bound_ok = false;
  bool mesh_ratio_ok = false;    ///< h_j <= min separation
};

QuadratureReport quadrature_report(const QuadratureLevel& q, double weight_constant = 10.0,
                                   double count_constant = 8.0);

}  // namespace needlets
