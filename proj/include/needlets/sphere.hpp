#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace needlets {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kFourPi = 4.0 * kPi;

/// Colatitude/longitude pair. theta in [0, pi], phi in [0, 2 pi).
struct SphericalAngles {
  double theta = 0.0;
  double phi = 0.0;
};

/// Point on the unit sphere. Always normalised to |s| = 1.
class UnitVector {
 public:
  /// North pole (0, 0, 1).
  constexpr UnitVector() = default;

  /// Normalises (x, y, z); throws DomainError for the zero vector or non-finite input.
  static UnitVector normalized(double x, double y, double z);

  double x() const noexcept { return x_; }
  double y() const noexcept { return y_; }
  double z() const noexcept { return z_; }

  /// Plain dot product; may leave [-1, 1] by a few ulps.
  double dot(const UnitVector& o) const noexcept { return x_ * o.x_ + y_ * o.y_ + z_ * o.z_; }

  /// Dot product clamped to [-1, 1].
  double cosine(const UnitVector& o) const noexcept;

  bool operator==(const UnitVector&) const = default;

 private:
  constexpr UnitVector(double x, double y, double z) : x_(x), y_(y), z_(z) {}

  double x_ = 0.0;
  double y_ = 0.0;
  double z_ = 1.0;
};

/// (sin t cos p, sin t sin p, cos t). Throws DomainError outside the angle ranges.
UnitVector point_from_angles(SphericalAngles a);

/// Inverse of point_from_angles; phi is 0 at the poles.
SphericalAngles angles_from_point(const UnitVector& s) noexcept;

/// arccos of the clamped dot product, in [0, pi].
double geodesic_distance(const UnitVector& s, const UnitVector& t) noexcept;

/// Point at geodesic distance `angle` from `origin` along the great circle
/// heading towards `toward` (or an arbitrary direction if they are parallel).
UnitVector point_along_geodesic(const UnitVector& origin, const UnitVector& toward, double angle);

/// Near-uniform spherical Fibonacci lattice.
std::vector<UnitVector> fibonacci_points(std::size_t n);

struct MeshQuantities {
  double mesh_norm = 0.0;       ///< probe estimate of sup_s min_k d(s, x_k)
  double min_separation = 0.0;  ///< exact min_{k != k'} d(x_k, x_k')
  std::size_t probe_count = 0;
};

/// Mesh norm by dense probing (Fibonacci probes, at least 16x the point count
/// and never fewer than `min_probes`) and exact minimum separation.
/// Throws DomainError for fewer than two points.
MeshQuantities mesh_quantities(std::span<const UnitVector> points, std::size_t min_probes = 20000);

/// Nearest-neighbour index over points on the sphere, bucketed on a cube grid.
class NearestNeighbor {
 public:
  explicit NearestNeighbor(std::span<const UnitVector> points);

  /// Index and chordal distance of the nearest point, optionally skipping one index.
  std::pair<std::size_t, double> nearest(const UnitVector& s, std::size_t skip = static_cast<std::size_t>(-1)) const;

 private:
  std::size_t cell_index(int ix, int iy, int iz) const;
  int cell_coord(double v) const;

  std::vector<UnitVector> points_;
  int cells_per_axis_;
  double cell_size_;
  std::vector<std::size_t> cell_start_;
  std::vector<std::size_t> cell_items_;
};

enum class GridLayout { equirectangular, explicit_points };

/// Points at which fields are synthesised.
///
/// The equirectangular layout samples cell centres, theta_i = (i + 1/2) pi / n_theta and
/// phi_p = (p + 1/2) 2 pi / n_phi, enumerated row-major (theta outer, phi inner).
class EvalGrid {
 public:
  static EvalGrid equirectangular(std::size_t n_theta, std::size_t n_phi);
  static EvalGrid from_points(std::vector<UnitVector> points);

  GridLayout layout() const noexcept { return layout_; }
  std::size_t n_theta() const noexcept { return n_theta_; }
  std::size_t n_phi() const noexcept { return n_phi_; }
  std::size_t size() const noexcept { return points_.size(); }
  std::span<const UnitVector> points() const noexcept { return points_; }
  const UnitVector& operator[](std::size_t i) const { return points_[i]; }

  /// Row/column of the equirectangular cell containing s.
  std::pair<std::size_t, std::size_t> cell_of(const UnitVector& s) const;

 private:
  GridLayout layout_ = GridLayout::explicit_points;
  std::size_t n_theta_ = 0;
  std::size_t n_phi_ = 0;
  std::vector<UnitVector> points_;
};

}  // namespace needlets
