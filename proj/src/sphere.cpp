#include "needlets/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "needlets/error.hpp"

namespace needlets {

UnitVector UnitVector::normalized(double x, double y, double z) {
  const double norm = std::sqrt(x * x + y * y + z * z);
  if (!std::isfinite(norm) || norm == 0.0) {
    throw DomainError("UnitVector: cannot normalise a zero or non-finite vector");
  }
  return UnitVector(x / norm, y / norm, z / norm);
}

double UnitVector::cosine(const UnitVector& o) const noexcept {
  return std::clamp(dot(o), -1.0, 1.0);
}

UnitVector point_from_angles(SphericalAngles a) {
  if (!(a.theta >= 0.0 && a.theta <= kPi)) {
    throw DomainError("point_from_angles: theta must lie in [0, pi]");
  }
  if (!(a.phi >= 0.0 && a.phi < 2.0 * kPi)) {
    throw DomainError("point_from_angles: phi must lie in [0, 2 pi)");
  }
  const double st = std::sin(a.theta);
  return UnitVector::normalized(st * std::cos(a.phi), st * std::sin(a.phi), std::cos(a.theta));
}

SphericalAngles angles_from_point(const UnitVector& s) noexcept {
  const double rho = std::hypot(s.x(), s.y());
  SphericalAngles a;
  a.theta = std::atan2(rho, s.z());
  if (rho == 0.0) {
    a.phi = 0.0;
    return a;
  }
  double phi = std::atan2(s.y(), s.x());
  if (phi < 0.0) phi += 2.0 * kPi;
  if (phi >= 2.0 * kPi) phi = 0.0;
  a.phi = phi;
  return a;
}

double geodesic_distance(const UnitVector& s, const UnitVector& t) noexcept {
  // atan2 form keeps full precision near 0 and pi, where acos loses half the digits
  const double cx = s.y() * t.z() - s.z() * t.y();
  const double cy = s.z() * t.x() - s.x() * t.z();
  const double cz = s.x() * t.y() - s.y() * t.x();
  return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), s.dot(t));
}

UnitVector point_along_geodesic(const UnitVector& origin, const UnitVector& toward, double angle) {
  const double c = origin.dot(toward);
  double dx = toward.x() - c * origin.x();
  double dy = toward.y() - c * origin.y();
  double dz = toward.z() - c * origin.z();
  double norm = std::sqrt(dx * dx + dy * dy + dz * dz);
  if (norm < 1e-12) {
    // any tangent direction will do; take the one orthogonal to the smallest component
    const bool use_x = std::abs(origin.x()) <= std::abs(origin.y()) && std::abs(origin.x()) <= std::abs(origin.z());
    const double ex = use_x ? 1.0 : 0.0;
    const double ey = use_x ? 0.0 : (std::abs(origin.y()) <= std::abs(origin.z()) ? 1.0 : 0.0);
    const double ez = 1.0 - ex - ey;
    const double ce = origin.x() * ex + origin.y() * ey + origin.z() * ez;
    dx = ex - ce * origin.x();
    dy = ey - ce * origin.y();
    dz = ez - ce * origin.z();
    norm = std::sqrt(dx * dx + dy * dy + dz * dz);
  }
  dx /= norm;
  dy /= norm;
  dz /= norm;
  const double ca = std::cos(angle);
  const double sa = std::sin(angle);
  return UnitVector::normalized(ca * origin.x() + sa * dx, ca * origin.y() + sa * dy, ca * origin.z() + sa * dz);
}

std::vector<UnitVector> fibonacci_points(std::size_t n) {
  std::vector<UnitVector> out;
  out.reserve(n);
  const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
  for (std::size_t k = 0; k < n; ++k) {
    const double z = 1.0 - (2.0 * static_cast<double>(k) + 1.0) / static_cast<double>(n);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * static_cast<double>(k);
    out.push_back(UnitVector::normalized(r * std::cos(phi), r * std::sin(phi), z));
  }
  return out;
}

NearestNeighbor::NearestNeighbor(std::span<const UnitVector> points)
    : points_(points.begin(), points.end()) {
  const double per_axis = std::ceil(std::sqrt(static_cast<double>(points_.size()) / 4.0));
  cells_per_axis_ = static_cast<int>(std::clamp(per_axis, 1.0, 160.0));
  cell_size_ = 2.0 / cells_per_axis_;

  const std::size_t ncell = static_cast<std::size_t>(cells_per_axis_) * cells_per_axis_ * cells_per_axis_;
  std::vector<std::size_t> owner(points_.size());
  cell_start_.assign(ncell + 1, 0);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    owner[i] = cell_index(cell_coord(p.x()), cell_coord(p.y()), cell_coord(p.z()));
    ++cell_start_[owner[i] + 1];
  }
  for (std::size_t c = 0; c < ncell; ++c) cell_start_[c + 1] += cell_start_[c];
  cell_items_.resize(points_.size());
  std::vector<std::size_t> fill(cell_start_.begin(), cell_start_.end() - 1);
  for (std::size_t i = 0; i < points_.size(); ++i) cell_items_[fill[owner[i]]++] = i;
}

int NearestNeighbor::cell_coord(double v) const {
  const int c = static_cast<int>(std::floor((v + 1.0) / cell_size_));
  return std::clamp(c, 0, cells_per_axis_ - 1);
}

std::size_t NearestNeighbor::cell_index(int ix, int iy, int iz) const {
  const auto g = static_cast<std::size_t>(cells_per_axis_);
  return (static_cast<std::size_t>(ix) * g + static_cast<std::size_t>(iy)) * g + static_cast<std::size_t>(iz);
}

std::pair<std::size_t, double> NearestNeighbor::nearest(const UnitVector& s, std::size_t skip) const {
  const int cx = cell_coord(s.x());
  const int cy = cell_coord(s.y());
  const int cz = cell_coord(s.z());
  std::size_t best = skip;
  double best_d2 = std::numeric_limits<double>::infinity();
  const int g = cells_per_axis_;
  for (int r = 0; r <= g; ++r) {
    for (int dx = -r; dx <= r; ++dx) {
      const int ix = cx + dx;
      if (ix < 0 || ix >= g) continue;
      for (int dy = -r; dy <= r; ++dy) {
        const int iy = cy + dy;
        if (iy < 0 || iy >= g) continue;
        const bool on_shell = std::abs(dx) == r || std::abs(dy) == r;
        for (int dz = -r; dz <= r; dz += (on_shell || r == 0) ? 1 : 2 * r) {
          const int iz = cz + dz;
          if (iz < 0 || iz >= g) continue;
          const std::size_t c = cell_index(ix, iy, iz);
          for (std::size_t it = cell_start_[c]; it < cell_start_[c + 1]; ++it) {
            const std::size_t i = cell_items_[it];
            if (i == skip) continue;
            const auto& p = points_[i];
            const double ex = p.x() - s.x();
            const double ey = p.y() - s.y();
            const double ez = p.z() - s.z();
            const double d2 = ex * ex + ey * ey + ez * ez;
            if (d2 < best_d2) {
              best_d2 = d2;
              best = i;
            }
          }
        }
      }
    }
    // unscanned cells are at least r cells away along some axis
    const double reach = r * cell_size_;
    if (best_d2 <= reach * reach) break;
  }
  return {best, std::sqrt(best_d2)};
}

namespace {

double chord_to_angle(double chord) { return 2.0 * std::asin(std::min(1.0, chord / 2.0)); }

}  // namespace

MeshQuantities mesh_quantities(std::span<const UnitVector> points, std::size_t min_probes) {
  if (points.size() < 2) throw DomainError("mesh_quantities: need at least two points");
  const NearestNeighbor index(points);

  MeshQuantities q;
  q.min_separation = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    q.min_separation = std::min(q.min_separation, chord_to_angle(index.nearest(points[i], i).second));
  }

  q.probe_count = std::max(16 * points.size(), min_probes);
  for (const auto& probe : fibonacci_points(q.probe_count)) {
    q.mesh_norm = std::max(q.mesh_norm, chord_to_angle(index.nearest(probe).second));
  }
  return q;
}

EvalGrid EvalGrid::equirectangular(std::size_t n_theta, std::size_t n_phi) {
  if (n_theta == 0 || n_phi == 0) throw DomainError("EvalGrid: grid dimensions must be positive");
  EvalGrid g;
  g.layout_ = GridLayout::equirectangular;
  g.n_theta_ = n_theta;
  g.n_phi_ = n_phi;
  g.points_.reserve(n_theta * n_phi);
  for (std::size_t i = 0; i < n_theta; ++i) {
    const double theta = (static_cast<double>(i) + 0.5) * kPi / static_cast<double>(n_theta);
    for (std::size_t p = 0; p < n_phi; ++p) {
      const double phi = (static_cast<double>(p) + 0.5) * 2.0 * kPi / static_cast<double>(n_phi);
      g.points_.push_back(point_from_angles({theta, phi}));
    }
  }
  return g;
}

EvalGrid EvalGrid::from_points(std::vector<UnitVector> points) {
  EvalGrid g;
  g.layout_ = GridLayout::explicit_points;
  g.points_ = std::move(points);
  return g;
}

std::pair<std::size_t, std::size_t> EvalGrid::cell_of(const UnitVector& s) const {
  if (layout_ != GridLayout::equirectangular) throw DomainError("EvalGrid::cell_of: grid is not equirectangular");
  const auto a = angles_from_point(s);
  auto row = static_cast<std::size_t>(a.theta / kPi * static_cast<double>(n_theta_));
  auto col = static_cast<std::size_t>(a.phi / (2.0 * kPi) * static_cast<double>(n_phi_));
  row = std::min(row, n_theta_ - 1);
  col = col % n_phi_;
  return {row, col};
}

}  // namespace needlets
