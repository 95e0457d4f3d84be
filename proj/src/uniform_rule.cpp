#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "needlets/error.hpp"
#include "needlets/legendre.hpp"
#include "needlets/quadrature.hpp"

namespace needlets {

namespace {

// Nodes on latitude rings. Values on the nodes and harmonic coefficient vectors
// are related by the fast ring transforms below; both directions cost
// O(rings * degree^2 + nodes * degree).
class RingSet {
 public:
  RingSet(int level, int degree) : degree_(degree) {
    const int n_rings = 2 << level;
    const auto gl = gauss_legendre(n_rings);
    for (int i = 0; i < n_rings; ++i) {
      Ring ring;
      ring.z = gl.nodes[static_cast<std::size_t>(i)];
      const double sin_theta = std::sqrt(std::max(0.0, 1.0 - ring.z * ring.z));
      ring.count = std::max(3, static_cast<int>(std::lround(2.0 * n_rings * sin_theta)));
      ring.offset = (i % 2 == 1) ? 0.5 * 2.0 * kPi / ring.count : 0.0;
      ring.base_weight = gl.weights[static_cast<std::size_t>(i)] * 2.0 * kPi / ring.count;
      ring.first = size_;
      size_ += static_cast<std::size_t>(ring.count);
      rings_.push_back(ring);
    }
    const std::size_t table_size = triangular_size(degree_);
    cache_tables_ = table_size * rings_.size() <= 20'000'000;
    if (cache_tables_) {
      tables_.resize(table_size * rings_.size());
      for (std::size_t i = 0; i < rings_.size(); ++i) {
        normalized_legendre_table(degree_, rings_[i].z, std::span<double>(tables_).subspan(i * table_size, table_size));
      }
    }
  }

  std::size_t size() const { return size_; }
  std::size_t coefficient_count() const { return harmonic_count(degree_); }

  std::vector<double> base_weights() const {
    std::vector<double> w(size_);
    for (const auto& ring : rings_) {
      std::fill_n(w.begin() + static_cast<std::ptrdiff_t>(ring.first), ring.count, ring.base_weight);
    }
    return w;
  }

  std::vector<UnitVector> points() const {
    std::vector<UnitVector> out;
    out.reserve(size_);
    for (const auto& ring : rings_) {
      const double r = std::sqrt(std::max(0.0, 1.0 - ring.z * ring.z));
      for (int p = 0; p < ring.count; ++p) {
        const double phi = ring.offset + p * 2.0 * kPi / ring.count;
        out.push_back(UnitVector::normalized(r * std::cos(phi), r * std::sin(phi), ring.z));
      }
    }
    return out;
  }

  // values[k] = sum_lm coeffs[lm] Y_lm(x_k)
  void synthesize(std::span<const double> coeffs, std::span<double> values) const {
    std::vector<double> scratch;
    std::vector<double> fc(static_cast<std::size_t>(degree_) + 1);
    std::vector<double> fs(static_cast<std::size_t>(degree_) + 1);
    for (std::size_t i = 0; i < rings_.size(); ++i) {
      const auto table = ring_table(i, scratch);
      for (int m = 0; m <= degree_; ++m) {
        double c = 0.0;
        double s = 0.0;
        for (int l = m; l <= degree_; ++l) {
          const double p = table[triangular_index(l, m)];
          c += coeffs[harmonic_index(l, m)] * p;
          if (m > 0) s += coeffs[harmonic_index(l, -m)] * p;
        }
        fc[static_cast<std::size_t>(m)] = c;
        fs[static_cast<std::size_t>(m)] = s * std::sqrt(2.0);
        if (m > 0) fc[static_cast<std::size_t>(m)] *= std::sqrt(2.0);
      }
      const auto& ring = rings_[i];
      for (int p = 0; p < ring.count; ++p) {
        const double phi = ring.offset + p * 2.0 * kPi / ring.count;
        const double c1 = std::cos(phi);
        const double s1 = std::sin(phi);
        double cm = 1.0;
        double sm = 0.0;
        double v = fc[0];
        for (int m = 1; m <= degree_; ++m) {
          const double nc = cm * c1 - sm * s1;
          sm = sm * c1 + cm * s1;
          cm = nc;
          v += fc[static_cast<std::size_t>(m)] * cm + fs[static_cast<std::size_t>(m)] * sm;
        }
        values[ring.first + static_cast<std::size_t>(p)] = v;
      }
    }
  }

  // coeffs[lm] = sum_k values[k] Y_lm(x_k)
  void analyze(std::span<const double> values, std::span<double> coeffs) const {
    std::fill(coeffs.begin(), coeffs.end(), 0.0);
    std::vector<double> scratch;
    std::vector<double> cs(static_cast<std::size_t>(degree_) + 1);
    std::vector<double> ss(static_cast<std::size_t>(degree_) + 1);
    for (std::size_t i = 0; i < rings_.size(); ++i) {
      const auto& ring = rings_[i];
      std::fill(cs.begin(), cs.end(), 0.0);
      std::fill(ss.begin(), ss.end(), 0.0);
      for (int p = 0; p < ring.count; ++p) {
        const double v = values[ring.first + static_cast<std::size_t>(p)];
        const double phi = ring.offset + p * 2.0 * kPi / ring.count;
        const double c1 = std::cos(phi);
        const double s1 = std::sin(phi);
        double cm = 1.0;
        double sm = 0.0;
        cs[0] += v;
        for (int m = 1; m <= degree_; ++m) {
          const double nc = cm * c1 - sm * s1;
          sm = sm * c1 + cm * s1;
          cm = nc;
          cs[static_cast<std::size_t>(m)] += v * cm;
          ss[static_cast<std::size_t>(m)] += v * sm;
        }
      }
      const auto table = ring_table(i, scratch);
      for (int m = 0; m <= degree_; ++m) {
        const double c = (m > 0 ? std::sqrt(2.0) : 1.0) * cs[static_cast<std::size_t>(m)];
        const double s = std::sqrt(2.0) * ss[static_cast<std::size_t>(m)];
        for (int l = m; l <= degree_; ++l) {
          const double p = table[triangular_index(l, m)];
          coeffs[harmonic_index(l, m)] += p * c;
          if (m > 0) coeffs[harmonic_index(l, -m)] += p * s;
        }
      }
    }
  }

 private:
  struct Ring {
    double z = 0.0;
    int count = 0;
    double offset = 0.0;
    double base_weight = 0.0;
    std::size_t first = 0;
  };

  std::span<const double> ring_table(std::size_t i, std::vector<double>& scratch) const {
    const std::size_t table_size = triangular_size(degree_);
    if (cache_tables_) return std::span<const double>(tables_).subspan(i * table_size, table_size);
    scratch.resize(table_size);
    normalized_legendre_table(degree_, rings_[i].z, scratch);
    return scratch;
  }

  int degree_;
  std::vector<Ring> rings_;
  std::size_t size_ = 0;
  bool cache_tables_ = false;
  std::vector<double> tables_;
};

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

QuadratureLevel quasi_uniform_rule(int level) {
  if (level < 0) throw DomainError("quasi_uniform_rule: level must be non-negative");
  if (level > 8) throw DomainError("quasi_uniform_rule: level above 8 is not supported");
  const int degree = required_degree(level);
  const RingSet rings(level, degree);
  const std::vector<double> w0 = rings.base_weights();
  const std::size_t n = rings.size();
  const std::size_t nc = rings.coefficient_count();

  // Minimum-norm correction in the w0-weighted metric: w = w0 (1 + Y^T z) with
  // (Y diag(w0) Y^T) z = b - Y w0, b = sqrt(4 pi) e_00. The system matrix is close
  // to the identity because the base rule is already nearly exact.
  std::vector<double> rhs(nc);
  rings.analyze(w0, rhs);
  for (auto& v : rhs) v = -v;
  rhs[0] += std::sqrt(kFourPi);

  std::vector<double> z(nc, 0.0);
  std::vector<double> r = rhs;
  std::vector<double> p = r;
  std::vector<double> gp(nc);
  std::vector<double> node_values(n);
  double rr = dot(r, r);
  const double stop = 1e-30 + 1e-28 * dot(rhs, rhs);
  for (int iter = 0; iter < 500 && rr > stop; ++iter) {
    rings.synthesize(p, node_values);
    for (std::size_t k = 0; k < n; ++k) node_values[k] *= w0[k];
    rings.analyze(node_values, gp);
    const double alpha = rr / dot(p, gp);
    for (std::size_t i = 0; i < nc; ++i) {
      z[i] += alpha * p[i];
      r[i] -= alpha * gp[i];
    }
    const double rr_next = dot(r, r);
    const double beta = rr_next / rr;
    rr = rr_next;
    for (std::size_t i = 0; i < nc; ++i) p[i] = r[i] + beta * p[i];
  }

  rings.synthesize(z, node_values);
  std::vector<double> weights(n);
  for (std::size_t k = 0; k < n; ++k) {
    weights[k] = w0[k] * (1.0 + node_values[k]);
    if (!(weights[k] > 0.0)) throw ConvergenceError("quasi_uniform_rule: corrected weight is not positive");
  }

  std::vector<double> check(nc);
  rings.analyze(weights, check);
  check[0] -= std::sqrt(kFourPi);
  double worst = 0.0;
  for (double v : check) worst = std::max(worst, std::abs(v));
  if (worst > 1e-11) {
    throw ConvergenceError("quasi_uniform_rule: exactness residual " + std::to_string(worst) + " too large");
  }

  const auto pts = rings.points();
  std::vector<QuadratureNode> nodes;
  nodes.reserve(n);
  for (std::size_t k = 0; k < n; ++k) nodes.push_back({weights[k], pts[k]});
  return QuadratureLevel(level, std::move(nodes), degree, QuadratureSource::quasi_uniform);
}

}  // namespace needlets
