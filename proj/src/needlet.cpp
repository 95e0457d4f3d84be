#include "needlets/needlet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "needlets/error.hpp"
#include "needlets/legendre.hpp"
#include "needlets/simd/kernels.hpp"

namespace needlets {

RadialKernel build_radial_kernel(int level, const PowerSpectrum* spec, const CutoffFunction& kappa) {
  if (level < 0) throw DomainError("build_radial_kernel: negative level");
  const Band band = active_band(level);
  if (spec && !spec->covers(band.hi)) {
    throw DomainError("spectrum ends at l = " + std::to_string(spec->max_degree()) + " but level " +
                      std::to_string(level) + " needs l = " + std::to_string(band.hi));
  }
  RadialKernel k;
  k.level_ = level;
  k.standard_ = spec == nullptr;
  k.band_ = band;
  const auto size = static_cast<std::size_t>(band.hi) + 1;
  k.coeffs_.assign(size, 0.0);
  k.window_.assign(size, 0.0);
  k.sqrt_a_.assign(size, 1.0);
  for (int l = 0; l <= band.hi; ++l) {
    const auto i = static_cast<std::size_t>(l);
    if (spec) k.sqrt_a_[i] = spec->sqrt_value(l);
    k.window_[i] = window_b(kappa, level, l);
    if (l < band.lo) continue;
    k.coeffs_[i] = k.window_[i] * k.sqrt_a_[i] * (2.0 * l + 1.0) / kFourPi;
  }
  return k;
}

double RadialKernel::value_at_one() const noexcept {
  double s = 0.0;
  for (double c : coeffs_) s += c;
  return s;
}

double kernel_value(const RadialKernel& k, double t) {
  if (!(std::abs(t) <= 1.0)) throw DomainError("kernel_value: |t| > 1");
  return legendre_series_eval(k.coefficients(), t);
}

double RadialInterpolant::operator()(double t) const noexcept {
  t = std::clamp(t, -1.0, 1.0);
  double out = 0.0;
  simd::active_kernels().chebyshev_eval(coeffs_, std::span<const double>(&t, 1), std::span<double>(&out, 1));
  return out;
}

namespace {

// Coefficients of the degree n-1 interpolant through first-kind Chebyshev nodes.
std::vector<double> chebyshev_coefficients(std::span<const double> f) {
  const std::size_t n = f.size();
  // cos(pi m / (2n)) for m in [0, 4n)
  std::vector<double> table(4 * n);
  for (std::size_t m = 0; m < table.size(); ++m) table[m] = std::cos(kPi * static_cast<double>(m) / (2.0 * n));
  std::vector<double> a(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += f[i] * table[(k * (2 * i + 1)) % (4 * n)];
    a[k] = 2.0 * s / static_cast<double>(n);
  }
  a[0] *= 0.5;
  return a;
}

}  // namespace

RadialInterpolant build_interpolant(const RadialKernel& k, double target_rel_error, std::size_t max_nodes) {
  if (!(target_rel_error > 0.0)) throw DomainError("build_interpolant: target must be positive");
  const auto& ks = simd::active_kernels();
  const std::size_t probes = 10 * (std::size_t{1} << k.level()) + 1;
  std::vector<double> t(probes), exact(probes), approx(probes);
  for (std::size_t i = 0; i < probes; ++i) t[i] = std::cos(kPi * static_cast<double>(i) / static_cast<double>(probes - 1));
  ks.legendre_eval(k.coefficients(), t, exact);
  double peak = 0.0;
  for (double v : exact) peak = std::max(peak, std::abs(v));
  double coeff_mass = 0.0;
  for (double c : k.coefficients()) coeff_mass += std::abs(c);

  for (std::size_t n = 8; n <= max_nodes; n *= 2) {
    std::vector<double> nodes(n), f(n);
    for (std::size_t i = 0; i < n; ++i) nodes[i] = std::cos(kPi * (static_cast<double>(i) + 0.5) / static_cast<double>(n));
    ks.legendre_eval(k.coefficients(), nodes, f);
    std::vector<double> a = chebyshev_coefficients(f);
    ks.chebyshev_eval(a, t, approx);
    double err = 0.0;
    for (std::size_t i = 0; i < probes; ++i) err = std::max(err, std::abs(approx[i] - exact[i]));
    if (err <= target_rel_error * peak) {
      RadialInterpolant r;
      r.level_ = k.level();
      double cheb_mass = 0.0;
      for (double c : a) cheb_mass += std::abs(c);
      r.coeffs_ = std::move(a);
      r.peak_ = peak;
      // probe maximum plus rounding of both recurrences, which grows with the degree
      const double eps = std::numeric_limits<double>::epsilon();
      const double degree = static_cast<double>(std::max(n, k.coefficients().size()));
      r.abs_error_ = err + 2.0 * degree * eps * (coeff_mass + cheb_mass);
      return r;
    }
  }
  throw ConvergenceError("build_interpolant: level " + std::to_string(k.level()) + " not resolved with " +
                         std::to_string(max_nodes) + " nodes");
}

QuadratureProvider quadrature_provider(QuadratureSource source, const std::filesystem::path& tdesign_dir) {
  switch (source) {
    case QuadratureSource::gauss_product: return [](int j) { return gauss_product_rule(j); };
    case QuadratureSource::quasi_uniform: return [](int j) { return quasi_uniform_rule(j); };
    case QuadratureSource::tdesign:
      if (tdesign_dir.empty()) throw DomainError("t-design quadrature needs a directory");
      return [tdesign_dir](int j) { return tdesign_for_level(tdesign_dir, j); };
  }
  throw DomainError("unknown quadrature source");
}

NeedletFrame build_frame(int top_level, const std::optional<PowerSpectrum>& spec, const QuadratureProvider& quadrature,
                         const FrameOptions& options) {
  if (top_level < 0) throw DomainError("build_frame: J must be >= 0");
  NeedletFrame frame(top_level, spec, options.cutoff);
  frame.levels_.reserve(static_cast<std::size_t>(top_level) + 1);
  for (int j = 0; j <= top_level; ++j) {
    QuadratureLevel q = quadrature(j);
    if (q.level() != j) throw DomainError("quadrature provider returned level " + std::to_string(q.level()));
    if (q.exactness_degree() < required_degree(j)) {
      throw DomainError("quadrature at level " + std::to_string(j) + " is exact only to degree " +
                        std::to_string(q.exactness_degree()));
    }
    RadialKernel kernel = build_radial_kernel(j, spec ? &*spec : nullptr, options.cutoff);
    RadialInterpolant interp = build_interpolant(kernel, options.interpolant_tolerance);
    LevelNodes nodes;
    const std::size_t n = q.size();
    nodes.x.resize(n);
    nodes.y.resize(n);
    nodes.z.resize(n);
    nodes.sqrt_weight.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      nodes.x[k] = q[k].point.x();
      nodes.y[k] = q[k].point.y();
      nodes.z[k] = q[k].point.z();
      nodes.sqrt_weight[k] = std::sqrt(q[k].weight);
    }
    frame.offsets_.push_back(frame.offsets_.back() + n);
    frame.levels_.push_back({std::move(q), std::move(kernel), std::move(interp), std::move(nodes)});
  }
  return frame;
}

int NeedletFrame::check(int level) const {
  if (level < 0 || level > top_level_) {
    throw DomainError("level " + std::to_string(level) + " outside 0.." + std::to_string(top_level_));
  }
  return level;
}

std::size_t NeedletFrame::flat_index(int level, std::size_t k) const {
  if (k >= level_size(level)) {
    throw DomainError("node " + std::to_string(k) + " outside level " + std::to_string(level));
  }
  return level_offset(level) + k;
}

std::pair<int, std::size_t> NeedletFrame::level_and_node(std::size_t flat) const {
  if (flat >= size()) throw DomainError("flat index " + std::to_string(flat) + " out of range");
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), flat);
  const auto level = static_cast<int>(it - offsets_.begin()) - 1;
  return {level, flat - offsets_[static_cast<std::size_t>(level)]};
}

std::string NeedletFrame::metadata_json(int indent) const {
  nlohmann::json doc;
  doc["top_level"] = top_level_;
  doc["standard"] = is_standard();
  doc["spectrum"] = spectrum_ ? spectrum_->describe() : std::string("standard");
  doc["cutoff"] = cutoff_.smoothness();
  doc["coefficient_count"] = size();
  doc["index_order"] = "level-major, node ascending";
  nlohmann::json levels = nlohmann::json::array();
  for (int j = 0; j <= top_level_; ++j) {
    const auto& lv = levels_[static_cast<std::size_t>(j)];
    levels.push_back({{"level", j},
                      {"nodes", lv.quadrature.size()},
                      {"offset", offsets_[static_cast<std::size_t>(j)]},
                      {"quadrature", to_string(lv.quadrature.source())},
                      {"exactness_degree", lv.quadrature.exactness_degree()},
                      {"band_lo", lv.kernel.band().lo},
                      {"band_hi", lv.kernel.band().hi},
                      {"interpolant_nodes", lv.interpolant.node_count()},
                      {"interpolant_error", lv.interpolant.certified_error()},
                      {"kernel_peak", lv.interpolant.peak()}});
  }
  doc["levels"] = std::move(levels);
  return doc.dump(indent);
}

double evaluate_needlet(const NeedletFrame& frame, int level, std::size_t k, const UnitVector& s) {
  frame.flat_index(level, k);
  const auto& q = frame.quadrature(level);
  return std::sqrt(q[k].weight) * frame.interpolant(level)(s.cosine(q[k].point));
}

double evaluate_needlet_direct(const NeedletFrame& frame, int level, std::size_t k, const UnitVector& s) {
  frame.flat_index(level, k);
  const auto& q = frame.quadrature(level);
  return std::sqrt(q[k].weight) * kernel_value(frame.kernel(level), s.cosine(q[k].point));
}

double level_sum(const NeedletFrame& frame, int level, std::span<const double> node_weights, const UnitVector& s,
                 bool absolute) {
  const LevelNodes& nodes = frame.nodes(level);
  std::span<const double> scale = nodes.sqrt_weight;
  thread_local std::vector<double> buffer;
  if (!node_weights.empty()) {
    if (node_weights.size() != nodes.x.size()) throw DomainError("level_sum: weight count mismatch");
    buffer.resize(node_weights.size());
    for (std::size_t k = 0; k < buffer.size(); ++k) buffer[k] = nodes.sqrt_weight[k] * node_weights[k];
    scale = buffer;
  }
  const simd::NodeView view{nodes.x, nodes.y, nodes.z, scale};
  return simd::active_kernels().radial_sum(frame.interpolant(level).chebyshev_coefficients(), view, s.x(), s.y(),
                                           s.z(), absolute);
}

double inner_product(const NeedletFrame& frame, int level, std::size_t k, int level2, std::size_t k2) {
  frame.flat_index(level, k);
  frame.flat_index(level2, k2);
  const RadialKernel& a = frame.kernel(level);
  const RadialKernel& b = frame.kernel(level2);
  // windows are taken straight from kappa, so disjoint bands give exact zeros
  const int hi = std::min(a.band().hi, b.band().hi);
  std::vector<double> c(static_cast<std::size_t>(hi) + 1, 0.0);
  for (int l = 0; l <= hi; ++l) {
    const auto i = static_cast<std::size_t>(l);
    c[i] = a.window()[i] * b.window()[i] * a.sqrt_spectrum()[i] * a.sqrt_spectrum()[i] * (2.0 * l + 1.0) / kFourPi;
  }
  const auto& p = frame.quadrature(level)[k];
  const auto& p2 = frame.quadrature(level2)[k2];
  return std::sqrt(p.weight * p2.weight) * legendre_series_eval(c, p.point.cosine(p2.point));
}

double harmonic_coefficient(const NeedletFrame& frame, int level, std::size_t k, int ell, int m) {
  frame.flat_index(level, k);
  if (ell < 0 || std::abs(m) > ell) throw DomainError("harmonic_coefficient: need |m| <= l");
  const double b = window_b(frame.cutoff(), level, ell);
  if (b == 0.0) return 0.0;
  const double sqrt_a = frame.spectrum() ? frame.spectrum()->sqrt_value(ell) : 1.0;
  const auto& node = frame.quadrature(level)[k];
  return std::sqrt(node.weight) * b * sqrt_a * real_sph_harm(ell, m, node.point);
}

}  // namespace needlets
