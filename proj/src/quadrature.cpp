#include "needlets/quadrature.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "needlets/error.hpp"
#include "needlets/legendre.hpp"

namespace needlets {

std::string to_string(QuadratureSource s) {
  switch (s) {
    case QuadratureSource::gauss_product: return "gauss";
    case QuadratureSource::quasi_uniform: return "uniform";
    case QuadratureSource::tdesign: return "tdesign";
  }
  return "unknown";
}

QuadratureSource quadrature_source_from_string(const std::string& name) {
  if (name == "gauss" || name == "builtin") return QuadratureSource::gauss_product;
  if (name == "uniform") return QuadratureSource::quasi_uniform;
  if (name == "tdesign") return QuadratureSource::tdesign;
  throw DomainError("unknown quadrature source '" + name + "' (expected gauss, uniform or tdesign)");
}

QuadratureLevel::QuadratureLevel(int level, std::vector<QuadratureNode> nodes, int exactness_degree,
                                 QuadratureSource source)
    : level_(level), nodes_(std::move(nodes)), exactness_degree_(exactness_degree), source_(source) {
  if (level_ < 0) throw DomainError("QuadratureLevel: level must be non-negative");
  if (nodes_.empty()) throw DomainError("QuadratureLevel: no nodes");
  if (exactness_degree_ < required_degree(level_)) {
    throw DomainError("QuadratureLevel: level " + std::to_string(level_) + " needs exactness degree " +
                      std::to_string(required_degree(level_)) + ", got " + std::to_string(exactness_degree_));
  }
  double total = 0.0;
  for (const auto& node : nodes_) {
    if (!(node.weight > 0.0)) throw DomainError("QuadratureLevel: weights must be strictly positive");
    total += node.weight;
  }
  if (std::abs(total - kFourPi) > 1e-9) {
    throw DomainError("QuadratureLevel: weights sum to " + std::to_string(total) + ", expected 4 pi");
  }
}

double QuadratureLevel::max_weight() const noexcept {
  double w = 0.0;
  for (const auto& node : nodes_) w = std::max(w, node.weight);
  return w;
}

GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: need at least one node");
  GaussLegendre gl;
  gl.nodes.resize(static_cast<std::size_t>(n));
  gl.weights.resize(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int l = 1; l < n; ++l) {
        const double p2 = ((2.0 * l + 1.0) * x * p1 - l * p0) / (l + 1.0);
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // derivative at the converged node
    double p0 = 1.0;
    double p1 = x;
    for (int l = 1; l < n; ++l) {
      const double p2 = ((2.0 * l + 1.0) * x * p1 - l * p0) / (l + 1.0);
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    gl.nodes[static_cast<std::size_t>(i)] = x;
    gl.weights[static_cast<std::size_t>(i)] = w;
    gl.nodes[static_cast<std::size_t>(n - 1 - i)] = -x;
    gl.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) gl.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return gl;
}

QuadratureLevel gauss_product_rule(int level) {
  if (level < 0) throw DomainError("gauss_product_rule: level must be non-negative");
  if (level > 12) throw DomainError("gauss_product_rule: level above 12 is not supported");
  const int n_lat = 1 << level;
  const int n_lon = 2 * n_lat;
  const auto gl = gauss_legendre(n_lat);
  const double dphi = 2.0 * kPi / n_lon;

  std::vector<QuadratureNode> nodes;
  nodes.reserve(static_cast<std::size_t>(n_lat) * n_lon);
  for (int i = 0; i < n_lat; ++i) {
    const double z = gl.nodes[static_cast<std::size_t>(i)];
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    for (int p = 0; p < n_lon; ++p) {
      const double phi = p * dphi;
      nodes.push_back({gl.weights[static_cast<std::size_t>(i)] * dphi,
                       UnitVector::normalized(r * std::cos(phi), r * std::sin(phi), z)});
    }
  }
  return QuadratureLevel(level, std::move(nodes), 2 * n_lat - 1, QuadratureSource::gauss_product);
}

QuadratureLevel load_tdesign(std::istream& in, int level, int degree) {
  std::vector<QuadratureNode> nodes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    std::istringstream fields(line);
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    if (!(fields >> x >> y >> z)) throw ParseError("expected three numbers 'x y z'", line_no);
    std::string extra;
    if (fields >> extra) throw ParseError("unexpected trailing field '" + extra + "'", line_no);
    const double norm = std::sqrt(x * x + y * y + z * z);
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-6) {
      throw ParseError("point norm " + std::to_string(norm) + " is not within 1e-6 of 1", line_no);
    }
    nodes.push_back({0.0, UnitVector::normalized(x, y, z)});
  }
  if (nodes.empty()) throw ParseError("t-design file contains no points", 0);
  const double w = kFourPi / static_cast<double>(nodes.size());
  for (auto& node : nodes) node.weight = w;

  QuadratureLevel q(level, std::move(nodes), degree, QuadratureSource::tdesign);
  const auto report = verify_exactness(q, std::min(degree, required_degree(level)));
  if (!report.pass) {
    throw DomainError("t-design is not exact: integral of Y(" + std::to_string(report.worst_ell) + "," +
                      std::to_string(report.worst_m) + ") off by " + std::to_string(report.worst_error));
  }
  return q;
}

QuadratureLevel load_tdesign_file(const std::filesystem::path& path, int level, int degree) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open t-design file " + path.string(), 0);
  return load_tdesign(in, level, degree);
}

std::optional<int> degree_from_filename(const std::filesystem::path& path) {
  const std::string stem = path.filename().string();
  const auto begin = std::find_if(stem.begin(), stem.end(), [](unsigned char c) { return std::isdigit(c); });
  if (begin == stem.end()) return std::nullopt;
  const auto end = std::find_if(begin, stem.end(), [](unsigned char c) { return !std::isdigit(c); });
  return std::stoi(std::string(begin, end));
}

QuadratureLevel tdesign_for_level(const std::filesystem::path& dir, int level) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ParseError("t-design directory " + dir.string() + " does not exist", 0);
  const int needed = required_degree(level);
  std::optional<std::pair<int, fs::path>> best;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto degree = degree_from_filename(entry.path());
    if (!degree || *degree < needed) continue;
    if (!best || *degree < best->first || (*degree == best->first && entry.path() < best->second)) {
      best = std::make_pair(*degree, entry.path());
    }
  }
  if (!best) {
    throw DomainError("no t-design of degree >= " + std::to_string(needed) + " in " + dir.string() +
                      " for level " + std::to_string(level));
  }
  return load_tdesign_file(best->second, level, best->first);
}

double integrate(const std::function<double(const UnitVector&)>& f, const QuadratureLevel& q) {
  double sum = 0.0;
  for (const auto& node : q.nodes()) sum += node.weight * f(node.point);
  return sum;
}

ExactnessReport verify_exactness(const QuadratureLevel& q, int degree) {
  if (degree < 0) throw DomainError("verify_exactness: degree must be non-negative");
  ExactnessReport report;
  report.degree = degree;
  report.tolerance = 1e-8 * static_cast<double>(q.size());

  std::vector<double> sums(harmonic_count(degree), 0.0);
  std::vector<double> y(harmonic_count(degree));
  for (const auto& node : q.nodes()) {
    real_sph_harm_all(degree, node.point, y);
    for (std::size_t i = 0; i < sums.size(); ++i) sums[i] += node.weight * y[i];
  }

  report.entries.reserve(sums.size());
  for (int l = 0; l <= degree; ++l) {
    for (int m = -l; m <= l; ++m) {
      ExactnessEntry e;
      e.ell = l;
      e.m = m;
      e.value = sums[harmonic_index(l, m)];
      e.expected = (l == 0) ? std::sqrt(kFourPi) : 0.0;
      const double err = std::abs(e.value - e.expected);
      e.pass = err <= report.tolerance;
      if (err > report.worst_error) {
        report.worst_error = err;
        report.worst_ell = l;
        report.worst_m = m;
      }
      if (!e.pass) {
        report.pass = false;
        if (!report.first_failing_degree) report.first_failing_degree = l;
      }
      report.entries.push_back(e);
    }
  }
  return report;
}

QuadratureReport quadrature_report(const QuadratureLevel& q, double weight_constant, double count_constant) {
  QuadratureReport r;
  r.level = q.level();
  r.node_count = q.size();
  r.max_weight = q.max_weight();
  r.min_weight = std::numeric_limits<double>::infinity();
  for (const auto& node : q.nodes()) r.min_weight = std::min(r.min_weight, node.weight);
  r.weight_constant = weight_constant;
  r.count_constant = count_constant;
  const double scale = std::ldexp(1.0, 2 * q.level());
  r.weight_bound_ok = r.max_weight <= weight_constant / scale;
  r.count_bound_ok = static_cast<double>(r.node_count) <= count_constant * scale;
  if (q.size() >= 2) {
    std::vector<UnitVector> pts;
    pts.reserve(q.size());
    for (const auto& node : q.nodes()) pts.push_back(node.point);
    const auto mesh = mesh_quantities(pts);
    r.mesh_norm = mesh.mesh_norm;
    r.min_separation = mesh.min_separation;
    r.mesh_ratio_ok = r.mesh_norm <= r.min_separation;
  } else {
    r.mesh_norm = kPi;
    r.min_separation = std::numeric_limits<double>::infinity();
    r.mesh_ratio_ok = true;
  }
  return r;
}

}  // namespace needlets
