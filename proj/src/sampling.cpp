#include "needlets/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "needlets/error.hpp"
#include "needlets/legendre.hpp"
#include "needlets/rng.hpp"
#include "needlets/simd/kernels.hpp"

namespace needlets {

std::string to_string(Expansion e) { return e == Expansion::kl ? "kl" : "needlet"; }

Expansion expansion_from_string(const std::string& name) {
  if (name == "kl") return Expansion::kl;
  if (name == "needlet") return Expansion::needlet;
  throw DomainError("unknown expansion '" + name + "' (expected kl or needlet)");
}

CoefficientVector draw_coefficients(std::uint64_t seed, std::size_t count, std::uint64_t stream) {
  CoefficientVector c;
  c.seed = seed;
  c.stream = stream;
  c.values = standard_normals(seed, count, stream);
  return c;
}

namespace {

std::string spectrum_label(const NeedletFrame& frame) {
  return frame.spectrum() ? frame.spectrum()->describe() : std::string("standard");
}

void require_cover(const PowerSpectrum& spec, int L) {
  if (L < 0) throw DomainError("truncation degree must be non-negative");
  if (!spec.covers(L)) {
    throw DomainError("spectrum ends at l = " + std::to_string(spec.max_degree()) + ", need l = " + std::to_string(L));
  }
}

}  // namespace

std::vector<double> synthesize_harmonics(std::span<const double> alm, int L, const EvalGrid& grid) {
  if (alm.size() != harmonic_count(L)) throw DomainError("synthesize_harmonics: expected (L+1)^2 coefficients");
  std::vector<double> out(grid.size(), 0.0);
  if (grid.layout() != GridLayout::equirectangular) {
    std::vector<double> y(harmonic_count(L));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      real_sph_harm_all(L, grid[i], y);
      double s = 0.0;
      for (std::size_t h = 0; h < y.size(); ++h) s += alm[h] * y[h];
      out[i] = s;
    }
    return out;
  }

  const std::size_t nt = grid.n_theta();
  const std::size_t np = grid.n_phi();
  const auto lm = static_cast<std::size_t>(L) + 1;
  // cos(m phi_p), sin(m phi_p), m-major
  std::vector<double> cosm(lm * np), sinm(lm * np);
  for (std::size_t m = 0; m < lm; ++m) {
    for (std::size_t p = 0; p < np; ++p) {
      const double phi = (static_cast<double>(p) + 0.5) * 2.0 * kPi / static_cast<double>(np);
      cosm[m * np + p] = std::cos(static_cast<double>(m) * phi);
      sinm[m * np + p] = std::sin(static_cast<double>(m) * phi);
    }
  }
  std::vector<double> table(triangular_size(L));
  std::vector<double> am(lm), bm(lm);
  for (std::size_t i = 0; i < nt; ++i) {
    const double theta = (static_cast<double>(i) + 0.5) * kPi / static_cast<double>(nt);
    normalized_legendre_table(L, std::cos(theta), table);
    for (int m = 0; m <= L; ++m) {
      double a = 0.0, b = 0.0;
      for (int l = m; l <= L; ++l) {
        const double p = table[triangular_index(l, m)];
        a += alm[harmonic_index(l, m)] * p;
        if (m > 0) b += alm[harmonic_index(l, -m)] * p;
      }
      const double r = m > 0 ? std::sqrt(2.0) : 1.0;
      am[static_cast<std::size_t>(m)] = r * a;
      bm[static_cast<std::size_t>(m)] = r * b;
    }
    double* row = out.data() + i * np;
    for (std::size_t m = 0; m < lm; ++m) {
      const double a = am[m], b = bm[m];
      const double* c = cosm.data() + m * np;
      const double* s = sinm.data() + m * np;
      for (std::size_t p = 0; p < np; ++p) row[p] += a * c[p] + b * s[p];
    }
  }
  return out;
}

FieldRealization kl_synthesize(const PowerSpectrum& spec, int L, std::span<const double> coeffs, const EvalGrid& grid) {
  require_cover(spec, L);
  if (coeffs.size() != harmonic_count(L)) {
    throw DomainError("KL synthesis needs (L+1)^2 = " + std::to_string(harmonic_count(L)) + " coefficients");
  }
  std::vector<double> alm(coeffs.begin(), coeffs.end());
  for (int l = 0; l <= L; ++l) {
    const double r = spec.sqrt_value(l);
    for (int m = -l; m <= l; ++m) alm[harmonic_index(l, m)] *= r;
  }
  FieldRealization f{grid, synthesize_harmonics(alm, L, grid), {Expansion::kl, L, 0, spec.describe()}};
  return f;
}

FieldRealization kl_sample(std::uint64_t seed, const PowerSpectrum& spec, int L, const EvalGrid& grid) {
  require_cover(spec, L);
  const auto y = draw_coefficients(seed, harmonic_count(L));
  FieldRealization f = kl_synthesize(spec, L, y.values, grid);
  f.provenance.seed = seed;
  return f;
}

std::vector<double> needlet_to_harmonics(const NeedletFrame& frame, std::span<const double> coeffs) {
  if (coeffs.size() != frame.size()) throw DomainError("needlet_to_harmonics: coefficient count mismatch");
  const int L = (1 << frame.top_level()) - 1;
  std::vector<double> alm(harmonic_count(L), 0.0);
  std::vector<double> y(harmonic_count(L));
  for (int j = 0; j <= frame.top_level(); ++j) {
    const RadialKernel& ker = frame.kernel(j);
    const Band band = ker.band();
    const auto& q = frame.quadrature(j);
    const std::size_t off = frame.level_offset(j);
    for (std::size_t k = 0; k < q.size(); ++k) {
      const double w = coeffs[off + k] * std::sqrt(q[k].weight);
      if (w == 0.0) continue;
      real_sph_harm_all(band.hi, q[k].point, y);
      for (int l = band.lo; l <= band.hi; ++l) {
        const auto li = static_cast<std::size_t>(l);
        const double f = w * ker.window()[li] * ker.sqrt_spectrum()[li];
        for (int m = -l; m <= l; ++m) alm[harmonic_index(l, m)] += f * y[harmonic_index(l, m)];
      }
    }
  }
  return alm;
}

FieldRealization needlet_synthesize(const NeedletFrame& frame, std::span<const double> coeffs, const EvalGrid& grid,
                                    SynthesisMethod method) {
  if (coeffs.size() != frame.size()) {
    throw DomainError("needlet synthesis needs " + std::to_string(frame.size()) + " coefficients");
  }
  if (method == SynthesisMethod::automatic) {
    method = grid.layout() == GridLayout::equirectangular ? SynthesisMethod::spectral : SynthesisMethod::direct;
  }
  FieldRealization f{grid, {}, {Expansion::needlet, frame.top_level(), 0, spectrum_label(frame)}};
  if (method == SynthesisMethod::spectral) {
    f.values = synthesize_harmonics(needlet_to_harmonics(frame, coeffs), (1 << frame.top_level()) - 1, grid);
    return f;
  }
  const auto& ks = simd::active_kernels();
  std::vector<std::vector<double>> scale(static_cast<std::size_t>(frame.level_count()));
  for (int j = 0; j <= frame.top_level(); ++j) {
    const auto& nodes = frame.nodes(j);
    auto& sc = scale[static_cast<std::size_t>(j)];
    sc.resize(nodes.x.size());
    for (std::size_t k = 0; k < sc.size(); ++k) sc[k] = nodes.sqrt_weight[k] * coeffs[frame.level_offset(j) + k];
  }
  f.values.assign(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const UnitVector& s = grid[i];
    double u = 0.0;
    for (int j = 0; j <= frame.top_level(); ++j) {
      const auto& nodes = frame.nodes(j);
      const simd::NodeView view{nodes.x, nodes.y, nodes.z, scale[static_cast<std::size_t>(j)]};
      u += ks.radial_sum(frame.interpolant(j).chebyshev_coefficients(), view, s.x(), s.y(), s.z(), false);
    }
    f.values[i] = u;
  }
  return f;
}

FieldRealization needlet_sample(std::uint64_t seed, const NeedletFrame& frame, const EvalGrid& grid,
                                SynthesisMethod method) {
  const auto y = draw_coefficients(seed, frame.size());
  FieldRealization f = needlet_synthesize(frame, y.values, grid, method);
  f.provenance.seed = seed;
  return f;
}

double covariance(const PowerSpectrum& spec, double t, int L) {
  if (!(std::abs(t) <= 1.0)) throw DomainError("covariance: |t| > 1");
  require_cover(spec, L);
  std::vector<double> c(static_cast<std::size_t>(L) + 1);
  for (int l = 0; l <= L; ++l) c[static_cast<std::size_t>(l)] = spec.value(l) * (2.0 * l + 1.0) / kFourPi;
  return legendre_series_eval(c, t);
}

std::vector<double> band_filter(const NeedletFrame& frame) {
  const int L = (1 << frame.top_level()) - 1;
  std::vector<double> g(static_cast<std::size_t>(L) + 1);
  for (int l = 0; l <= L; ++l) g[static_cast<std::size_t>(l)] = window_mass(frame.cutoff(), frame.top_level(), l);
  return g;
}

namespace {

double spectrum_at(const NeedletFrame& frame, int l) { return frame.spectrum() ? frame.spectrum()->value(l) : 1.0; }

}  // namespace

double truncated_covariance(const NeedletFrame& frame, double t) {
  if (!(std::abs(t) <= 1.0)) throw DomainError("truncated_covariance: |t| > 1");
  std::vector<double> c = band_filter(frame);
  for (std::size_t l = 0; l < c.size(); ++l) {
    c[l] *= spectrum_at(frame, static_cast<int>(l)) * (2.0 * static_cast<double>(l) + 1.0) / kFourPi;
  }
  return legendre_series_eval(c, t);
}

double covariance_deficit(const NeedletFrame& frame, int lmax) {
  if (frame.spectrum()) require_cover(*frame.spectrum(), lmax);
  double sum = 0.0;
  for (int l = 0; l <= lmax; ++l) {
    const double g = window_mass(frame.cutoff(), frame.top_level(), l);
    sum += (1.0 - g) * spectrum_at(frame, l) * (2.0 * l + 1.0) / kFourPi;
  }
  return sum;
}

std::vector<double> kl_basis(const PowerSpectrum& spec, int L, const UnitVector& s) {
  require_cover(spec, L);
  std::vector<double> y(harmonic_count(L));
  real_sph_harm_all(L, s, y);
  for (int l = 0; l <= L; ++l) {
    const double r = spec.sqrt_value(l);
    for (int m = -l; m <= l; ++m) y[harmonic_index(l, m)] *= r;
  }
  return y;
}

std::vector<double> needlet_basis(const NeedletFrame& frame, const UnitVector& s) {
  std::vector<double> row(frame.size());
  for (int j = 0; j <= frame.top_level(); ++j) {
    const std::size_t off = frame.level_offset(j);
    for (std::size_t k = 0; k < frame.level_size(j); ++k) row[off + k] = evaluate_needlet(frame, j, k, s);
  }
  return row;
}

}  // namespace needlets
