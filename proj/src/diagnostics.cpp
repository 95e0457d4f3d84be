#include "needlets/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "needlets/error.hpp"
#include "needlets/legendre.hpp"
#include "needlets/rng.hpp"
#include "needlets/sampling.hpp"

namespace needlets {

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("fit_line: need two or more paired samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw DomainError("fit_line: abscissae are all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

std::size_t max_weight_node(const QuadratureLevel& q) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < q.size(); ++k) {
    if (q[k].weight > q[best].weight) best = k;
  }
  return best;
}

LocalisationProfile localisation_profile(const NeedletFrame& frame, int level, std::size_t k, int n_theta) {
  if (n_theta < 16) throw DomainError("localisation_profile: n_theta must be at least 16");
  frame.flat_index(level, k);
  const UnitVector xi = frame.quadrature(level)[k].point;
  LocalisationProfile p;
  p.level = level;
  p.node = k;
  const auto n = static_cast<std::size_t>(n_theta);
  // theta_0 = 0, then log spacing from 2^-j / 64 to pi
  const double theta_min = std::ldexp(1.0, -level) / 64.0;
  const double ratio = std::log(kPi / theta_min);
  p.theta.resize(n);
  p.values.resize(n);
  p.theta[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    p.theta[i] = theta_min * std::exp(ratio * static_cast<double>(i - 1) / static_cast<double>(n - 2));
  }
  p.theta[n - 1] = kPi;
  const UnitVector north;
  for (std::size_t i = 0; i < n; ++i) {
    const UnitVector s = point_along_geodesic(xi, north, p.theta[i]);
    p.values[i] = std::abs(evaluate_needlet(frame, level, k, s));
    if (p.values[i] > p.peak) {
      p.peak = p.values[i];
      p.peak_theta = p.theta[i];
    }
  }

  // envelope E(theta) = max over theta' >= theta, fitted on the tail window
  const double lo = 8.0 * std::ldexp(1.0, -level);
  const double hi = 0.5 * kPi;
  std::vector<double> env(n);
  double run = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    run = std::max(run, p.values[i]);
    env[i] = run;
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 1; i < n; ++i) {
    if (p.theta[i] < lo || p.theta[i] > hi || !(env[i] > 0.0)) continue;
    lx.push_back(std::log(p.theta[i]));
    ly.push_back(std::log(env[i]));
  }
  if (lx.size() >= 4) p.tail_exponent = -fit_line(lx, ly).slope;
  return p;
}

ScalingFit peak_scaling(const NeedletFrame& frame, int first, int last, int n_theta) {
  if (first < 0 || last > frame.top_level() || last - first < 1) throw DomainError("peak_scaling: bad level range");
  ScalingFit s;
  std::vector<double> x, y;
  for (int j = first; j <= last; ++j) {
    const auto prof = localisation_profile(frame, j, max_weight_node(frame.quadrature(j)), n_theta);
    s.levels.push_back(j);
    s.values.push_back(prof.peak);
    x.push_back(j);
    y.push_back(std::log2(prof.peak));
  }
  s.fit = fit_line(x, y);
  return s;
}

PartitionReport partition_check(const CutoffFunction& kappa, int top_level) {
  if (top_level < 0 || top_level > 20) throw DomainError("partition_check: J must be in 0..20");
  PartitionReport r;
  r.top_level = top_level;
  r.boundary = top_level >= 1 ? (1 << (top_level - 1)) - 1 : 0;
  const int L = (1 << top_level) - 1;
  r.deficit.resize(static_cast<std::size_t>(L) + 1);
  for (int l = 0; l <= L; ++l) {
    const double d = 1.0 - window_mass(kappa, top_level, l);
    r.deficit[static_cast<std::size_t>(l)] = d;
    if (l <= r.boundary) r.max_deviation = std::max(r.max_deviation, std::abs(d));
  }
  for (int i = 0; i <= 1000; ++i) {
    const double t = 0.5 + 0.5 * i / 1000.0;
    const double a = kappa(t), b = kappa(2.0 * t);
    r.cutoff_identity_error = std::max(r.cutoff_identity_error, std::abs(a * a + b * b - 1.0));
  }
  r.pass = r.max_deviation <= r.tolerance;
  return r;
}

ParsevalReport parseval_check(const NeedletFrame& frame, int max_degree, bool allow_beyond_boundary) {
  const int J = frame.top_level();
  const int boundary = J >= 1 ? (1 << (J - 1)) - 1 : 0;
  if (max_degree < 0) throw DomainError("parseval_check: negative degree");
  if (max_degree > boundary && !allow_beyond_boundary) {
    throw DomainError("parseval_check: l = " + std::to_string(max_degree) + " exceeds 2^(J-1) - 1 = " +
                      std::to_string(boundary) + "; beyond it the levels up to J no longer cover the window " +
                      "and the sum equals the partition mass instead of 1");
  }
  const int L = max_degree;
  std::vector<double> sums(harmonic_count(L), 0.0);
  std::vector<double> y(harmonic_count(L));
  std::vector<double> b2(static_cast<std::size_t>(L) + 1);
  for (int j = 0; j <= J; ++j) {
    bool any = false;
    for (int l = 0; l <= L; ++l) {
      const double b = window_b(frame.cutoff(), j, l);
      b2[static_cast<std::size_t>(l)] = b * b;
      any = any || b != 0.0;
    }
    if (!any) continue;
    const auto& q = frame.quadrature(j);
    for (std::size_t k = 0; k < q.size(); ++k) {
      real_sph_harm_all(L, q[k].point, y);
      const double w = q[k].weight;
      for (int l = 0; l <= L; ++l) {
        const double f = w * b2[static_cast<std::size_t>(l)];
        if (f == 0.0) continue;
        for (int m = -l; m <= l; ++m) {
          const double v = y[harmonic_index(l, m)];
          sums[harmonic_index(l, m)] += f * v * v;
        }
      }
    }
  }
  ParsevalReport r;
  r.max_degree = L;
  for (int l = 0; l <= L; ++l) {
    for (int m = -l; m <= l; ++m) {
      ParsevalEntry e{l, m, sums[harmonic_index(l, m)], 0.0, l > boundary};
      e.deviation = e.sum - 1.0;
      if (!e.beyond_boundary && std::abs(e.deviation) > r.worst_deviation) {
        r.worst_deviation = std::abs(e.deviation);
        r.worst_ell = l;
        r.worst_m = m;
      }
      r.entries.push_back(e);
    }
  }
  r.pass = r.worst_deviation <= r.tolerance;
  return r;
}

namespace {

// Uniform integer in [0, n) from one Philox word pair; the modulo bias is below 2^-40 here.
std::size_t uniform_index(const Philox4x32& gen, std::uint64_t counter, int word, std::size_t n) {
  const auto w = gen(counter, 0x6f7274686fULL);
  const std::uint64_t v = (static_cast<std::uint64_t>(w[static_cast<std::size_t>(word)]) << 32) |
                          w[static_cast<std::size_t>(word + 1)];
  return static_cast<std::size_t>(v % n);
}

}  // namespace

OrthogonalityReport orthogonality_check(const NeedletFrame& frame, std::size_t sample_size, std::uint64_t seed,
                                        int moment_max_degree, std::size_t moment_nodes) {
  OrthogonalityReport r;
  r.moment_max_degree = moment_max_degree;
  const int J = frame.top_level();
  const auto levels = static_cast<std::size_t>(J + 1);
  const Philox4x32 gen(seed);
  std::uint64_t counter = 0;
  if (J >= 1) {
    for (std::size_t i = 0; i < 2 * sample_size; ++i) {
      const bool adjacent = i >= sample_size;
      if (!adjacent && J < 2) break;
      int j1 = 0, j2 = 0;
      do {
        j1 = static_cast<int>(uniform_index(gen, counter, 0, levels));
        j2 = static_cast<int>(uniform_index(gen, counter, 2, levels));
        ++counter;
      } while (adjacent ? std::abs(j1 - j2) != 1 : std::abs(j1 - j2) < 2);
      const std::size_t k1 = uniform_index(gen, counter, 0, frame.level_size(j1));
      const std::size_t k2 = uniform_index(gen, counter, 2, frame.level_size(j2));
      ++counter;
      const double v = std::abs(inner_product(frame, j1, k1, j2, k2));
      if (adjacent) {
        r.max_adjacent = std::max(r.max_adjacent, v);
      } else {
        r.max_nonadjacent = std::max(r.max_nonadjacent, v);
        ++r.pairs_checked;
      }
    }
  }
  for (int j = 0; j <= J; ++j) {
    const std::size_t n = frame.level_size(j);
    const std::size_t step = std::max<std::size_t>(1, n / std::max<std::size_t>(1, moment_nodes));
    for (std::size_t k = 0; k < n; k += step) {
      for (int l = 0; l <= moment_max_degree; ++l) {
        if (window_b(frame.cutoff(), j, l) != 0.0) continue;
        for (int m = -l; m <= l; ++m) {
          r.max_moment = std::max(r.max_moment, std::abs(harmonic_coefficient(frame, j, k, l, m)));
          ++r.moments_checked;
        }
      }
    }
  }
  r.pass = r.max_nonadjacent == 0.0 && r.max_moment == 0.0;
  return r;
}

double levelwise_sum(const NeedletFrame& frame, int level, const EvalGrid& probe) {
  double best = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) best = std::max(best, level_sum(frame, level, {}, probe[i], true));
  return best;
}

ScalingFit levelwise_scaling(const NeedletFrame& frame, int first, int last, const EvalGrid& probe) {
  if (first < 0 || last > frame.top_level() || last - first < 1) throw DomainError("levelwise_scaling: bad level range");
  ScalingFit s;
  std::vector<double> x, y;
  for (int j = first; j <= last; ++j) {
    s.levels.push_back(j);
    s.values.push_back(levelwise_sum(frame, j, probe));
    x.push_back(j);
    y.push_back(std::log2(s.values.back()));
  }
  s.fit = fit_line(x, y);
  return s;
}

CovarianceReport covariance_check(const NeedletFrame& frame, std::size_t seeds,
                                  std::span<const std::pair<UnitVector, UnitVector>> pairs, std::uint64_t master_seed) {
  if (seeds < 100) throw DomainError("covariance_check: need at least 100 seeds");
  std::vector<UnitVector> points;
  std::vector<std::pair<std::size_t, std::size_t>> idx;
  auto find_or_add = [&](const UnitVector& s) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (points[i] == s) return i;
    }
    points.push_back(s);
    return points.size() - 1;
  };
  for (const auto& [a, b] : pairs) idx.emplace_back(find_or_add(a), find_or_add(b));
  std::vector<std::vector<double>> basis;
  for (const auto& s : points) basis.push_back(needlet_basis(frame, s));

  std::vector<double> sum(pairs.size(), 0.0), sum_sq(pairs.size(), 0.0), u(points.size());
  for (std::size_t i = 0; i < seeds; ++i) {
    const auto y = standard_normals(master_seed, frame.size(), i);
    for (std::size_t p = 0; p < points.size(); ++p) {
      double v = 0.0;
      for (std::size_t c = 0; c < y.size(); ++c) v += basis[p][c] * y[c];
      u[p] = v;
    }
    for (std::size_t q = 0; q < pairs.size(); ++q) {
      const double prod = u[idx[q].first] * u[idx[q].second];
      sum[q] += prod;
      sum_sq[q] += prod * prod;
    }
  }
  CovarianceReport r;
  r.seeds = seeds;
  r.master_seed = master_seed;
  const double n = static_cast<double>(seeds);
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    CovarianceRow row;
    row.a = pairs[q].first;
    row.b = pairs[q].second;
    row.t = row.a.cosine(row.b);
    row.empirical = sum[q] / n;
    const double var = std::max(0.0, (sum_sq[q] - n * row.empirical * row.empirical) / (n - 1.0));
    row.std_error = std::sqrt(var / n);
    row.expected = truncated_covariance(frame, row.t);
    row.z = row.std_error > 0.0 ? (row.empirical - row.expected) / row.std_error : 0.0;
    r.max_abs_z = std::max(r.max_abs_z, std::abs(row.z));
    r.rows.push_back(row);
  }
  return r;
}

nlohmann::json to_json(const LinearFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}};
}

nlohmann::json to_json(const LocalisationProfile& p, bool with_samples) {
  nlohmann::json j = {{"level", p.level}, {"node", p.node}, {"peak", p.peak}, {"peak_theta", p.peak_theta}};
  j["tail_exponent"] = p.tail_exponent ? nlohmann::json(*p.tail_exponent) : nlohmann::json(nullptr);
  if (with_samples) {
    j["theta"] = p.theta;
    j["values"] = p.values;
  }
  return j;
}

nlohmann::json to_json(const ScalingFit& s) {
  return {{"levels", s.levels}, {"values", s.values}, {"fit", to_json(s.fit)}};
}

nlohmann::json to_json(const PartitionReport& r) {
  return {{"top_level", r.top_level},
          {"boundary", r.boundary},
          {"tolerance", r.tolerance},
          {"max_deviation", r.max_deviation},
          {"cutoff_identity_error", r.cutoff_identity_error},
          {"deficit", r.deficit},
          {"pass", r.pass}};
}

nlohmann::json to_json(const ParsevalReport& r, bool with_entries) {
  nlohmann::json j = {{"max_degree", r.max_degree},
                      {"tolerance", r.tolerance},
                      {"worst_deviation", r.worst_deviation},
                      {"worst_ell", r.worst_ell},
                      {"worst_m", r.worst_m},
                      {"pass", r.pass}};
  if (with_entries) {
    nlohmann::json e = nlohmann::json::array();
    for (const auto& x : r.entries) {
      e.push_back({{"ell", x.ell}, {"m", x.m}, {"sum", x.sum}, {"deviation", x.deviation},
                   {"beyond_boundary", x.beyond_boundary}});
    }
    j["entries"] = std::move(e);
  }
  return j;
}

nlohmann::json to_json(const OrthogonalityReport& r) {
  return {{"pairs_checked", r.pairs_checked},     {"max_nonadjacent", r.max_nonadjacent},
          {"max_adjacent", r.max_adjacent},       {"moments_checked", r.moments_checked},
          {"moment_max_degree", r.moment_max_degree}, {"max_moment", r.max_moment},
          {"pass", r.pass}};
}

nlohmann::json to_json(const CovarianceReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& x : r.rows) {
    rows.push_back({{"t", x.t}, {"empirical", x.empirical}, {"expected", x.expected},
                    {"std_error", x.std_error}, {"z", x.z}});
  }
  return {{"seeds", r.seeds}, {"master_seed", r.master_seed}, {"max_abs_z", r.max_abs_z}, {"rows", std::move(rows)}};
}

}  // namespace needlets
