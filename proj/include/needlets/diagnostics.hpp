#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "needlets/needlet.hpp"
#include "needlets/sphere.hpp"

namespace needlets {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least squares y = slope x + intercept. DomainError for fewer than two points.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

struct LocalisationProfile {
  int level = 0;
  std::size_t node = 0;
  std::vector<double> theta;   ///< 0, then log-spaced up to pi
  std::vector<double> values;  ///< |psi_jk| along a geodesic from xi_jk
  double peak = 0.0;
  double peak_theta = 0.0;
  /// -slope of log(envelope) against log(theta) on [8 2^-j, pi/2]; nullopt if the
  /// window holds too few samples or the envelope vanishes.
  std::optional<double> tail_exponent;
};

/// DomainError for n_theta < 16 or an invalid index.
LocalisationProfile localisation_profile(const NeedletFrame& frame, int level, std::size_t k, int n_theta = 256);

/// Index of the heaviest node of a level (first one on ties).
std::size_t max_weight_node(const QuadratureLevel& q);

struct ScalingFit {
  std::vector<int> levels;
  std::vector<double> values;
  LinearFit fit;  ///< log2(value) against j
};

/// Peak |psi_{j,k0}| for j in [first, last], k0 the heaviest node of each level.
ScalingFit peak_scaling(const NeedletFrame& frame, int first, int last, int n_theta = 256);

struct PartitionReport {
  int top_level = 0;
  int boundary = 0;  ///< 2^{J-1} - 1, last degree where the identity must hold
  double tolerance = 1e-10;
  double max_deviation = 0.0;     ///< over l <= boundary
  std::vector<double> deficit;    ///< 1 - sum_j b_j(l)^2 for l = 0..2^J - 1
  double cutoff_identity_error = 0.0;  ///< max |kappa(t)^2 + kappa(2t)^2 - 1| on [1/2, 1]
  bool pass = false;
};

PartitionReport partition_check(const CutoffFunction& kappa, int top_level);

struct ParsevalEntry {
  int ell = 0;
  int m = 0;
  double sum = 0.0;
  double deviation = 0.0;
  bool beyond_boundary = false;  ///< l > 2^{J-1} - 1: deviation is the partition deficit, not asserted
};

struct ParsevalReport {
  int max_degree = 0;
  double tolerance = 1e-8;
  double worst_deviation = 0.0;  ///< over asserted entries
  int worst_ell = 0;
  int worst_m = 0;
  std::vector<ParsevalEntry> entries;
  bool pass = false;
};

/// sum_{j,k} lambda_jk b_j(l)^2 Y_lm(xi_jk)^2 for l <= max_degree, the harmonic Parseval
/// sum of the frame's windows and nodes (the spectrum does not enter).
/// DomainError if max_degree > 2^{J-1} - 1 unless `allow_beyond_boundary`.
ParsevalReport parseval_check(const NeedletFrame& frame, int max_degree, bool allow_beyond_boundary = false);

struct OrthogonalityReport {
  std::size_t pairs_checked = 0;
  double max_nonadjacent = 0.0;  ///< expected exactly 0
  double max_adjacent = 0.0;     ///< informational
  std::size_t moments_checked = 0;
  double max_moment = 0.0;       ///< expected exactly 0
  int moment_max_degree = 0;
  bool pass = false;
};

/// Random pairs with |j - j'| >= 2 (and as many adjacent pairs, for the report),
/// plus <psi_jk, Y_lm> for every (l, m), l <= moment_max_degree, with b_j(l) outside
/// its support, at up to `moment_nodes` nodes per level.
OrthogonalityReport orthogonality_check(const NeedletFrame& frame, std::size_t sample_size, std::uint64_t seed = 1,
                                        int moment_max_degree = 40, std::size_t moment_nodes = 64);

/// max over the probe points of sum_k |psi_jk(s)|.
double levelwise_sum(const NeedletFrame& frame, int level, const EvalGrid& probe);

/// levelwise_sum for j = first..last with a log2 fit.
ScalingFit levelwise_scaling(const NeedletFrame& frame, int first, int last, const EvalGrid& probe);

struct CovarianceRow {
  UnitVector a;
  UnitVector b;
  double t = 0.0;
  double empirical = 0.0;
  double expected = 0.0;
  double std_error = 0.0;
  double z = 0.0;
};

struct CovarianceReport {
  std::size_t seeds = 0;
  std::uint64_t master_seed = 0;
  std::vector<CovarianceRow> rows;
  double max_abs_z = 0.0;
};

/// Monte Carlo mean of u(a) u(b) over `seeds` needlet samples (sample i draws with
/// seed = master_seed, stream = i) against truncated_covariance. DomainError for seeds < 100.
CovarianceReport covariance_check(const NeedletFrame& frame, std::size_t seeds,
                                  std::span<const std::pair<UnitVector, UnitVector>> pairs, std::uint64_t master_seed);

nlohmann::json to_json(const LinearFit& f);
nlohmann::json to_json(const LocalisationProfile& p, bool with_samples = false);
nlohmann::json to_json(const ScalingFit& s);
nlohmann::json to_json(const PartitionReport& r);
nlohmann::json to_json(const ParsevalReport& r, bool with_entries = false);
nlohmann::json to_json(const OrthogonalityReport& r);
nlohmann::json to_json(const CovarianceReport& r);

}  // namespace needlets
