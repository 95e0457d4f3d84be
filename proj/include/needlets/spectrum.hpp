#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace needlets {

enum class SpectrumFamily { power_law, constant, table };

std::string to_string(SpectrumFamily f);

/// Angular power spectrum A_l >= 0.
///
/// Values are tabulated for l = 0..max_degree(). The analytic families
/// (power law, constant) also evaluate beyond the table; table spectra do not.
class PowerSpectrum {
 public:
  /// A_l = (1 + l)^{-2 (1 + beta)}. Throws DomainError for beta <= 0.
  static PowerSpectrum power_law(double beta, int max_degree);
  /// A_l = value for all l.
  static PowerSpectrum constant(double value, int max_degree);
  static PowerSpectrum zero(int max_degree) { return constant(0.0, max_degree); }
  /// Tabulated values; throws DomainError on negative or non-finite entries.
  static PowerSpectrum table(std::vector<double> values);

  /// "l A_l" per line, l dense from 0; '#' starts a comment.
  static PowerSpectrum load_table(std::istream& in);
  static PowerSpectrum load_table_file(const std::filesystem::path& path);

  SpectrumFamily family() const noexcept { return family_; }
  /// Power-law exponent, or constant value, as configured.
  double parameter() const noexcept { return parameter_; }
  int max_degree() const noexcept { return static_cast<int>(values_.size()) - 1; }
  bool is_analytic() const noexcept { return family_ != SpectrumFamily::table; }
  /// Largest l with A_l possibly non-zero (band limit), or nullopt if unbounded.
  std::optional<int> band_limit() const noexcept { return band_limit_; }

  /// A_l. Throws DomainError for l < 0, or for table spectra past the table.
  double value(int ell) const;
  double sqrt_value(int ell) const;
  bool covers(int ell) const noexcept;
  std::span<const double> values() const noexcept { return values_; }

  /// Same law, tabulated to `max_degree` (analytic families only for extension).
  PowerSpectrum extended(int max_degree) const;
  /// Band-limited copy: A_l set to 0 for l > limit.
  PowerSpectrum truncated(int limit) const;

  std::string describe() const;

 private:
  PowerSpectrum(SpectrumFamily family, double parameter, std::vector<double> values);
  double closed_form(int ell) const;

  SpectrumFamily family_;
  double parameter_;
  std::vector<double> values_;
  std::optional<int> band_limit_;
};

struct SummabilityReport {
  double partial_sum = 0.0;           ///< sum_{l <= L} (2l + 1) A_l
  std::optional<double> tail_bound;   ///< bound on sum_{l > L}; nullopt when unknown or infinite
  bool tail_finite = false;
};

/// Truncated sum_l (2l + 1) A_l with an analytic tail estimate where available.
SummabilityReport summability(const PowerSpectrum& spec);

/// Delta^0 = sqrtA, Delta^i_l = Delta^{i-1}_{l+1} - Delta^{i-1}_l for i = 0..order.
/// Throws DomainError if order >= sqrtA.size().
std::vector<std::vector<double>> forward_differences(std::span<const double> sqrt_a, int order);

struct DecayReport {
  int order = 0;
  double beta = 0.0;
  double threshold = 0.0;
  int max_degree = 0;
  std::vector<double> constants;  ///< c_i = max_l |Delta^i_l| (1 + l)^{1 + beta + i}
  std::vector<bool> order_pass;
  bool vanishing = false;         ///< sqrt(A_l) visibly decays to 0 over the table
  bool pass = false;
};

/// Finite-range check of |Delta^r_l| <= c (1 + l)^{-(1 + beta + r)} for orders 0..r.
DecayReport validate_decay(const PowerSpectrum& spec, double beta, int order, double threshold);

enum class SeriesVerdict { convergent, borderline, divergent, unknown };
std::string to_string(SeriesVerdict v);

struct RegularityReport {
  double partial_sum = 0.0;  ///< sum_{l <= L} (1 + l)^{1 + 2 beta} A_l
  std::optional<double> tail_bound;
  SeriesVerdict verdict = SeriesVerdict::unknown;
};

RegularityReport regularity_sum(const PowerSpectrum& spec, double beta);

}  // namespace needlets
