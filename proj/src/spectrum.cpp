#include "needlets/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "needlets/error.hpp"

namespace needlets {

std::string to_string(SpectrumFamily f) {
  switch (f) {
    case SpectrumFamily::power_law: return "power-law";
    case SpectrumFamily::constant: return "constant";
    case SpectrumFamily::table: return "table";
  }
  return "unknown";
}

std::string to_string(SeriesVerdict v) {
  switch (v) {
    case SeriesVerdict::convergent: return "convergent";
    case SeriesVerdict::borderline: return "borderline";
    case SeriesVerdict::divergent: return "divergent";
    case SeriesVerdict::unknown: return "unknown";
  }
  return "unknown";
}

PowerSpectrum::PowerSpectrum(SpectrumFamily family, double parameter, std::vector<double> values)
    : family_(family), parameter_(parameter), values_(std::move(values)) {
  if (values_.empty()) throw DomainError("PowerSpectrum: needs at least A_0");
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) throw DomainError("PowerSpectrum: values must be finite and non-negative");
  }
}

PowerSpectrum PowerSpectrum::power_law(double beta, int max_degree) {
  if (!(beta > 0.0)) throw DomainError("power_law_spectrum: beta must be positive");
  if (max_degree < 0) throw DomainError("power_law_spectrum: max degree must be non-negative");
  std::vector<double> v(static_cast<std::size_t>(max_degree) + 1);
  for (int l = 0; l <= max_degree; ++l) v[static_cast<std::size_t>(l)] = std::pow(1.0 + l, -2.0 * (1.0 + beta));
  return PowerSpectrum(SpectrumFamily::power_law, beta, std::move(v));
}

PowerSpectrum PowerSpectrum::constant(double value, int max_degree) {
  if (max_degree < 0) throw DomainError("constant spectrum: max degree must be non-negative");
  return PowerSpectrum(SpectrumFamily::constant, value, std::vector<double>(static_cast<std::size_t>(max_degree) + 1, value));
}

PowerSpectrum PowerSpectrum::table(std::vector<double> values) {
  return PowerSpectrum(SpectrumFamily::table, 0.0, std::move(values));
}

PowerSpectrum PowerSpectrum::load_table(std::istream& in) {
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    long long ell = -1;
    double a = 0.0;
    if (!(fields >> ell >> a)) throw ParseError("expected 'l A_l'", line_no);
    std::string extra;
    if (fields >> extra) throw ParseError("unexpected trailing field '" + extra + "'", line_no);
    if (ell != static_cast<long long>(values.size())) {
      throw ParseError("degrees must be dense from 0; expected l = " + std::to_string(values.size()), line_no);
    }
    if (!std::isfinite(a) || a < 0.0) throw ParseError("A_l must be finite and non-negative", line_no);
    values.push_back(a);
  }
  if (values.empty()) throw ParseError("spectrum table is empty", 0);
  return table(std::move(values));
}

PowerSpectrum PowerSpectrum::load_table_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open spectrum file " + path.string(), 0);
  return load_table(in);
}

double PowerSpectrum::closed_form(int ell) const {
  switch (family_) {
    case SpectrumFamily::power_law: return std::pow(1.0 + ell, -2.0 * (1.0 + parameter_));
    case SpectrumFamily::constant: return parameter_;
    case SpectrumFamily::table: break;
  }
  throw DomainError("table spectrum has no value for l = " + std::to_string(ell));
}

bool PowerSpectrum::covers(int ell) const noexcept {
  return ell >= 0 && (ell <= max_degree() || band_limit_.has_value() || is_analytic());
}

double PowerSpectrum::value(int ell) const {
  if (ell < 0) throw DomainError("PowerSpectrum: negative degree");
  if (ell <= max_degree()) return values_[static_cast<std::size_t>(ell)];
  if (band_limit_) return 0.0;
  if (!is_analytic()) {
    throw DomainError("spectrum table ends at l = " + std::to_string(max_degree()) + ", need l = " +
                      std::to_string(ell));
  }
  return closed_form(ell);
}

double PowerSpectrum::sqrt_value(int ell) const { return std::sqrt(value(ell)); }

PowerSpectrum PowerSpectrum::extended(int max_degree) const {
  if (max_degree < 0) throw DomainError("PowerSpectrum::extended: negative degree");
  std::vector<double> v(static_cast<std::size_t>(max_degree) + 1);
  for (int l = 0; l <= max_degree; ++l) v[static_cast<std::size_t>(l)] = value(l);
  PowerSpectrum out(family_, parameter_, std::move(v));
  out.band_limit_ = band_limit_;
  return out;
}

PowerSpectrum PowerSpectrum::truncated(int limit) const {
  if (limit < 0) throw DomainError("PowerSpectrum::truncated: negative limit");
  const int size = std::max(limit, max_degree());
  std::vector<double> v(static_cast<std::size_t>(size) + 1, 0.0);
  for (int l = 0; l <= limit; ++l) v[static_cast<std::size_t>(l)] = value(l);
  PowerSpectrum out(family_, parameter_, std::move(v));
  out.band_limit_ = band_limit_ ? std::min(*band_limit_, limit) : limit;
  return out;
}

std::string PowerSpectrum::describe() const {
  std::ostringstream s;
  s << to_string(family_);
  if (family_ == SpectrumFamily::power_law) s << "(beta=" << parameter_ << ")";
  if (family_ == SpectrumFamily::constant) s << "(" << parameter_ << ")";
  s << " L=" << max_degree();
  if (band_limit_) s << " band-limit=" << *band_limit_;
  return s.str();
}

SummabilityReport summability(const PowerSpectrum& spec) {
  SummabilityReport r;
  const int L = spec.max_degree();
  for (int l = 0; l <= L; ++l) r.partial_sum += (2.0 * l + 1.0) * spec.value(l);
  if (spec.band_limit() && *spec.band_limit() <= L) {
    r.tail_bound = 0.0;
  } else if (spec.family() == SpectrumFamily::power_law) {
    // (2l+1) <= 2(1+l), sum_{n > L+1} n^{-1-2 beta} <= (L+1)^{-2 beta} / (2 beta)
    const double beta = spec.parameter();
    r.tail_bound = std::pow(L + 1.0, -2.0 * beta) / beta;
  } else if (spec.family() == SpectrumFamily::constant && spec.parameter() == 0.0) {
    r.tail_bound = 0.0;
  }
  r.tail_finite = r.tail_bound.has_value();
  return r;
}

std::vector<std::vector<double>> forward_differences(std::span<const double> sqrt_a, int order) {
  if (order < 0) throw DomainError("forward_differences: order must be non-negative");
  if (static_cast<std::size_t>(order) >= sqrt_a.size()) {
    throw DomainError("forward_differences: order must be below the sequence length");
  }
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(order) + 1);
  out.emplace_back(sqrt_a.begin(), sqrt_a.end());
  for (int i = 1; i <= order; ++i) {
    const auto& prev = out.back();
    std::vector<double> next(prev.size() - 1);
    for (std::size_t l = 0; l + 1 < prev.size(); ++l) next[l] = prev[l + 1] - prev[l];
    out.push_back(std::move(next));
  }
  return out;
}

DecayReport validate_decay(const PowerSpectrum& spec, double beta, int order, double threshold) {
  if (order < 0) throw DomainError("validate_decay: order must be non-negative");
  if (!(beta > 0.0)) throw DomainError("validate_decay: beta must be positive");
  DecayReport r;
  r.order = order;
  r.beta = beta;
  r.threshold = threshold;
  r.max_degree = spec.max_degree();

  std::vector<double> sqrt_a(spec.values().size());
  std::transform(spec.values().begin(), spec.values().end(), sqrt_a.begin(), [](double a) { return std::sqrt(a); });
  const auto diffs = forward_differences(sqrt_a, order);

  r.pass = true;
  for (int i = 0; i <= order; ++i) {
    double c = 0.0;
    const auto& d = diffs[static_cast<std::size_t>(i)];
    for (std::size_t l = 0; l < d.size(); ++l) {
      c = std::max(c, std::abs(d[l]) * std::pow(1.0 + static_cast<double>(l), 1.0 + beta + i));
    }
    r.constants.push_back(c);
    const bool ok = std::isfinite(c) && c <= threshold;
    r.order_pass.push_back(ok);
    r.pass = r.pass && ok;
  }

  // sqrt(A_l) -> 0: the upper half of the table sits well below the lower half
  const std::size_t half = sqrt_a.size() / 2;
  const double head = *std::max_element(sqrt_a.begin(), sqrt_a.begin() + static_cast<std::ptrdiff_t>(std::max<std::size_t>(half, 1)));
  const double tail = *std::max_element(sqrt_a.begin() + static_cast<std::ptrdiff_t>(half), sqrt_a.end());
  r.vanishing = (head == 0.0 && tail == 0.0) || tail <= 0.5 * head;
  return r;
}

RegularityReport regularity_sum(const PowerSpectrum& spec, double beta) {
  if (!(beta >= 0.0)) throw DomainError("regularity_sum: beta must be non-negative");
  RegularityReport r;
  const int L = spec.max_degree();
  for (int l = 0; l <= L; ++l) r.partial_sum += std::pow(1.0 + l, 1.0 + 2.0 * beta) * spec.value(l);

  const bool band_limited = spec.band_limit() && *spec.band_limit() <= L;
  if (band_limited || (spec.family() == SpectrumFamily::constant && spec.parameter() == 0.0)) {
    r.tail_bound = 0.0;
    r.verdict = SeriesVerdict::convergent;
  } else if (spec.family() == SpectrumFamily::power_law) {
    // terms (1 + l)^{-q}
    const double q = 1.0 + 2.0 * (spec.parameter() - beta);
    if (std::abs(q - 1.0) <= 1e-12) {
      r.verdict = SeriesVerdict::borderline;
    } else if (q > 1.0) {
      r.verdict = SeriesVerdict::convergent;
      r.tail_bound = std::pow(L + 1.0, 1.0 - q) / (q - 1.0);
    } else {
      r.verdict = SeriesVerdict::divergent;
    }
  } else if (spec.family() == SpectrumFamily::constant) {
    r.verdict = SeriesVerdict::divergent;
  }
  return r;
}

}  // namespace needlets
