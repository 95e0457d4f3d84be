#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace needlets::cli {

/// Everything a subcommand needs. Text form is one "key = value" per line in a fixed
/// key order; from_text(to_text(c)) == c.
struct RunConfig {
  std::string command;
  std::string spectrum = "power-law";  ///< power-law | constant | standard | path to an "l A_l" table
  double beta = 0.5;
  int J = 4;
  std::uint64_t seed = 42;
  std::uint32_t grid_theta = 64;
  std::uint32_t grid_phi = 128;
  std::string quadrature = "gauss";  ///< gauss | uniform | tdesign
  std::string tdesign_dir;
  std::string out = ".";
  std::string expansion = "needlet";
  std::string report = "json";
  int order = 3;
  double threshold = 100.0;
  int lmax = 512;
  std::optional<double> decay_beta;  ///< defaults to beta
  std::uint64_t seeds = 200;
  std::string inject_fault;
  std::string input;
  std::string output;
  std::string palette = "gray";
  bool image = false;
  int kl_degree = -1;  ///< -1: 2^J - 1
  double interp_tol = 1e-10;
  double parseval_tol = 1e-8;

  bool operator==(const RunConfig&) const = default;

  std::string to_text() const;
  /// ParseError with the line number on unknown keys or bad values.
  static RunConfig from_text(const std::string& text);
};

/// Sets one key from its text form; DomainError on an unknown key or bad value.
void set_config_value(RunConfig& c, const std::string& key, const std::string& value);

/// Exit codes: 0 success, 1 a check failed, 2 usage or input error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace needlets::cli
