#include <cmath>

#include "needlets/error.hpp"
#include "needlets/needlet.hpp"

namespace needlets {

namespace {

double eta0(double x) noexcept { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

double eta(double x) noexcept {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = eta0(x);
  return a / (a + eta0(1.0 - x));
}

}  // namespace

double CutoffFunction::operator()(double t) const noexcept {
  if (!(t > 0.5) || t >= 2.0) return 0.0;
  if (t <= 1.0) return (1.0 + fault_) * std::sin(0.5 * kPi * eta(2.0 * t - 1.0));
  return std::cos(0.5 * kPi * eta(t - 1.0));
}

CutoffFunction CutoffFunction::with_fault(double amplitude) const {
  CutoffFunction c = *this;
  c.fault_ = amplitude;
  return c;
}

double kappa_eval(double t) noexcept { return CutoffFunction{}(t); }

double window_b(const CutoffFunction& kappa, int level, double t) noexcept {
  return kappa(std::ldexp(2.0 * t + 1.0, -level));
}

double window_b(int level, double t) noexcept { return window_b(CutoffFunction{}, level, t); }

Band active_band(int level) {
  if (level < 0) throw DomainError("active_band: negative level");
  if (level > 30) throw DomainError("active_band: level too large");
  const int lo = level >= 2 ? 1 << (level - 2) : 0;
  return {lo, (1 << level) - 1};
}

double window_mass(const CutoffFunction& kappa, int top_level, int ell) {
  double sum = 0.0;
  for (int j = 0; j <= top_level; ++j) {
    const double b = window_b(kappa, j, ell);
    sum += b * b;
  }
  return sum;
}

}  // namespace needlets
