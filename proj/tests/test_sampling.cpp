#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "needlets/error.hpp"
#include "needlets/legendre.hpp"
#include "needlets/needlet.hpp"
#include "needlets/rng.hpp"
#include "needlets/sampling.hpp"
#include "oracles.hpp"

using namespace needlets;

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  for (double x : v) m.var += (x - m.mean) * (x - m.mean);
  m.var /= static_cast<double>(v.size() - 1);
  return m;
}

// sum_l w_l A_l (2l+1)/(4 pi) P_l(t) in long double
oracle::ld series_cov(const PowerSpectrum& spec, int L, oracle::ld t, const std::vector<double>* g = nullptr) {
  std::vector<double> c(static_cast<std::size_t>(L) + 1);
  for (int l = 0; l <= L; ++l) {
    const oracle::ld w = g ? (*g)[static_cast<std::size_t>(l)] : 1.0L;
    c[static_cast<std::size_t>(l)] = static_cast<double>(w * spec.value(l) * (2.0L * l + 1.0L) / (4.0L * oracle::kPiL));
  }
  return oracle::naive_series(c, t);
}

const NeedletFrame& frame4() {
  static const NeedletFrame f =
      build_frame(4, PowerSpectrum::power_law(1.0, 15), quadrature_provider(QuadratureSource::gauss_product));
  return f;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

TEST_SUITE("sampling") {
  TEST_CASE("Philox4x32-10 known-answer vectors") {
    using B = Philox4x32::Block;
    CHECK(Philox4x32::round10({0, 0, 0, 0}, {0, 0}) == B{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(Philox4x32::round10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
          B{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(Philox4x32::round10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
          B{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
    // counter and key layout
    const Philox4x32 g(0x0123456789abcdefULL);
    CHECK(g(0x1111222233334444ULL, 0x5555666677778888ULL) ==
          Philox4x32::round10({0x33334444u, 0x11112222u, 0x77778888u, 0x55556666u}, {0x89abcdefu, 0x01234567u}));
  }

  TEST_CASE("normals follow the documented Box-Muller mapping") {
    const std::uint64_t seed = 99;
    const auto z = standard_normals(seed, 11, 3);
    REQUIRE(z.size() == 11);
    const Philox4x32 g(seed);
    for (std::size_t i = 0; i < z.size(); ++i) {
      const auto w = g(i / 2, 3);
      const std::uint64_t a = ((static_cast<std::uint64_t>(w[0]) << 32) | w[1]) >> 11;
      const std::uint64_t b = ((static_cast<std::uint64_t>(w[2]) << 32) | w[3]) >> 11;
      const oracle::ld u1 = (static_cast<oracle::ld>(a) + 1.0L) * std::ldexp(1.0L, -53);
      const oracle::ld u2 = static_cast<oracle::ld>(b) * std::ldexp(1.0L, -53);
      const oracle::ld r = std::sqrt(-2.0L * std::log(u1));
      const oracle::ld ref = i % 2 == 0 ? r * std::cos(2.0L * oracle::kPiL * u2) : r * std::sin(2.0L * oracle::kPiL * u2);
      CHECK(z[i] == doctest::Approx(static_cast<double>(ref)).epsilon(1e-13));
    }
  }

  TEST_CASE("coefficient draws") {
    CHECK(draw_coefficients(1, 0).values.empty());
    const auto a = draw_coefficients(123, 1000);
    const auto b = draw_coefficients(123, 1000);
    CHECK(std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(double)) == 0);
    CHECK(a.seed == 123);
    const auto c = draw_coefficients(124, 1000);
    CHECK(a.values != c.values);
    const auto d = draw_coefficients(123, 1000, 1);
    CHECK(a.values != d.values);
    // prefix stability: a longer draw extends a shorter one
    const auto e = draw_coefficients(123, 1001);
    CHECK(std::equal(a.values.begin(), a.values.end(), e.values.begin()));

    const auto big = draw_coefficients(2024, 1000000);
    const auto m = moments(big.values);
    CHECK(std::abs(m.mean) <= 4.0 / std::sqrt(1e6));
    CHECK(std::abs(m.var - 1.0) <= 0.01);
    double m3 = 0.0, m4 = 0.0;
    for (double x : big.values) {
      m3 += x * x * x;
      m4 += x * x * x * x;
    }
    CHECK(std::abs(m3 / 1e6) <= 4.0 * std::sqrt(15.0 / 1e6));
    CHECK(std::abs(m4 / 1e6 - 3.0) <= 4.0 * std::sqrt(96.0 / 1e6));
  }

  TEST_CASE("expansion names") {
    CHECK(expansion_from_string("kl") == Expansion::kl);
    CHECK(expansion_from_string("needlet") == Expansion::needlet);
    CHECK(to_string(Expansion::kl) == "kl");
    CHECK_THROWS_AS(expansion_from_string("wavelet"), DomainError);
  }

  TEST_CASE("KL special cases") {
    const auto grid = EvalGrid::equirectangular(8, 16);
    const auto zero = kl_sample(5, PowerSpectrum::zero(10), 10, grid);
    for (double v : zero.values) CHECK(v == 0.0);

    const auto spec = PowerSpectrum::power_law(0.5, 10);
    const auto l0 = kl_sample(5, spec, 0, grid);
    const double y00 = standard_normals(5, 1)[0];
    for (double v : l0.values) CHECK(v == doctest::Approx(y00 / std::sqrt(4.0 * M_PI)).epsilon(1e-14));
    CHECK(l0.provenance.expansion == Expansion::kl);
    CHECK(l0.provenance.truncation == 0);
    CHECK(l0.provenance.seed == 5);

    CHECK_THROWS_AS(kl_sample(5, PowerSpectrum::table({1.0, 0.5}), 4, grid), DomainError);
    std::vector<double> wrong(5, 1.0);
    CHECK_THROWS_AS(kl_synthesize(spec, 1, wrong, grid), DomainError);
  }

  TEST_CASE("KL synthesis against the harmonic oracle") {
    const auto spec = PowerSpectrum::power_law(0.7, 6);
    const auto y = draw_coefficients(8, 49).values;
    std::mt19937_64 rng(8);
    std::vector<UnitVector> pts;
    for (int i = 0; i < 20; ++i) pts.push_back(oracle::random_point(rng));
    const auto f = kl_synthesize(spec, 6, y, EvalGrid::from_points(pts));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      oracle::ld ref = 0.0L;
      std::size_t idx = 0;
      for (int l = 0; l <= 6; ++l) {
        for (int m = -l; m <= l; ++m) ref += std::sqrt(static_cast<oracle::ld>(spec.value(l))) * y[idx++] * oracle::sph_harm(l, m, pts[i]);
      }
      CHECK(std::abs(f.values[i] - static_cast<double>(ref)) <= 1e-12);
    }
    // the equirectangular ring path gives the same numbers as the pointwise path
    const auto grid = EvalGrid::equirectangular(9, 14);
    const auto ring = kl_synthesize(spec, 6, y, grid);
    const std::vector<UnitVector> gp(grid.points().begin(), grid.points().end());
    const auto pointwise = kl_synthesize(spec, 6, y, EvalGrid::from_points(gp));
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(ring.values[i] - pointwise.values[i]) <= 1e-12);
  }

  TEST_CASE("KL pointwise variance over 1e4 seeds") {
    const auto spec = PowerSpectrum::power_law(0.5, 15);
    const auto grid = EvalGrid::from_points({UnitVector::normalized(0.3, -0.5, 0.8)});
    std::vector<double> v;
    for (std::uint64_t seed = 1; seed <= 10000; ++seed) v.push_back(kl_sample(seed, spec, 15, grid).values[0]);
    const double expected = static_cast<double>(series_cov(spec, 15, 1.0L));
    const auto m = moments(v);
    const double se = expected * std::sqrt(2.0 / (v.size() - 1.0));
    CHECK(std::abs(m.var - expected) <= 3.0 * se);
  }

  TEST_CASE("needlet field from zero and single coefficients") {
    const auto& f = frame4();
    const auto grid = EvalGrid::equirectangular(16, 32);
    std::vector<double> y(f.size(), 0.0);
    for (auto method : {SynthesisMethod::direct, SynthesisMethod::spectral}) {
      for (double v : needlet_synthesize(f, y, grid, method).values) CHECK(v == 0.0);
    }
    for (auto [j, k] : std::vector<std::pair<int, std::size_t>>{{0, 1}, {2, 5}, {3, 77}, {4, 300}}) {
      std::fill(y.begin(), y.end(), 0.0);
      y[f.flat_index(j, k)] = 1.0;
      const auto direct = needlet_synthesize(f, y, grid, SynthesisMethod::direct);
      const auto spectral = needlet_synthesize(f, y, grid, SynthesisMethod::spectral);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double psi = evaluate_needlet_direct(f, j, k, grid[i]);
        CHECK(std::abs(direct.values[i] - psi) <= 1e-10);
        CHECK(std::abs(spectral.values[i] - psi) <= 1e-11);
      }
    }
    std::vector<double> wrong(f.size() + 1, 0.0);
    CHECK_THROWS_AS(needlet_synthesize(f, wrong, grid), DomainError);
  }

  TEST_CASE("spectral and direct synthesis agree on random coefficients") {
    const auto& f = frame4();
    const auto grid = EvalGrid::equirectangular(20, 40);
    const auto a = needlet_sample(77, f, grid, SynthesisMethod::direct);
    const auto b = needlet_sample(77, f, grid, SynthesisMethod::spectral);
    const auto c = needlet_sample(77, f, grid);
    double scale = 0.0;
    for (double v : a.values) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(std::abs(a.values[i] - b.values[i]) <= 1e-10 * std::max(1.0, scale));
      CHECK(b.values[i] == c.values[i]);
    }
    CHECK(c.provenance.expansion == Expansion::needlet);
    CHECK(c.provenance.truncation == 4);
  }

  TEST_CASE("harmonic projection of needlet coefficients") {
    const auto& f = frame4();
    const auto y = draw_coefficients(3, f.size()).values;
    const auto alm = needlet_to_harmonics(f, y);
    REQUIRE(alm.size() == 256);
    for (int l : {0, 3, 9, 15}) {
      for (int m : {-l, 0, l}) {
        double ref = 0.0;
        for (int j = 0; j <= 4; ++j) {
          for (std::size_t k = 0; k < f.level_size(j); ++k) ref += y[f.flat_index(j, k)] * harmonic_coefficient(f, j, k, l, m);
        }
        CHECK(alm[harmonic_index(l, m)] == doctest::Approx(ref).epsilon(1e-12).scale(1e-12));
      }
    }
  }

  TEST_CASE("determinism of realizations") {
    const auto& f = frame4();
    const auto grid = EvalGrid::equirectangular(12, 24);
    const auto a = needlet_sample(42, f, grid);
    const auto b = needlet_sample(42, f, grid);
    CHECK(std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(double)) == 0);
    const auto spec = PowerSpectrum::power_law(1.0, 15);
    const auto c = kl_sample(42, spec, 15, grid);
    const auto d = kl_sample(42, spec, 15, grid);
    CHECK(std::memcmp(c.values.data(), d.values.data(), c.values.size() * sizeof(double)) == 0);
  }

  TEST_CASE("needlet pointwise variance over 1e4 seeds") {
    const auto& f = frame4();
    const auto s = UnitVector::normalized(-0.2, 0.9, 0.1);
    const auto grid = EvalGrid::from_points({s});
    std::vector<double> v;
    for (std::uint64_t seed = 1; seed <= 10000; ++seed) v.push_back(needlet_sample(seed, f, grid).values[0]);
    const double expected = truncated_covariance(f, 1.0);
    const auto m = moments(v);
    CHECK(std::abs(m.var - expected) <= 3.0 * expected * std::sqrt(2.0 / (v.size() - 1.0)));
  }

  TEST_CASE("covariance examples") {
    CHECK(covariance(PowerSpectrum::zero(10), 0.3, 10) == 0.0);
    std::vector<double> a(8, 0.0);
    a[0] = 4.0 * M_PI;
    const auto mono = PowerSpectrum::table(a);
    for (double t : {-1.0, -0.2, 0.5, 1.0}) CHECK(covariance(mono, t, 7) == doctest::Approx(1.0).epsilon(1e-15));
    const auto spec = PowerSpectrum::power_law(0.5, 64);
    const double rho1 = covariance(spec, 1.0, 64);
    for (int i = 0; i <= 400; ++i) {
      const double t = -1.0 + 2.0 * i / 400.0;
      const double r = covariance(spec, t, 64);
      CHECK(std::abs(r) <= rho1);
      CHECK(r == doctest::Approx(static_cast<double>(series_cov(spec, 64, t))).epsilon(1e-12).scale(1e-12));
    }
    CHECK_THROWS_AS(covariance(spec, 1.01, 10), DomainError);
    CHECK_THROWS_AS(covariance(PowerSpectrum::table({1.0}), 0.0, 4), DomainError);
  }

  TEST_CASE("truncated covariance") {
    const auto& f = frame4();
    const auto g = band_filter(f);
    REQUIRE(g.size() == 16);
    for (int l = 0; l < 16; ++l) {
      oracle::ld ref = 0.0L;
      for (int j = 0; j <= 4; ++j) ref += oracle::window(j, l) * oracle::window(j, l);
      CHECK(g[static_cast<std::size_t>(l)] == doctest::Approx(static_cast<double>(ref)).epsilon(1e-14));
    }
    for (double t : {-1.0, -0.4, 0.0, 0.6, 1.0}) {
      CHECK(truncated_covariance(f, t) == doctest::Approx(static_cast<double>(series_cov(*f.spectrum(), 15, t, &g))).epsilon(1e-12));
    }
    // band limit at 7: g = 1 on the whole support once J = 4
    const auto spec7 = PowerSpectrum::power_law(1.0, 15).truncated(7);
    const auto f7 = build_frame(4, spec7, quadrature_provider(QuadratureSource::gauss_product));
    for (double t : {-0.9, 0.1, 1.0}) CHECK(truncated_covariance(f7, t) == doctest::Approx(covariance(spec7, t, 7)).epsilon(1e-13));
    CHECK(std::abs(covariance_deficit(f7, 200)) <= 1e-15);
    CHECK(covariance_deficit(f, 15) > 0.0);
    // standard frame treats A as 1
    const auto fs = build_frame(3, std::nullopt, quadrature_provider(QuadratureSource::gauss_product));
    const auto gs = band_filter(fs);
    oracle::ld ref = 0.0L;
    for (int l = 0; l < 8; ++l) ref += gs[static_cast<std::size_t>(l)] * (2.0L * l + 1.0L) / (4.0L * oracle::kPiL);
    CHECK(truncated_covariance(fs, 1.0) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-13));
  }

  TEST_CASE("property: empirical covariance is rotation invariant") {
    const auto& f = frame4();
    const double d = 0.35;
    const auto p1 = UnitVector::normalized(0.1, 0.2, 0.97), q1 = point_along_geodesic(p1, UnitVector{}, -d);
    const auto p2 = UnitVector::normalized(0.8, -0.5, -0.3), q2 = point_along_geodesic(p2, UnitVector::normalized(1, 1, 1), d);
    REQUIRE(geodesic_distance(p1, q1) == doctest::Approx(d).epsilon(1e-12));
    REQUIRE(geodesic_distance(p2, q2) == doctest::Approx(d).epsilon(1e-12));
    const auto r_p1 = needlet_basis(f, p1), r_q1 = needlet_basis(f, q1);
    const auto r_p2 = needlet_basis(f, p2), r_q2 = needlet_basis(f, q2);
    const std::size_t n = 10000;
    double c1 = 0.0, c2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto y = draw_coefficients(11, f.size(), i).values;
      c1 += dot(r_p1, y) * dot(r_q1, y);
      c2 += dot(r_p2, y) * dot(r_q2, y);
    }
    c1 /= n;
    c2 /= n;
    const double var = truncated_covariance(f, 1.0), cov = truncated_covariance(f, std::cos(d));
    const double se = std::sqrt((var * var + cov * cov) / n);
    CHECK(std::abs(c1 - cov) <= 3.0 * se);
    CHECK(std::abs(c2 - cov) <= 3.0 * se);
    CHECK(std::abs(c1 - c2) <= 3.0 * std::sqrt(2.0) * se);
  }

  TEST_CASE("property: KL and band-filtered needlet fields have matching variance") {
    const auto& f = frame4();
    const int L = 7;  // 2^{J-1} - 1
    const auto s = UnitVector::normalized(0.4, 0.4, -0.8);
    // needlet field filtered to l <= L: row over (j,k) of sum_{l <= L, m} <psi_jk, Y_lm> Y_lm(s)
    std::vector<double> y_lm(harmonic_count(L));
    for (int l = 0; l <= L; ++l) {
      for (int m = -l; m <= l; ++m) y_lm[harmonic_index(l, m)] = static_cast<double>(oracle::sph_harm(l, m, s));
    }
    std::vector<double> row(f.size(), 0.0);
    for (int j = 0; j <= 4; ++j) {
      for (std::size_t k = 0; k < f.level_size(j); ++k) {
        double acc = 0.0;
        for (int l = 0; l <= L; ++l) {
          for (int m = -l; m <= l; ++m) acc += harmonic_coefficient(f, j, k, l, m) * y_lm[harmonic_index(l, m)];
        }
        row[f.flat_index(j, k)] = acc;
      }
    }
    const auto& spec = *f.spectrum();
    const auto grid = EvalGrid::from_points({s});
    const std::size_t n = 10000;
    std::vector<double> kl, nd;
    for (std::size_t i = 0; i < n; ++i) {
      kl.push_back(kl_sample(1000 + i, spec, L, grid).values[0]);
      nd.push_back(dot(row, draw_coefficients(5000 + i, f.size()).values));
    }
    const double expected = covariance(spec, 1.0, L);
    const double se = expected * std::sqrt(2.0 / (n - 1.0));
    const double vk = moments(kl).var, vn = moments(nd).var;
    CHECK(std::abs(vk - expected) <= 3.0 * se);
    CHECK(std::abs(vn - expected) <= 3.0 * se);
    CHECK(std::abs(vk - vn) <= 3.0 * std::sqrt(2.0) * se);
  }

  TEST_CASE("basis rows reproduce the synthesised fields") {
    const auto& f = frame4();
    const auto spec = PowerSpectrum::power_law(1.0, 15);
    std::mt19937_64 rng(4);
    std::vector<UnitVector> pts;
    for (int i = 0; i < 10; ++i) pts.push_back(oracle::random_point(rng));
    const auto grid = EvalGrid::from_points(pts);
    const auto yn = draw_coefficients(9, f.size()).values;
    const auto yk = draw_coefficients(9, 256).values;
    const auto fn = needlet_synthesize(f, yn, grid);
    const auto fk = kl_synthesize(spec, 15, yk, grid);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      CHECK(dot(needlet_basis(f, pts[i]), yn) == doctest::Approx(fn.values[i]).epsilon(1e-10).scale(1e-10));
      CHECK(dot(kl_basis(spec, 15, pts[i]), yk) == doctest::Approx(fk.values[i]).epsilon(1e-12).scale(1e-12));
    }
  }
}
