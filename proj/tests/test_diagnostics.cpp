#include <doctest.h>

#include <cmath>
#include <map>

#include "needlets/diagnostics.hpp"
#include "needlets/error.hpp"
#include "needlets/legendre.hpp"
#include "needlets/sampling.hpp"
#include "oracles.hpp"

using namespace needlets;

namespace {

const QuadratureProvider& gauss() {
  static const QuadratureProvider p = quadrature_provider(QuadratureSource::gauss_product);
  return p;
}

// frames to level 7 are shared between the scaling cases
const NeedletFrame& frame7(double beta) {
  static std::map<double, NeedletFrame> cache;
  auto it = cache.find(beta);
  if (it == cache.end()) {
    std::optional<PowerSpectrum> spec;
    if (beta > 0.0) spec = PowerSpectrum::power_law(beta, 127);
    it = cache.emplace(beta, build_frame(7, spec, gauss())).first;
  }
  return it->second;
}

}  // namespace

TEST_SUITE("diagnostics") {
  TEST_CASE("line fits") {
    const std::vector<double> x = {1, 2, 3, 4, 5};
    std::vector<double> y;
    for (double v : x) y.push_back(-0.75 * v + 2.0);
    const auto f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(-0.75).epsilon(1e-14));
    CHECK(f.intercept == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-14));
    // least squares oracle on noisy data
    const std::vector<double> yn = {1.0, 2.5, 2.0, 4.5, 4.0};
    oracle::ld mx = 3.0L, my = 0.0L, sxy = 0.0L, sxx = 0.0L;
    for (double v : yn) my += v / 5.0L;
    for (std::size_t i = 0; i < 5; ++i) {
      sxy += (x[i] - mx) * (yn[i] - my);
      sxx += (x[i] - mx) * (x[i] - mx);
    }
    CHECK(fit_line(x, yn).slope == doctest::Approx(static_cast<double>(sxy / sxx)).epsilon(1e-14));
    const std::vector<double> one = {1.0};
    CHECK_THROWS_AS(fit_line(one, one), DomainError);
  }

  TEST_CASE("localisation profile shape") {
    const auto& f = frame7(1.0);
    const auto p = localisation_profile(f, 4, 17, 128);
    REQUIRE(p.theta.size() == 128);
    CHECK(p.theta.front() == 0.0);
    CHECK(p.theta.back() == doctest::Approx(M_PI).epsilon(1e-14));
    for (std::size_t i = 1; i < p.theta.size(); ++i) CHECK(p.theta[i] > p.theta[i - 1]);
    const auto& xi = f.quadrature(4)[17].point;
    CHECK(p.values[0] == doctest::Approx(std::abs(evaluate_needlet(f, 4, 17, xi))).epsilon(1e-14));
    CHECK(p.peak >= p.values[0]);
    CHECK(p.peak == doctest::Approx(p.values[0]).epsilon(1e-12));
    CHECK(p.peak_theta == 0.0);
    REQUIRE(p.tail_exponent);
    CHECK(*p.tail_exponent > 0.0);
    CHECK_THROWS_AS(localisation_profile(f, 4, 17, 8), DomainError);
    CHECK_THROWS_AS(localisation_profile(f, 9, 0), DomainError);
  }

  TEST_CASE("heaviest node") {
    const auto q = gauss_product_rule(3);
    const auto k = max_weight_node(q);
    for (const auto& n : q.nodes()) CHECK(n.weight <= q[k].weight);
    for (std::size_t i = 0; i < k; ++i) CHECK(q[i].weight < q[k].weight);
  }

  TEST_CASE("peak scaling of standard needlets") {
    const auto s = peak_scaling(frame7(0.0), 3, 6);
    CHECK(s.levels == std::vector<int>{3, 4, 5, 6});
    CHECK(std::abs(s.fit.slope - 1.0) <= 0.2);
  }

  TEST_CASE("peak scaling of spectrum-modified needlets") {
    const auto a = peak_scaling(frame7(0.5), 3, 7);
    const auto b = peak_scaling(frame7(1.0), 3, 7);
    const auto c = peak_scaling(frame7(2.0), 3, 7);
    CHECK(std::abs(a.fit.slope + 0.5) <= 0.3);
    CHECK(std::abs(c.fit.slope + 2.0) <= 0.3);
    // ordering in beta
    CHECK(a.fit.slope > b.fit.slope);
    CHECK(b.fit.slope > c.fit.slope);
    for (std::size_t i = 1; i < a.values.size(); ++i) CHECK(a.values[i] < a.values[i - 1]);
  }

  TEST_CASE("partition report") {
    const CutoffFunction kappa;
    const auto r = partition_check(kappa, 6);
    CHECK(r.boundary == 31);
    CHECK(r.pass);
    CHECK(r.max_deviation <= 1e-10);
    CHECK(r.cutoff_identity_error <= 1e-12);
    REQUIRE(r.deficit.size() == 64);
    for (int l = 0; l < 64; ++l) {
      oracle::ld g = 0.0L;
      for (int j = 0; j <= 6; ++j) g += oracle::window(j, l) * oracle::window(j, l);
      CHECK(std::abs(r.deficit[static_cast<std::size_t>(l)] - static_cast<double>(1.0L - g)) <= 1e-15);
    }
    CHECK(r.deficit[63] > 0.5);

    const auto bad = partition_check(kappa.with_fault(0.1), 6);
    CHECK_FALSE(bad.pass);
    CHECK(bad.max_deviation > 1e-3);
    CHECK(to_json(bad).at("pass") == false);
  }

  TEST_CASE("Parseval examples at J = 4") {
    const auto f = build_frame(4, std::nullopt, gauss());
    const auto r = parseval_check(f, 7);
    REQUIRE_FALSE(r.entries.empty());
    CHECK(r.entries[0].ell == 0);
    CHECK(std::abs(r.entries[0].sum - 1.0) <= 1e-10);
    CHECK(r.pass);
    CHECK(r.worst_deviation <= 1e-8);
    CHECK(r.entries.size() == 64);

    CHECK_THROWS_AS(parseval_check(f, 12), DomainError);
    const auto beyond = parseval_check(f, 12, true);
    for (const auto& e : beyond.entries) {
      if (e.ell != 12) continue;
      CHECK(e.beyond_boundary);
      oracle::ld g = 0.0L;
      for (int j = 0; j <= 4; ++j) g += oracle::window(j, 12) * oracle::window(j, 12);
      // the sum falls short of 1 by exactly the partition deficit
      CHECK(std::abs(e.sum - static_cast<double>(g)) <= 1e-10);
      CHECK(std::abs(std::abs(e.deviation) - static_cast<double>(1.0L - g)) <= 1e-10);
    }
    CHECK(beyond.pass);

    // independent evaluation of a few sums from the nodes
    for (auto [l, m] : std::vector<std::pair<int, int>>{{3, -2}, {5, 5}, {7, 0}}) {
      oracle::ld s = 0.0L;
      for (int j = 0; j <= 4; ++j) {
        const oracle::ld b = oracle::window(j, l);
        for (const auto& n : f.quadrature(j).nodes()) {
          const oracle::ld y = oracle::sph_harm(l, m, n.point);
          s += n.weight * b * b * y * y;
        }
      }
      for (const auto& e : r.entries) {
        if (e.ell == l && e.m == m) CHECK(e.sum == doctest::Approx(static_cast<double>(s)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("orthogonality report") {
    const auto f = build_frame(5, PowerSpectrum::power_law(0.5, 31), gauss());
    const auto r = orthogonality_check(f, 500, 3);
    CHECK(r.pairs_checked == 500);
    CHECK(r.max_nonadjacent == 0.0);
    CHECK(r.max_moment == 0.0);
    CHECK(r.moments_checked > 0);
    CHECK(r.max_adjacent > 0.0);
    CHECK(r.pass);
    for (int m = -2; m <= 2; ++m) CHECK(harmonic_coefficient(f, 4, 10, 2, m) == 0.0);
    const auto j = to_json(r);
    for (const char* key : {"pairs_checked", "max_nonadjacent", "max_adjacent", "moments_checked", "max_moment", "pass"}) {
      CHECK(j.contains(key));
    }
  }

  TEST_CASE("levelwise sums") {
    const auto zero = build_frame(4, PowerSpectrum::zero(15), gauss());
    const auto probe = EvalGrid::equirectangular(16, 32);
    for (int j = 0; j <= 4; ++j) CHECK(levelwise_sum(zero, j, probe) == 0.0);

    const auto f = build_frame(5, PowerSpectrum::power_law(0.5, 31), gauss());
    const auto coarse = EvalGrid::equirectangular(32, 64), fine = EvalGrid::equirectangular(64, 128);
    for (int j = 3; j <= 5; ++j) {
      const double a = levelwise_sum(f, j, coarse), b = levelwise_sum(f, j, fine);
      CHECK_MESSAGE(std::abs(a - b) <= 0.05 * b, "j=" << j << " " << a << " " << b);
    }
    // brute force at one point
    const auto& s = coarse[100];
    double ref = 0.0;
    for (std::size_t k = 0; k < f.level_size(4); ++k) ref += std::abs(evaluate_needlet_direct(f, 4, k, s));
    CHECK(levelwise_sum(f, 4, EvalGrid::from_points({s})) == doctest::Approx(ref).epsilon(1e-9));
  }

  TEST_CASE("levelwise scaling on the quasi-uniform rule") {
    const auto f = build_frame(6, PowerSpectrum::power_law(0.5, 63), quadrature_provider(QuadratureSource::quasi_uniform));
    const auto s = levelwise_scaling(f, 3, 6, EvalGrid::equirectangular(64, 128));
    CHECK(s.levels.size() == 4);
    CHECK_MESSAGE(std::abs(s.fit.slope + 0.5) <= 0.4, "slope " << s.fit.slope);
  }

  TEST_CASE("covariance z-scores") {
    const auto f = build_frame(4, PowerSpectrum::power_law(1.0, 15), gauss());
    const auto s = UnitVector::normalized(0.2, -0.7, 0.5);
    const auto anti = UnitVector::normalized(-0.2, 0.7, -0.5);
    const std::vector<std::pair<UnitVector, UnitVector>> pairs = {
        {s, s}, {s, anti}, {s, point_along_geodesic(s, UnitVector{}, 0.3)}};
    const auto r = covariance_check(f, 10000, pairs, 7);
    REQUIRE(r.rows.size() == 3);
    CHECK(r.seeds == 10000);
    CHECK(r.rows[0].expected == doctest::Approx(truncated_covariance(f, 1.0)).epsilon(1e-14));
    CHECK(r.rows[1].expected == doctest::Approx(truncated_covariance(f, -1.0)).epsilon(1e-12));
    for (const auto& row : r.rows) CHECK_MESSAGE(std::abs(row.z) <= 3.0, "z=" << row.z);
    const auto r2 = covariance_check(f, 10000, pairs, 8);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(std::abs(r2.rows[i].z) <= 4.0);
      CHECK(r2.rows[i].empirical != r.rows[i].empirical);
    }
    CHECK_THROWS_AS(covariance_check(f, 99, pairs, 7), DomainError);
    CHECK(to_json(r).at("rows").size() == 3);
  }

  TEST_CASE("property: closed-form frame checks hold for J = 3..5") {
    for (int J = 3; J <= 5; ++J) {
      for (bool standard : {true, false}) {
        std::optional<PowerSpectrum> spec;
        if (!standard) spec = PowerSpectrum::power_law(1.0, (1 << J) - 1);
        const auto f = build_frame(J, spec, gauss());
        CHECK(partition_check(f.cutoff(), J).pass);
        const auto p = parseval_check(f, (1 << (J - 1)) - 1);
        CHECK_MESSAGE(p.pass, "J=" << J << " worst " << p.worst_deviation);
        const auto o = orthogonality_check(f, 300, static_cast<std::uint64_t>(J));
        CHECK(o.max_nonadjacent == 0.0);
        CHECK(o.max_moment == 0.0);
      }
    }
  }
}
