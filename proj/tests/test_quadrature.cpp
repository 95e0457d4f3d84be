#include <doctest.h>

#include <cmath>
#include <sstream>

#include "needlets/error.hpp"
#include "needlets/legendre.hpp"
#include "needlets/quadrature.hpp"
#include "oracles.hpp"

using namespace needlets;

namespace {
const std::string kData = NEEDLETS_TEST_DATA;
}

TEST_SUITE("quadrature") {
  TEST_CASE("three-point Gauss-Legendre rule") {
    const auto g = gauss_legendre(3);
    REQUIRE(g.nodes.size() == 3);
    CHECK(g.nodes[0] == doctest::Approx(std::sqrt(0.6)).epsilon(1e-15));
    CHECK(std::abs(g.nodes[1]) < 1e-15);
    CHECK(g.nodes[2] == doctest::Approx(-std::sqrt(0.6)).epsilon(1e-15));
    CHECK(g.weights[0] == doctest::Approx(5.0 / 9.0).epsilon(1e-15));
    CHECK(g.weights[1] == doctest::Approx(8.0 / 9.0).epsilon(1e-15));
  }

  TEST_CASE("Gauss-Legendre integrates monomials up to degree 2n-1") {
    for (int n : {1, 2, 5, 16, 64}) {
      const auto g = gauss_legendre(n);
      for (int p = 0; p <= 2 * n - 1; ++p) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += g.weights[static_cast<std::size_t>(i)] * std::pow(g.nodes[static_cast<std::size_t>(i)], p);
        const double exact = p % 2 == 1 ? 0.0 : 2.0 / (p + 1);
        CHECK(std::abs(s - exact) <= 1e-13);
      }
    }
  }

  TEST_CASE("product rule sizes and weight sum") {
    const auto q0 = gauss_product_rule(0);
    CHECK(q0.size() == 2);
    double s = 0.0;
    for (const auto& n : q0.nodes()) s += n.weight;
    CHECK(s == doctest::Approx(4 * kPi).epsilon(1e-14));
    for (int j = 0; j <= 8; ++j) CHECK(gauss_product_rule(j).size() == (std::size_t{1} << (2 * j + 1)));
  }

  TEST_CASE("product rule integrates harmonics to zero") {
    const auto q = gauss_product_rule(2);
    for (int l = 1; l <= 6; ++l) {
      for (int m = -l; m <= l; ++m) {
        CHECK(std::abs(integrate([&](const UnitVector& s) { return real_sph_harm(l, m, s); }, q)) <= 1e-12);
      }
    }
    const auto q3 = gauss_product_rule(3);
    CHECK(integrate([](const UnitVector& s) { return std::pow(real_sph_harm(5, 3, s), 2); }, q3) ==
          doctest::Approx(1.0).epsilon(1e-10));
  }

  TEST_CASE("product rule passes verify_exactness at the required degree") {
    for (int j = 0; j <= 6; ++j) {
      const auto r = verify_exactness(gauss_product_rule(j), required_degree(j));
      CHECK(r.pass);
      CHECK(r.worst_error <= r.tolerance);
    }
    CHECK(verify_exactness(gauss_product_rule(2), 6).pass);
    const auto seven = verify_exactness(gauss_product_rule(2), 7);
    CHECK(seven.degree == 7);
    CHECK(seven.entries.size() == harmonic_count(7));
    CHECK(seven.pass == !seven.first_failing_degree.has_value());
  }

  TEST_CASE("verify_exactness reports the first failing degree") {
    const QuadratureLevel pole(0, {{4 * kPi, UnitVector{}}}, 0, QuadratureSource::tdesign);
    const auto r = verify_exactness(pole, 1);
    CHECK_FALSE(r.pass);
    REQUIRE(r.first_failing_degree.has_value());
    CHECK(*r.first_failing_degree == 1);
    CHECK(r.worst_ell == 1);
  }

  TEST_CASE("product rule weights: the bound tends to pi^2 2^-2j") {
    // max weight * 4^j grows towards pi^2 ~ 9.87, so c = 8 fails from j = 2 on and c = 10 holds
    for (int j = 0; j <= 8; ++j) {
      const auto q = gauss_product_rule(j);
      const double scaled = q.max_weight() * std::ldexp(1.0, 2 * j);
      CHECK(scaled <= 10.0);
      CHECK(scaled < kPi * kPi);
      if (j >= 2) CHECK(scaled > 8.0);
      const auto rep = quadrature_report(q, 10.0, 2.0);
      CHECK(rep.weight_bound_ok);
      CHECK(rep.count_bound_ok);
    }
  }

  TEST_CASE("quadrature report flags reflect the comparisons") {
    for (int j = 1; j <= 4; ++j) {
      const auto q = gauss_product_rule(j);
      const auto r = quadrature_report(q, 8.0, 2.0);
      const double scale = std::ldexp(1.0, -2 * j);
      CHECK(r.weight_bound_ok == (r.max_weight <= 8.0 * scale));
      CHECK(r.count_bound_ok == (static_cast<double>(r.node_count) <= 2.0 / scale));
      CHECK(r.mesh_ratio_ok == (r.mesh_norm <= r.min_separation));
      CHECK(r.min_weight > 0.0);
    }
    CHECK_FALSE(quadrature_report(gauss_product_rule(3)).mesh_ratio_ok);
  }

  TEST_CASE("quasi-uniform rule is positive, exact and quasi-uniform") {
    for (int j = 0; j <= 5; ++j) {
      const auto q = quasi_uniform_rule(j);
      CHECK(q.source() == QuadratureSource::quasi_uniform);
      CHECK(q.exactness_degree() >= required_degree(j));
      CHECK(verify_exactness(q, required_degree(j)).pass);
      const auto r = quadrature_report(q, 10.0, 8.0);
      CHECK(r.min_weight > 0.0);
      CHECK(r.weight_bound_ok);
      CHECK(r.count_bound_ok);
      CHECK(r.mesh_ratio_ok);
      CHECK(r.max_weight / r.min_weight < 1.5);
    }
  }

  TEST_CASE("QuadratureLevel validates its invariants") {
    const UnitVector n;
    CHECK_THROWS_AS(QuadratureLevel(0, {{-1.0, n}, {4 * kPi + 1.0, n}}, 0, QuadratureSource::tdesign), DomainError);
    CHECK_THROWS_AS(QuadratureLevel(0, {{1.0, n}}, 0, QuadratureSource::tdesign), DomainError);
    CHECK_THROWS_AS(QuadratureLevel(2, {{4 * kPi, n}}, 5, QuadratureSource::tdesign), DomainError);
    CHECK_THROWS_AS(QuadratureLevel(0, {}, 0, QuadratureSource::tdesign), DomainError);
  }

  TEST_CASE("load_tdesign basics and errors") {
    std::istringstream one("0 0 1\n");
    const auto q = load_tdesign(one, 0, 0);
    REQUIRE(q.size() == 1);
    CHECK(q[0].weight == doctest::Approx(4 * kPi));

    std::istringstream off("1 0 0\n0 0 2\n");
    try {
      load_tdesign(off, 0, 0);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
    std::istringstream junk("0 0 1\n0 zero 1\n");
    CHECK_THROWS_AS(load_tdesign(junk, 0, 0), ParseError);
    std::istringstream extra("0 0 1 4\n");
    CHECK_THROWS_AS(load_tdesign(extra, 0, 0), ParseError);
    std::istringstream empty("\n\n");
    try {
      load_tdesign(empty, 0, 0);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 0);
    }
    // a slightly off-sphere point inside the 1e-6 window is renormalised
    std::istringstream near("0 0 1.0000005\n");
    CHECK(load_tdesign(near, 0, 0)[0].point.z() == 1.0);
  }

  TEST_CASE("degree-14 design file is exact through degree 14") {
    const auto q = load_tdesign_file(kData + "/designs/tdesign_014_120.txt", 3, 14);
    CHECK(q.size() == 120);
    CHECK(q.exactness_degree() == 14);
    const auto r = verify_exactness(q, 14);
    CHECK(r.pass);
    for (const auto& n : q.nodes()) CHECK(n.weight == doctest::Approx(4 * kPi / 120));
  }

  TEST_CASE("claiming too high a degree is rejected") {
    CHECK_THROWS_AS(load_tdesign_file(kData + "/designs/icosahedron_005.txt", 3, 14), DomainError);
    CHECK(load_tdesign_file(kData + "/designs/icosahedron_005.txt", 1, 5).size() == 12);
  }

  TEST_CASE("design directory lookup") {
    CHECK(degree_from_filename("sf014.00114") == 14);
    CHECK(degree_from_filename("des.3.240.21.txt") == 3);
    CHECK_FALSE(degree_from_filename("points.txt").has_value());
    CHECK(tdesign_for_level(kData + "/designs", 1).size() == 12);
    CHECK(tdesign_for_level(kData + "/designs", 3).size() == 120);
    CHECK_THROWS_AS(tdesign_for_level(kData + "/designs", 4), DomainError);
  }

  TEST_CASE("integrate examples") {
    const auto q = gauss_product_rule(2);
    CHECK(integrate([](const UnitVector&) { return 1.0; }, q) == doctest::Approx(4 * kPi).epsilon(1e-14));
    CHECK(std::abs(integrate([](const UnitVector& s) { return real_sph_harm(3, -2, s); }, q)) <= 1e-12);
    CHECK(integrate([](const UnitVector& s) { return std::pow(real_sph_harm(2, 1, s), 2); }, q) ==
          doctest::Approx(1.0).epsilon(1e-10));
  }

  TEST_CASE("source names") {
    for (auto s : {QuadratureSource::gauss_product, QuadratureSource::quasi_uniform, QuadratureSource::tdesign}) {
      CHECK(quadrature_source_from_string(to_string(s)) == s);
    }
    CHECK_THROWS_AS(quadrature_source_from_string("lebedev"), DomainError);
  }
}
