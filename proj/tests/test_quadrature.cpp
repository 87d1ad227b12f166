#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "emoc/errors.hpp"
#include "emoc/quadrature.hpp"

using namespace emoc;

namespace {

double factorial(int n) {
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

// int_{ref tet} x^a y^b z^c dx = a! b! c! / (a+b+c+3)!
double tet_monomial_exact(int a, int b, int c) {
  return factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3);
}

// int_{ref tri} x^a y^b dx = a! b! / (a+b+2)!
double tri_monomial_exact(int a, int b) {
  return factorial(a) * factorial(b) / factorial(a + b + 2);
}

double tet_quad_monomial(const QuadRule& rule, int a, int b, int c) {
  static const std::array<Vec3, 4> corners = {Vec3(0, 0, 0), Vec3(1, 0, 0),
                                              Vec3(0, 1, 0), Vec3(0, 0, 1)};
  double s = 0.0;
  for (size_t q = 0; q < rule.points.size(); ++q) {
    Vec3 x = bary_point(corners, rule.points[q]);
    s += rule.weights[q] * std::pow(x.x(), a) * std::pow(x.y(), b) *
         std::pow(x.z(), c);
  }
  return s;
}

double tri_quad_monomial(const QuadRule& rule, int a, int b) {
  static const std::array<Vec3, 3> corners = {Vec3(0, 0, 0), Vec3(1, 0, 0),
                                              Vec3(0, 1, 0)};
  double s = 0.0;
  for (size_t q = 0; q < rule.points.size(); ++q) {
    Vec3 x = bary_point(corners, rule.points[q]);
    s += rule.weights[q] * std::pow(x.x(), a) * std::pow(x.y(), b);
  }
  return s;
}

} // namespace

TEST_SUITE("quadrature") {

TEST_CASE("tet rules integrate all monomials up to their degree") {
  for (int deg = 1; deg <= 5; ++deg) {
    const QuadRule& rule = tet_rule(deg);
    CHECK(rule.degree >= deg);
    for (int a = 0; a <= deg; ++a)
      for (int b = 0; a + b <= deg; ++b)
        for (int c = 0; a + b + c <= deg; ++c) {
          double got = tet_quad_monomial(rule, a, b, c);
          double want = tet_monomial_exact(a, b, c);
          CHECK(std::abs(got - want) <= 1e-14 + 1e-13 * std::abs(want));
        }
  }
}

TEST_CASE("triangle rules integrate all monomials up to their degree") {
  for (int deg = 1; deg <= 5; ++deg) {
    const QuadRule& rule = tri_rule(deg);
    CHECK(rule.degree >= deg);
    for (int a = 0; a <= deg; ++a)
      for (int b = 0; a + b <= deg; ++b) {
        double got = tri_quad_monomial(rule, a, b);
        double want = tri_monomial_exact(a, b);
        CHECK(std::abs(got - want) <= 1e-14 + 1e-13 * std::abs(want));
      }
  }
}

TEST_CASE("degree-1 rules are the centroid rules") {
  const QuadRule& t = tet_rule(1);
  REQUIRE(t.points.size() == 1);
  CHECK(t.weights[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  for (int k = 0; k < 4; ++k)
    CHECK(t.points[0][k] == doctest::Approx(0.25).epsilon(1e-15));

  const QuadRule& f = tri_rule(1);
  REQUIRE(f.points.size() == 1);
  CHECK(f.weights[0] == doctest::Approx(0.5).epsilon(1e-15));
  for (int k = 0; k < 3; ++k)
    CHECK(f.points[0][k] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(f.points[0][3] == 0.0);
}

TEST_CASE("hand values: x^2 on the tet, x on the triangle") {
  CHECK(tet_quad_monomial(tet_rule(2), 2, 0, 0) ==
        doctest::Approx(1.0 / 60.0).epsilon(1e-13));
  CHECK(tri_quad_monomial(tri_rule(1), 1, 0) ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-13));
}

TEST_CASE("weights are positive, points interior, sums match") {
  for (int deg = 1; deg <= 5; ++deg) {
    for (bool tet : {true, false}) {
      const QuadRule& rule = tet ? tet_rule(deg) : tri_rule(deg);
      double wsum = 0.0;
      for (size_t q = 0; q < rule.points.size(); ++q) {
        CHECK(rule.weights[q] > 0.0);
        wsum += rule.weights[q];
        double lsum = 0.0;
        int nbary = tet ? 4 : 3;
        for (int k = 0; k < nbary; ++k) {
          CHECK(rule.points[q][k] > 0.0);
          lsum += rule.points[q][k];
        }
        if (!tet) CHECK(rule.points[q][3] == 0.0);
        CHECK(lsum == doctest::Approx(1.0).epsilon(1e-14));
      }
      CHECK(wsum == doctest::Approx(tet ? 1.0 / 6.0 : 0.5).epsilon(1e-14));
    }
  }
}

TEST_CASE("out-of-range degrees are rejected") {
  CHECK_THROWS_AS(tet_rule(0), InputError);
  CHECK_THROWS_AS(tet_rule(6), InputError);
  CHECK_THROWS_AS(tri_rule(0), InputError);
  CHECK_THROWS_AS(tri_rule(-2), InputError);
}

TEST_CASE("push-forward to a physical element") {
  // Affine map of the reference tet: integrating an affine function by the
  // scaled rule must equal |T| times the value at the centroid.
  std::mt19937 rng(91);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::array<Vec3, 4> v;
    double vol = 0.0;
    do {
      for (auto& p : v) p = Vec3(d(rng), d(rng), d(rng));
      vol = (v[1] - v[0]).cross(v[2] - v[0]).dot(v[3] - v[0]) / 6.0;
    } while (std::abs(vol) < 1e-3);
    vol = std::abs(vol);
    Vec3 a(d(rng), d(rng), d(rng));
    double b = d(rng);
    Vec3 centroid = 0.25 * (v[0] + v[1] + v[2] + v[3]);

    const QuadRule& rule = tet_rule(2);
    double got = 0.0, measure = 0.0;
    for (size_t q = 0; q < rule.points.size(); ++q) {
      Vec3 x = bary_point(v, rule.points[q]);
      got += 6.0 * vol * rule.weights[q] * (a.dot(x) + b);
      measure += 6.0 * vol * rule.weights[q];
    }
    CHECK(measure == doctest::Approx(vol).epsilon(1e-13));
    CHECK(got == doctest::Approx(vol * (a.dot(centroid) + b)).epsilon(1e-12));
  }
}

TEST_CASE("independent rules agree on a random cubic") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::array<double, 20> coef;
  for (auto& c : coef) c = d(rng);
  auto poly = [&](const Vec3& x) {
    double s = 0.0;
    int i = 0;
    for (int a = 0; a <= 3; ++a)
      for (int b = 0; a + b <= 3; ++b)
        for (int c = 0; a + b + c <= 3; ++c)
          s += coef[static_cast<size_t>(i++)] * std::pow(x.x(), a) *
               std::pow(x.y(), b) * std::pow(x.z(), c);
    return s;
  };
  static const std::array<Vec3, 4> corners = {Vec3(0, 0, 0), Vec3(1, 0, 0),
                                              Vec3(0, 1, 0), Vec3(0, 0, 1)};
  double v3 = 0.0, v5 = 0.0;
  for (size_t q = 0; q < tet_rule(3).points.size(); ++q)
    v3 += tet_rule(3).weights[q] * poly(bary_point(corners, tet_rule(3).points[q]));
  for (size_t q = 0; q < tet_rule(5).points.size(); ++q)
    v5 += tet_rule(5).weights[q] * poly(bary_point(corners, tet_rule(5).points[q]));
  CHECK(v3 == doctest::Approx(v5).epsilon(1e-12));
}

} // TEST_SUITE
