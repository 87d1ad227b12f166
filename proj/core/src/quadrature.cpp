#include "emoc/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "emoc/errors.hpp"

namespace emoc {

namespace {

// Append every distinct permutation of the barycentric multiset `b`, each
// with weight w.
void add_orbit(QuadRule& r, std::array<double, 4> b, double w) {
  std::array<int, 4> idx = {0, 1, 2, 3};
  std::sort(b.begin(), b.end());
  do {
    std::array<double, 4> p = {b[idx[0]], b[idx[1]], b[idx[2]], b[idx[3]]};
    bool seen = false;
    for (const auto& q : r.points) {
      if (q == p) { seen = true; break; }
    }
    if (!seen) {
      r.points.push_back(p);
      r.weights.push_back(w);
    }
  } while (std::next_permutation(idx.begin(), idx.end()));
}

void add_orbit_tri(QuadRule& r, std::array<double, 3> b, double w) {
  std::array<double, 4> e = {b[0], b[1], b[2], 0.0};
  std::array<std::array<int, 3>, 3> rot = {{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}};
  for (const auto& p : rot) {
    std::array<double, 4> q = {e[p[0]], e[p[1]], e[p[2]], 0.0};
    bool seen = false;
    for (const auto& s : r.points) {
      if (s == q) { seen = true; break; }
    }
    if (!seen) {
      r.points.push_back(q);
      r.weights.push_back(w);
    }
  }
}

QuadRule make_tet_rule(int degree) {
  QuadRule r;
  if (degree <= 1) {
    r.degree = 1;
    r.points.push_back({0.25, 0.25, 0.25, 0.25});
    r.weights.push_back(1.0 / 6.0);
  } else if (degree == 2) {
    // Four symmetric interior points.
    r.degree = 2;
    const double a = 0.58541019662496845; // (5 + 3*sqrt(5)) / 20
    const double b = 0.13819660112501052; // (5 - sqrt(5)) / 20
    add_orbit(r, {a, b, b, b}, 1.0 / 24.0);
  } else {
    // 14-point degree-5 rule (two 4-point orbits plus one 6-point orbit);
    // all weights positive, all points interior.  Also serves degrees 3-4.
    r.degree = 5;
    const double a1 = 0.31088591926330061, w1 = 0.11268792571801585;
    const double a2 = 0.092735250310891226, w2 = 0.073493043116361950;
    const double a3 = 0.045503704125649650, w3 = 0.042546020777081466;
    add_orbit(r, {1.0 - 3.0 * a1, a1, a1, a1}, w1 / 6.0);
    add_orbit(r, {1.0 - 3.0 * a2, a2, a2, a2}, w2 / 6.0);
    add_orbit(r, {a3, a3, 0.5 - a3, 0.5 - a3}, w3 / 6.0);
  }
  return r;
}

QuadRule make_tri_rule(int degree) {
  QuadRule r;
  if (degree <= 1) {
    r.degree = 1;
    r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0});
    r.weights.push_back(0.5);
  } else if (degree == 2) {
    r.degree = 2;
    add_orbit_tri(r, {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0}, 1.0 / 6.0);
  } else if (degree <= 4) {
    // 6-point degree-4 rule, two 3-point orbits.
    r.degree = 4;
    const double b1 = 0.091576213509770743, v1 = 0.10995174365532187;
    const double b2 = 0.44594849091596489, v2 = 0.22338158967801147;
    add_orbit_tri(r, {1.0 - 2.0 * b1, b1, b1}, v1 / 2.0);
    add_orbit_tri(r, {1.0 - 2.0 * b2, b2, b2}, v2 / 2.0);
  } else {
    // 7-point degree-5 rule: centroid plus two 3-point orbits.
    r.degree = 5;
    r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0});
    r.weights.push_back(9.0 / 80.0);
    const double b1 = 0.47014206410511509, v1 = 0.13239415278850618;
    const double b2 = 0.10128650732345634, v2 = 0.12593918054482715;
    add_orbit_tri(r, {1.0 - 2.0 * b1, b1, b1}, v1 / 2.0);
    add_orbit_tri(r, {1.0 - 2.0 * b2, b2, b2}, v2 / 2.0);
  }
  return r;
}

} // namespace

const QuadRule& tet_rule(int degree) {
  if (degree < 1 || degree > 5)
    throw InputError("tet_rule: degree must be in {1,...,5}, got " +
                     std::to_string(degree));
  static const QuadRule rules[5] = {make_tet_rule(1), make_tet_rule(2),
                                    make_tet_rule(3), make_tet_rule(4),
                                    make_tet_rule(5)};
  return rules[degree - 1];
}

const QuadRule& tri_rule(int degree) {
  if (degree < 1 || degree > 5)
    throw InputError("tri_rule: degree must be in {1,...,5}, got " +
                     std::to_string(degree));
  static const QuadRule rules[5] = {make_tri_rule(1), make_tri_rule(2),
                                    make_tri_rule(3), make_tri_rule(4),
                                    make_tri_rule(5)};
  return rules[degree - 1];
}

} // namespace emoc
