#pragma once

// Fixed-order Gauss quadrature on reference tetrahedra and triangles.
//
// Rules are stored in barycentric coordinates with weights that sum to the
// reference volume (1/6 for the tetrahedron, 1/2 for the triangle).  To
// integrate over a physical element, map each barycentric point through the
// element vertices and scale every weight by |T|/vol(ref), i.e. 6|T| for
// tets and 2|F| for triangles.  All rules have strictly positive weights
// and strictly interior points.

#include <array>
#include <vector>

#include "emoc/types.hpp"

namespace emoc {

struct QuadRule {
  // Barycentric coordinates; triangles use the first three entries (the
  // fourth is zero).
  std::vector<std::array<double, 4>> points;
  std::vector<double> weights; // sum = reference volume
  int degree = 0;              // polynomials up to this degree are exact
};

// Rule on the reference tetrahedron, exact at least to `degree`.
// degree must be in {1,...,5}; throws InputError otherwise.
const QuadRule& tet_rule(int degree);

// Rule on the reference triangle, exact at least to `degree`.
// degree must be in {1,...,5}; throws InputError otherwise.
const QuadRule& tri_rule(int degree);

// Physical location of a barycentric point of a tet (v has 4 corners) or a
// triangle (pass the 3 corners; the fourth barycentric entry is zero).
inline Vec3 bary_point(const std::array<Vec3, 4>& v,
                       const std::array<double, 4>& l) {
  return l[0] * v[0] + l[1] * v[1] + l[2] * v[2] + l[3] * v[3];
}

inline Vec3 bary_point(const std::array<Vec3, 3>& v,
                       const std::array<double, 4>& l) {
  return l[0] * v[0] + l[1] * v[1] + l[2] * v[2];
}

} // namespace emoc
