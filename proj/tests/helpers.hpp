#pragma once

// Shared fixtures for the test suites.

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "emoc/mesh.hpp"
#include "emoc/problems.hpp"
#include "emoc/types.hpp"

namespace emoc::testutil {

// Kuhn subdivision of the unit cube [0,1]^3: six path tetrahedra sharing
// the main diagonal, all type 0.
inline TetMesh unit_kuhn_cube() {
  std::vector<Vec3> verts(8);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        verts[static_cast<size_t>(4 * i + 2 * j + k)] = Vec3(i, j, k);
  auto vid = [](int i, int j, int k) { return 4 * i + 2 * j + k; };
  static constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                      {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  std::vector<std::array<int, 4>> tagged;
  for (const auto& p : perms) {
    std::array<int, 3> c = {0, 0, 0};
    std::array<int, 4> X;
    X[0] = vid(0, 0, 0);
    for (int s = 0; s < 3; ++s) {
      ++c[p[s]];
      X[s + 1] = vid(c[0], c[1], c[2]);
    }
    tagged.push_back(X);
  }
  return make_mesh(verts, tagged, std::vector<std::uint8_t>(6, 0),
                   std::vector<int>(6, 1), std::vector<int>(6, 0));
}

// The unit reference tetrahedron as a one-element mesh.
inline TetMesh reference_tet_mesh() {
  std::vector<Vec3> verts = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0),
                             Vec3(0, 0, 1)};
  return make_mesh(verts, {{0, 1, 2, 3}}, {0}, {1}, {0});
}

// A minimal single-domain problem on [-1,1]^3 with constant data; handy
// when a test only needs assembled level assets around a custom field.
inline ProblemSpec cube_problem() {
  ProblemSpec p;
  p.name = "cube";
  p.build_mesh = [](int n) { return build_cube_mesh(n); };
  p.default_subdivisions = 1;
  p.mu_inv_by_label = {1.0};
  p.sigma_by_label = {1.0};
  p.f = [](const Vec3&, int) { return Vec3(0, 0, 0); };
  p.div_f = [](const Vec3&, int) { return 0.0; };
  p.u_d = [](const Vec3&, int) { return Vec3(0, 0, 0); };
  p.y_d = [](const Vec3&, int) { return Vec3(0, 0, 0); };
  p.curl_y_d = [](const Vec3&, int) { return Vec3(0, 0, 0); };
  p.alpha = 0.1;
  return p;
}

inline Vec3 random_vec(std::mt19937& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  return Vec3(d(rng), d(rng), d(rng));
}

} // namespace emoc::testutil
