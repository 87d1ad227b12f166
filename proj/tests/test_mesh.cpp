#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "emoc/errors.hpp"
#include "emoc/mesh.hpp"
#include "helpers.hpp"

using namespace emoc;

namespace {

double total_volume(const TetMesh& m) {
  double v = 0.0;
  for (int t = 0; t < m.n_tets(); ++t) v += m.volume(t);
  return v;
}

bool same_mesh(const TetMesh& a, const TetMesh& b) {
  if (a.n_vertices() != b.n_vertices() || a.n_tets() != b.n_tets())
    return false;
  for (int v = 0; v < a.n_vertices(); ++v)
    if ((a.vertices[static_cast<size_t>(v)] -
         b.vertices[static_cast<size_t>(v)]).norm() != 0.0)
      return false;
  for (int t = 0; t < a.n_tets(); ++t)
    if (a.tets[static_cast<size_t>(t)] != b.tets[static_cast<size_t>(t)] ||
        a.subdomain[static_cast<size_t>(t)] !=
            b.subdomain[static_cast<size_t>(t)] ||
        a.refinement_edge(t) != b.refinement_edge(t))
      return false;
  return true;
}

// Global vertex pair spanned by the refinement edge of tet t.
std::array<int, 2> refinement_edge_vertices(const TetMesh& m, int t) {
  auto le = kTetEdges[static_cast<size_t>(m.refinement_edge(t))];
  int a = m.tets[static_cast<size_t>(t)][static_cast<size_t>(le[0])];
  int b = m.tets[static_cast<size_t>(t)][static_cast<size_t>(le[1])];
  if (a > b) std::swap(a, b);
  return {a, b};
}

} // namespace

TEST_SUITE("mesh") {

TEST_CASE("builders produce the documented meshes") {
  TetMesh c1 = build_cube_mesh(1);
  CHECK(c1.n_tets() == 6);
  CHECK(c1.n_vertices() == 8);
  CHECK(total_volume(c1) == doctest::Approx(8.0).epsilon(1e-13));

  TetMesh c2 = build_cube_mesh(2);
  CHECK(c2.n_tets() == 48);
  CHECK(total_volume(c2) == doctest::Approx(8.0).epsilon(1e-13));

  TetMesh l1 = build_lshape_mesh(1);
  CHECK(l1.n_tets() == 18);
  CHECK(total_volume(l1) == doctest::Approx(6.0).epsilon(1e-13));

  TetMesh l2 = build_lshape_mesh(2);
  CHECK(l2.n_tets() == 144);
  CHECK(total_volume(l2) == doctest::Approx(6.0).epsilon(1e-13));

  CHECK_THROWS_AS(build_cube_mesh(0), InputError);
  CHECK_THROWS_AS(build_lshape_mesh(-1), InputError);
}

TEST_CASE("the L-shape omits the quadrant x > 0, y > 0") {
  TetMesh l = build_lshape_mesh(2);
  for (int t = 0; t < l.n_tets(); ++t) {
    Vec3 c = l.centroid(t);
    CHECK_FALSE((c.x() > 0.0 && c.y() > 0.0));
  }
}

TEST_CASE("cube tets share the box diagonal as refinement edge") {
  TetMesh c1 = build_cube_mesh(1);
  for (int t = 0; t < c1.n_tets(); ++t) {
    auto [a, b] = refinement_edge_vertices(c1, t);
    Vec3 pa = c1.vertices[static_cast<size_t>(a)];
    Vec3 pb = c1.vertices[static_cast<size_t>(b)];
    CHECK((pb - pa).norm() == doctest::Approx(2.0 * std::sqrt(3.0)));
  }
}

TEST_CASE("face table: boundary faces are exactly the single-incident ones") {
  TetMesh m = build_lshape_mesh(1);
  int boundary = 0;
  for (int f = 0; f < m.face_table.n_faces(); ++f) {
    bool is_b = m.face_table.is_boundary(f);
    CHECK(is_b == (m.face_table.face_tets[f][1] < 0));
    if (is_b) ++boundary;
    // The recorded incident tets really contain the face vertices.
    for (int side = 0; side < 2; ++side) {
      int t = m.face_table.face_tets[f][side];
      if (t < 0) continue;
      for (int v : m.face_table.faces[f]) {
        auto& tet = m.tets[static_cast<size_t>(t)];
        CHECK(std::count(tet.begin(), tet.end(), v) == 1);
      }
    }
  }
  CHECK(boundary == static_cast<int>(m.boundary_faces.size()));
}

TEST_CASE("refine: empty set copies, bad ids throw") {
  TetMesh m = build_cube_mesh(1);
  TetMesh copy = refine(m, {});
  CHECK(same_mesh(m, copy));
  CHECK_THROWS_AS(refine(m, {6}), InputError);
  CHECK_THROWS_AS(refine(m, {-1}), InputError);
}

TEST_CASE("compatible bisection splits the whole edge patch") {
  // All six tets of the coarse cube share the refinement edge, so marking
  // one bisects them all.
  TetMesh m = build_cube_mesh(1);
  RefineResult r = refine_with_lineage(m, {0});
  CHECK(r.mesh.n_tets() == 12);
  for (char s : r.survived) CHECK(s == 0);
  CHECK(total_volume(r.mesh) == doctest::Approx(8.0).epsilon(1e-13));
}

TEST_CASE("bisection sweeps double the tet count and octasect in three") {
  TetMesh m = build_cube_mesh(1);
  CHECK(bisect_sweeps(m, 1).mesh.n_tets() == 12);
  CHECK(bisect_sweeps(m, 2).mesh.n_tets() == 24);
  RefineResult r3 = bisect_sweeps(m, 3);
  CHECK(r3.mesh.n_tets() == 48);

  std::map<int, int> descendants;
  for (int p : r3.parent) ++descendants[p];
  CHECK(descendants.size() == 6);
  for (auto& [p, n] : descendants) CHECK(n == 8);

  std::vector<double> child_vol(6, 0.0);
  for (int t = 0; t < r3.mesh.n_tets(); ++t)
    child_vol[static_cast<size_t>(r3.parent[static_cast<size_t>(t)])] +=
        r3.mesh.volume(t);
  for (int p = 0; p < 6; ++p)
    CHECK(child_vol[static_cast<size_t>(p)] ==
          doctest::Approx(m.volume(p)).epsilon(1e-12));
}

TEST_CASE("three sweeps halve every diameter of a coarse cube") {
  TetMesh m = build_cube_mesh(1);
  MeshSizes before = mesh_size(m);
  for (double h : before.h_tet)
    CHECK(h == doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-13));
  TetMesh fine = bisect_sweeps(m, 3).mesh;
  MeshSizes after = mesh_size(fine);
  for (double h : after.h_tet)
    CHECK(h == doctest::Approx(std::sqrt(3.0)).epsilon(1e-13));
}

TEST_CASE("children stay inside their parent and inherit its label") {
  TetMesh m = relabel(build_cube_mesh(2), [](const Vec3& x) {
    return x.x() < 0.0 ? 1 : 2;
  });
  RefineResult r = refine_with_lineage(m, {0, 7, 13});
  REQUIRE(r.parent.size() == static_cast<size_t>(r.mesh.n_tets()));
  for (int t = 0; t < r.mesh.n_tets(); ++t) {
    int p = r.parent[static_cast<size_t>(t)];
    REQUIRE(p >= 0);
    REQUIRE(p < m.n_tets());
    CHECK(r.mesh.subdomain[static_cast<size_t>(t)] ==
          m.subdomain[static_cast<size_t>(p)]);
    // Every child vertex lies in the parent (barycentric within tolerance).
    auto pc = m.tet_corners(p);
    for (auto v : r.mesh.tets[static_cast<size_t>(t)]) {
      Vec3 x = r.mesh.vertices[static_cast<size_t>(v)];
      // Solve for barycentric coordinates directly.
      Eigen::Matrix3d A;
      A.col(0) = pc[1] - pc[0];
      A.col(1) = pc[2] - pc[0];
      A.col(2) = pc[3] - pc[0];
      Vec3 lam = A.colPivHouseholderQr().solve(x - pc[0]);
      double l0 = 1.0 - lam.sum();
      CHECK(lam.minCoeff() >= -1e-10);
      CHECK(l0 >= -1e-10);
    }
  }
  // Volume bookkeeping per parent.
  std::vector<double> vol(static_cast<size_t>(m.n_tets()), 0.0);
  for (int t = 0; t < r.mesh.n_tets(); ++t)
    vol[static_cast<size_t>(r.parent[static_cast<size_t>(t)])] +=
        r.mesh.volume(t);
  for (int p = 0; p < m.n_tets(); ++p)
    CHECK(vol[static_cast<size_t>(p)] ==
          doctest::Approx(m.volume(p)).epsilon(1e-12));
}

TEST_CASE("generations count bisections") {
  TetMesh m = build_cube_mesh(1);
  for (int g : m.generation) CHECK(g == 0);
  RefineResult r = bisect_sweeps(m, 1);
  for (int t = 0; t < r.mesh.n_tets(); ++t)
    CHECK(r.mesh.generation[static_cast<size_t>(t)] == 1);
  RefineResult r2 = bisect_sweeps(r.mesh, 1);
  for (int t = 0; t < r2.mesh.n_tets(); ++t)
    CHECK(r2.mesh.generation[static_cast<size_t>(t)] == 2);
}

TEST_CASE("marked tets never survive refinement") {
  std::mt19937 rng(321);
  TetMesh m = build_lshape_mesh(1);
  for (int round = 0; round < 30; ++round) {
    std::vector<int> marked;
    for (int t = 0; t < m.n_tets(); ++t)
      if (rng() % 4 == 0) marked.push_back(t);
    if (marked.empty()) marked.push_back(static_cast<int>(rng() % m.n_tets()));
    RefineResult r = refine_with_lineage(m, marked);
    for (int t : marked) CHECK(r.survived[static_cast<size_t>(t)] == 0);
    CHECK(r.mesh.n_tets() > m.n_tets());
    CHECK(total_volume(r.mesh) == doctest::Approx(6.0).epsilon(1e-11));
    m = std::move(r.mesh);
    if (m.n_tets() > 4000) break;
  }
}

TEST_CASE("determinism: identical inputs give identical meshes") {
  TetMesh a = build_lshape_mesh(1);
  TetMesh b = build_lshape_mesh(1);
  CHECK(same_mesh(a, b));
  std::vector<int> marked = {0, 3, 11};
  CHECK(same_mesh(refine(a, marked), refine(b, marked)));
}

TEST_CASE("mesh_size: the reference tet has diameter sqrt(2)") {
  TetMesh ref = testutil::reference_tet_mesh();
  MeshSizes s = mesh_size(ref);
  REQUIRE(s.h_tet.size() == 1);
  CHECK(s.h_tet[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  // Face diameters: the three axis faces have diameter sqrt(2); the
  // slanted face is equilateral with side sqrt(2).
  for (double hf : s.h_face)
    CHECK(hf == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("children never exceed the parent diameter") {
  TetMesh m = build_lshape_mesh(1);
  MeshSizes hs = mesh_size(m);
  RefineResult r = refine_with_lineage(m, {0, 1, 2, 3, 4, 5});
  MeshSizes hs2 = mesh_size(r.mesh);
  for (int t = 0; t < r.mesh.n_tets(); ++t) {
    int p = r.parent[static_cast<size_t>(t)];
    CHECK(hs2.h_tet[static_cast<size_t>(t)] <=
          hs.h_tet[static_cast<size_t>(p)] + 1e-14);
  }
}

TEST_CASE("shape regularity under uniform and random refinement") {
  TetMesh m = build_cube_mesh(1);
  double r0 = shape_ratio_max(m);
  CHECK(r0 > 1.0);
  // Three sweeps reproduce the initial similarity classes exactly.
  TetMesh fine = bisect_sweeps(m, 3).mesh;
  CHECK(shape_ratio_max(fine) == doctest::Approx(r0).epsilon(1e-10));

  std::mt19937 rng(99);
  TetMesh rnd = build_cube_mesh(1);
  for (int round = 0; round < 12 && rnd.n_tets() < 4000; ++round) {
    std::vector<int> marked;
    for (int t = 0; t < rnd.n_tets(); ++t)
      if (rng() % 3 == 0) marked.push_back(t);
    if (marked.empty()) marked.push_back(0);
    rnd = refine(rnd, marked);
    CHECK(shape_ratio_max(rnd) <= 25.0);
  }
}

TEST_CASE("relabel and interface faces") {
  TetMesh m = build_cube_mesh(2);
  for (int s : m.subdomain) CHECK(s == 1);
  TetMesh r = relabel(
      m, [](const Vec3& x) { return x.norm() < 0.9 ? 2 : 1; });
  CHECK(r.n_subdomains == 2);
  for (int t = 0; t < r.n_tets(); ++t)
    CHECK(r.subdomain[static_cast<size_t>(t)] ==
          (r.centroid(t).norm() < 0.9 ? 2 : 1));
  // interface_faces are exactly the interior faces with differing labels.
  std::set<int> expect;
  for (int f = 0; f < r.face_table.n_faces(); ++f) {
    auto [t0, t1] = r.face_table.face_tets[f];
    if (t1 >= 0 && r.subdomain[static_cast<size_t>(t0)] !=
                       r.subdomain[static_cast<size_t>(t1)])
      expect.insert(f);
  }
  std::set<int> got(r.interface_faces.begin(), r.interface_faces.end());
  CHECK(got == expect);
  CHECK_FALSE(expect.empty());

  CHECK_THROWS_AS(relabel(m, [](const Vec3&) { return 0; }), InputError);
}

TEST_CASE("point location") {
  TetMesh m = build_cube_mesh(2);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> d(-0.999, 0.999);
  for (int k = 0; k < 50; ++k) {
    Vec3 x(d(rng), d(rng), d(rng));
    int t = find_containing_tet(m, x);
    REQUIRE(t >= 0);
    // Verify containment via barycentric coordinates.
    auto c = m.tet_corners(t);
    Eigen::Matrix3d A;
    A.col(0) = c[1] - c[0];
    A.col(1) = c[2] - c[0];
    A.col(2) = c[3] - c[0];
    Vec3 lam = A.colPivHouseholderQr().solve(x - c[0]);
    CHECK(lam.minCoeff() >= -1e-9);
    CHECK(1.0 - lam.sum() >= -1e-9);
  }
  CHECK(find_containing_tet(m, Vec3(2.0, 2.0, 2.0)) == -1);
}

TEST_CASE("make_mesh validation") {
  std::vector<Vec3> verts = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0),
                             Vec3(0, 0, 1)};
  SUBCASE("vertex index out of range") {
    CHECK_THROWS_AS(make_mesh(verts, {{0, 1, 2, 9}}, {0}, {1}, {0}),
                    InputError);
  }
  SUBCASE("label below one") {
    CHECK_THROWS_AS(make_mesh(verts, {{0, 1, 2, 3}}, {0}, {0}, {0}),
                    InputError);
  }
  SUBCASE("per-tet array sizes must agree") {
    CHECK_THROWS_AS(make_mesh(verts, {{0, 1, 2, 3}}, {0, 0}, {1}, {0}),
                    InputError);
  }
  SUBCASE("degenerate tet") {
    std::vector<Vec3> flat = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0),
                              Vec3(1, 1, 0)};
    CHECK_THROWS_AS(make_mesh(flat, {{0, 1, 2, 3}}, {0}, {1}, {0}),
                    GeometryError);
  }
  SUBCASE("hanging node") {
    // One neighbor keeps the whole face (a,b,c) while the other side is
    // split through the midpoint of (a,b).
    std::vector<Vec3> v = {Vec3(0, 0, 0),          Vec3(1, 0, 0),
                           Vec3(0, 1, 0),          Vec3(0, 0, 1),
                           Vec3(1.0 / 3, 1.0 / 3, -1), Vec3(0.5, 0, 0)};
    CHECK_THROWS_AS(make_mesh(v, {{0, 1, 2, 3}, {0, 5, 2, 4}, {5, 1, 2, 4}},
                              {0, 0, 0}, {1, 1, 1}, {0, 0, 0}),
                    GeometryError);
  }
}

TEST_CASE("local_edge_index maps pairs to the edge table") {
  for (int e = 0; e < 6; ++e) {
    auto [i, j] = kTetEdges[static_cast<size_t>(e)];
    CHECK(local_edge_index(i, j) == e);
    CHECK(local_edge_index(j, i) == e);
  }
  CHECK_THROWS_AS(local_edge_index(0, 0), InputError);
  CHECK_THROWS_AS(local_edge_index(1, 4), InputError);
}

TEST_CASE("edge table is consistent with the tets") {
  TetMesh m = build_lshape_mesh(1);
  for (int t = 0; t < m.n_tets(); ++t) {
    for (int e = 0; e < 6; ++e) {
      int ge = m.edge_table.tet_edges[static_cast<size_t>(t)]
                                     [static_cast<size_t>(e)];
      REQUIRE(ge >= 0);
      auto [a, b] = kTetEdges[static_cast<size_t>(e)];
      int va = m.tets[static_cast<size_t>(t)][static_cast<size_t>(a)];
      int vb = m.tets[static_cast<size_t>(t)][static_cast<size_t>(b)];
      if (va > vb) std::swap(va, vb);
      CHECK(m.edge_table.edges[static_cast<size_t>(ge)] ==
            std::array<int, 2>{va, vb});
      CHECK(m.edge_table.find(va, vb) == ge);
      CHECK(m.edge_table.find(vb, va) == ge);
      // Incidence list contains t.
      auto& inc = m.edge_table.edge_tets[static_cast<size_t>(ge)];
      CHECK(std::find(inc.begin(), inc.end(), t) != inc.end());
      CHECK(std::is_sorted(inc.begin(), inc.end()));
    }
  }
  CHECK(m.edge_table.find(0, 0) == -1);
}

} // TEST_SUITE
