#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "emoc/errors.hpp"
#include "emoc/mesh.hpp"
#include "emoc/mesh_io.hpp"
#include "emoc/spaces.hpp"

using namespace emoc;

namespace {

std::string temp_path(const std::string& stem) {
  namespace fs = std::filesystem;
  return (fs::temp_directory_path() / ("emoc_io_" + stem)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  REQUIRE(is.good());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

} // namespace

TEST_SUITE("mesh_io") {

TEST_CASE("tetmesh round trip preserves everything the format carries") {
  TetMesh m = relabel(build_lshape_mesh(1), [](const Vec3& x) {
    return x.z() < 0.0 ? 1 : 2;
  });
  std::ostringstream os;
  write_tetmesh(m, os);
  const std::string text = os.str();
  CHECK(text.rfind("TETMESH v1\n", 0) == 0);

  std::istringstream is(text);
  TetMesh r = read_tetmesh(is);
  REQUIRE(r.n_vertices() == m.n_vertices());
  REQUIRE(r.n_tets() == m.n_tets());
  for (int v = 0; v < m.n_vertices(); ++v) {
    // %.17g makes the doubles bitwise round-trippable.
    CHECK(r.vertices[static_cast<size_t>(v)].x() ==
          m.vertices[static_cast<size_t>(v)].x());
    CHECK(r.vertices[static_cast<size_t>(v)].y() ==
          m.vertices[static_cast<size_t>(v)].y());
    CHECK(r.vertices[static_cast<size_t>(v)].z() ==
          m.vertices[static_cast<size_t>(v)].z());
  }
  for (int t = 0; t < m.n_tets(); ++t) {
    CHECK(r.tets[static_cast<size_t>(t)] == m.tets[static_cast<size_t>(t)]);
    CHECK(r.subdomain[static_cast<size_t>(t)] ==
          m.subdomain[static_cast<size_t>(t)]);
    CHECK(r.refinement_edge(t) == m.refinement_edge(t));
  }
  CHECK(r.n_subdomains == m.n_subdomains);

  // A second write of the reimported mesh is byte-identical.
  std::ostringstream os2;
  write_tetmesh(r, os2);
  CHECK(os2.str() == text);
}

TEST_CASE("a reimported mesh refines fine") {
  TetMesh m = build_cube_mesh(1);
  std::ostringstream os;
  write_tetmesh(m, os);
  std::istringstream is(os.str());
  TetMesh r = read_tetmesh(is);
  TetMesh fine = refine(r, {0, 1});
  CHECK(fine.n_tets() > r.n_tets());
  double vol = 0.0;
  for (int t = 0; t < fine.n_tets(); ++t) vol += fine.volume(t);
  CHECK(vol == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("tetmesh file variants and open failures") {
  TetMesh m = build_cube_mesh(1);
  const std::string path = temp_path("roundtrip.mesh");
  write_tetmesh(m, path);
  TetMesh r = read_tetmesh(path);
  CHECK(r.n_tets() == m.n_tets());
  std::remove(path.c_str());

  CHECK_THROWS_AS(read_tetmesh(temp_path("does_not_exist.mesh")), InputError);
  CHECK_THROWS_AS(write_tetmesh(m, "/nonexistent_dir_zz/x.mesh"), InputError);
}

TEST_CASE("tetmesh read rejects malformed input") {
  auto read_text = [](const std::string& text) {
    std::istringstream is(text);
    return read_tetmesh(is);
  };
  CHECK_THROWS_AS(read_text("TETMESH v2\n0\n0\n"), InputError);
  CHECK_THROWS_AS(read_text("0\n0\n"), InputError);
  CHECK_THROWS_AS(read_text("TETMESH v1\n-1\n"), InputError);
  CHECK_THROWS_AS(read_text("TETMESH v1\n4\n0 0 0\n1 0 0\n0 1 0\nbad\n"),
                  InputError);
  // Vertex index out of range in a tet line.
  CHECK_THROWS_AS(
      read_text("TETMESH v1\n4\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n1\n0 1 2 7 1 2\n"),
      InputError);
  // Refinement edge outside 0..5.
  CHECK_THROWS_AS(
      read_text("TETMESH v1\n4\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n1\n0 1 2 3 1 6\n"),
      InputError);
  // Inconsistent geometry still goes through full validation.
  CHECK_THROWS_AS(
      read_text("TETMESH v1\n4\n0 0 0\n1 0 0\n0 1 0\n1 1 0\n1\n0 1 2 3 1 0\n"),
      GeometryError);
}

TEST_CASE("vtk output carries mesh, labels and cell data") {
  TetMesh m = build_cube_mesh(1);
  VtkCellData data;
  data.scalars.emplace_back("indicator",
                            std::vector<double>{1, 2, 3, 4, 5, 6});
  std::vector<Vec3> flux(6, Vec3(0.5, -1.0, 2.0));
  data.vectors.emplace_back("flux", flux);

  const std::string path = temp_path("dump.vtk");
  write_vtk(m, path, data);
  std::string text = slurp(path);
  std::remove(path.c_str());

  CHECK(text.rfind("# vtk DataFile Version 3.0\n", 0) == 0);
  CHECK(text.find("ASCII\n") != std::string::npos);
  CHECK(text.find("DATASET UNSTRUCTURED_GRID\n") != std::string::npos);
  CHECK(text.find("POINTS 8 double\n") != std::string::npos);
  CHECK(text.find("CELLS 6 30\n") != std::string::npos);
  CHECK(text.find("CELL_TYPES 6\n") != std::string::npos);
  CHECK(text.find("\n10\n") != std::string::npos);
  CHECK(text.find("CELL_DATA 6\n") != std::string::npos);
  CHECK(text.find("SCALARS subdomain int 1\n") != std::string::npos);
  CHECK(text.find("SCALARS indicator double 1\n") != std::string::npos);
  CHECK(text.find("VECTORS flux double\n") != std::string::npos);
  CHECK(text.find("0.5 -1 2\n") != std::string::npos);

  VtkCellData bad;
  bad.scalars.emplace_back("short", std::vector<double>{1.0});
  CHECK_THROWS_AS(write_vtk(m, temp_path("bad.vtk"), bad), InputError);
  VtkCellData badv;
  badv.vectors.emplace_back("shortv", std::vector<Vec3>{Vec3(0, 0, 0)});
  CHECK_THROWS_AS(write_vtk(m, temp_path("badv.vtk"), badv), InputError);
}

TEST_CASE("p0 field round trip and count checking") {
  TetMesh m = build_cube_mesh(2);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  P0Field u = zero_p0_field(m);
  for (auto& v : u.values) v = Vec3(d(rng), d(rng), d(rng));

  std::ostringstream os;
  write_p0_field(u, os);
  CHECK(os.str().rfind("P0FIELD v1\n48\n", 0) == 0);
  std::istringstream is(os.str());
  P0Field r = read_p0_field(is, m);
  REQUIRE(r.values.size() == u.values.size());
  for (size_t t = 0; t < u.values.size(); ++t)
    CHECK((r.values[t] - u.values[t]).norm() == 0.0);

  // Same text against a mesh with a different tet count.
  TetMesh small = build_cube_mesh(1);
  std::istringstream is2(os.str());
  CHECK_THROWS_AS(read_p0_field(is2, small), InputError);

  std::istringstream bad("P0FIELD v9\n1\n0 0 0\n");
  CHECK_THROWS_AS(read_p0_field(bad, small), InputError);

  const std::string path = temp_path("field.p0");
  write_p0_field(u, path);
  P0Field rf = read_p0_field(path, m);
  CHECK((rf.values[5] - u.values[5]).norm() == 0.0);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_p0_field(temp_path("absent.p0"), m), InputError);
}

TEST_CASE("edge field round trip and dofmap checking") {
  TetMesh m = build_cube_mesh(2);
  DofMap dm = build_dofmap(m);
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  EdgeField v = zero_edge_field(dm);
  for (Eigen::Index i = 0; i < v.coeffs.size(); ++i) v.coeffs[i] = d(rng);
  for (Eigen::Index i = 0; i < v.boundary_values.size(); ++i)
    v.boundary_values[i] = d(rng);

  std::ostringstream os;
  write_edge_field(v, os);
  std::istringstream is(os.str());
  EdgeField r = read_edge_field(is, dm);
  CHECK((r.coeffs - v.coeffs).norm() == 0.0);
  CHECK((r.boundary_values - v.boundary_values).norm() == 0.0);

  DofMap small = build_dofmap(build_cube_mesh(1));
  std::istringstream is2(os.str());
  CHECK_THROWS_AS(read_edge_field(is2, small), InputError);

  std::istringstream bad("EDGEFIELD v2\n0 0\n");
  CHECK_THROWS_AS(read_edge_field(bad, dm), InputError);

  const std::string path = temp_path("field.edge");
  write_edge_field(v, path);
  EdgeField rf = read_edge_field(path, dm);
  CHECK((rf.coeffs - v.coeffs).norm() == 0.0);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_edge_field(temp_path("absent.edge"), dm), InputError);
}

} // TEST_SUITE
