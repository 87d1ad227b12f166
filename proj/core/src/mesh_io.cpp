#include "emoc/mesh_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "emoc/errors.hpp"

namespace emoc {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

} // namespace

void write_tetmesh(const TetMesh& mesh, std::ostream& os) {
  os << "TETMESH v1\n" << mesh.n_vertices() << "\n";
  for (const auto& v : mesh.vertices)
    os << fmt_double(v.x()) << ' ' << fmt_double(v.y()) << ' '
       << fmt_double(v.z()) << "\n";
  os << mesh.n_tets() << "\n";
  for (int t = 0; t < mesh.n_tets(); ++t) {
    const auto& T = mesh.tets[t];
    os << T[0] << ' ' << T[1] << ' ' << T[2] << ' ' << T[3] << ' '
       << mesh.subdomain[t] << ' ' << mesh.refinement_edge(t) << "\n";
  }
}

void write_tetmesh(const TetMesh& mesh, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw InputError("write_tetmesh: cannot open '" + path + "'");
  write_tetmesh(mesh, os);
  if (!os) throw InputError("write_tetmesh: write to '" + path + "' failed");
}

TetMesh read_tetmesh(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "TETMESH v1")
    throw InputError("read_tetmesh: missing 'TETMESH v1' header");
  int nv = -1;
  if (!(is >> nv) || nv < 0)
    throw InputError("read_tetmesh: bad vertex count");
  std::vector<Vec3> verts(nv);
  for (int v = 0; v < nv; ++v)
    if (!(is >> verts[v].x() >> verts[v].y() >> verts[v].z()))
      throw InputError("read_tetmesh: bad vertex line " + std::to_string(v));
  int nt = -1;
  if (!(is >> nt) || nt < 0)
    throw InputError("read_tetmesh: bad tet count");

  std::vector<std::array<int, 4>> tagged(nt);
  std::vector<int> labels(nt);
  for (int t = 0; t < nt; ++t) {
    std::array<int, 4> T;
    int label, redge;
    if (!(is >> T[0] >> T[1] >> T[2] >> T[3] >> label >> redge))
      throw InputError("read_tetmesh: bad tet line " + std::to_string(t));
    if (redge < 0 || redge > 5)
      throw InputError("read_tetmesh: refinement-edge index out of range");
    for (int v : T)
      if (v < 0 || v >= nv)
        throw InputError("read_tetmesh: vertex index out of range");
    // Re-seed tags: the refinement edge spans tagged positions 0 and 3;
    // remaining vertices keep ascending position order.
    int a = kTetEdges[redge][0], b = kTetEdges[redge][1];
    std::array<int, 4> X;
    X[0] = T[a];
    X[3] = T[b];
    int k = 1;
    for (int p = 0; p < 4; ++p)
      if (p != a && p != b) X[k++] = T[p];
    tagged[t] = X;
    labels[t] = label;
  }
  return make_mesh(std::move(verts), tagged, std::vector<std::uint8_t>(nt, 0),
                   std::move(labels), std::vector<int>(nt, 0));
}

TetMesh read_tetmesh(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InputError("read_tetmesh: cannot open '" + path + "'");
  return read_tetmesh(is);
}

void write_vtk(const TetMesh& mesh, const std::string& path,
               const VtkCellData& cell_data) {
  for (const auto& [name, vals] : cell_data.scalars)
    if (static_cast<int>(vals.size()) != mesh.n_tets())
      throw InputError("write_vtk: scalar array '" + name + "' has wrong size");
  for (const auto& [name, vals] : cell_data.vectors)
    if (static_cast<int>(vals.size()) != mesh.n_tets())
      throw InputError("write_vtk: vector array '" + name + "' has wrong size");

  std::ofstream os(path);
  if (!os) throw InputError("write_vtk: cannot open '" + path + "'");
  os << "# vtk DataFile Version 3.0\n"
     << "tetrahedral mesh\n"
     << "ASCII\n"
     << "DATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.n_vertices() << " double\n";
  for (const auto& v : mesh.vertices)
    os << fmt_double(v.x()) << ' ' << fmt_double(v.y()) << ' '
       << fmt_double(v.z()) << "\n";
  os << "CELLS " << mesh.n_tets() << ' ' << 5 * mesh.n_tets() << "\n";
  for (const auto& T : mesh.tets)
    os << "4 " << T[0] << ' ' << T[1] << ' ' << T[2] << ' ' << T[3] << "\n";
  os << "CELL_TYPES " << mesh.n_tets() << "\n";
  for (int t = 0; t < mesh.n_tets(); ++t) os << "10\n";

  os << "CELL_DATA " << mesh.n_tets() << "\n";
  os << "SCALARS subdomain int 1\nLOOKUP_TABLE default\n";
  for (int t = 0; t < mesh.n_tets(); ++t) os << mesh.subdomain[t] << "\n";
  for (const auto& [name, vals] : cell_data.scalars) {
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : vals) os << fmt_double(v) << "\n";
  }
  for (const auto& [name, vals] : cell_data.vectors) {
    os << "VECTORS " << name << " double\n";
    for (const auto& v : vals)
      os << fmt_double(v.x()) << ' ' << fmt_double(v.y()) << ' '
         << fmt_double(v.z()) << "\n";
  }
  if (!os) throw InputError("write_vtk: write to '" + path + "' failed");
}

void write_p0_field(const P0Field& u, std::ostream& os) {
  os << "P0FIELD v1\n" << u.values.size() << "\n";
  for (const auto& v : u.values)
    os << fmt_double(v.x()) << ' ' << fmt_double(v.y()) << ' '
       << fmt_double(v.z()) << "\n";
}

void write_p0_field(const P0Field& u, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw InputError("write_p0_field: cannot open '" + path + "'");
  write_p0_field(u, os);
  if (!os) throw InputError("write_p0_field: write to '" + path + "' failed");
}

P0Field read_p0_field(std::istream& is, const TetMesh& mesh) {
  std::string line;
  if (!std::getline(is, line) || line != "P0FIELD v1")
    throw InputError("read_p0_field: missing 'P0FIELD v1' header");
  long n = -1;
  if (!(is >> n) || n != mesh.n_tets())
    throw InputError("read_p0_field: value count does not match the mesh");
  P0Field u;
  u.values.resize(static_cast<size_t>(n));
  for (auto& v : u.values)
    if (!(is >> v.x() >> v.y() >> v.z()))
      throw InputError("read_p0_field: bad value line");
  return u;
}

P0Field read_p0_field(const std::string& path, const TetMesh& mesh) {
  std::ifstream is(path);
  if (!is) throw InputError("read_p0_field: cannot open '" + path + "'");
  return read_p0_field(is, mesh);
}

void write_edge_field(const EdgeField& v, std::ostream& os) {
  os << "EDGEFIELD v1\n" << v.coeffs.size() << ' ' << v.boundary_values.size()
     << "\n";
  for (Eigen::Index i = 0; i < v.coeffs.size(); ++i)
    os << fmt_double(v.coeffs[i]) << "\n";
  for (Eigen::Index i = 0; i < v.boundary_values.size(); ++i)
    os << fmt_double(v.boundary_values[i]) << "\n";
}

void write_edge_field(const EdgeField& v, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw InputError("write_edge_field: cannot open '" + path + "'");
  write_edge_field(v, os);
  if (!os) throw InputError("write_edge_field: write to '" + path + "' failed");
}

EdgeField read_edge_field(std::istream& is, const DofMap& dofmap) {
  std::string line;
  if (!std::getline(is, line) || line != "EDGEFIELD v1")
    throw InputError("read_edge_field: missing 'EDGEFIELD v1' header");
  long ni = -1, nb = -1;
  if (!(is >> ni >> nb) || ni != dofmap.n_state || nb != dofmap.n_boundary)
    throw InputError("read_edge_field: sizes do not match the DOF map");
  EdgeField v;
  v.coeffs.resize(ni);
  v.boundary_values.resize(nb);
  for (long i = 0; i < ni; ++i)
    if (!(is >> v.coeffs[i]))
      throw InputError("read_edge_field: bad coefficient line");
  for (long i = 0; i < nb; ++i)
    if (!(is >> v.boundary_values[i]))
      throw InputError("read_edge_field: bad boundary-value line");
  return v;
}

EdgeField read_edge_field(const std::string& path, const DofMap& dofmap) {
  std::ifstream is(path);
  if (!is) throw InputError("read_edge_field: cannot open '" + path + "'");
  return read_edge_field(is, dofmap);
}

} // namespace emoc
