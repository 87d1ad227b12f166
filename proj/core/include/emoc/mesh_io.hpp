#pragma once

// Plain-text mesh exchange and VTK visualization output.
//
// TETMESH v1 layout:
//   TETMESH v1
//   <vertex count>
//   x y z                      (one vertex per line)
//   <tet count>
//   i0 i1 i2 i3 label redge    (zero-based indices, subdomain label,
//                               refinement-edge local index 0..5)
//
// Importing re-seeds the bisection tags from the stored refinement edge
// (type 0, remaining vertices in ascending order), so a round-tripped mesh
// keeps its geometry, labels and next refinement edges; deeper lineage
// state is not part of the format.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "emoc/mesh.hpp"
#include "emoc/spaces.hpp"

namespace emoc {

void write_tetmesh(const TetMesh& mesh, const std::string& path);
void write_tetmesh(const TetMesh& mesh, std::ostream& os);

TetMesh read_tetmesh(const std::string& path);
TetMesh read_tetmesh(std::istream& is);

// Companion field formats:
//   P0FIELD v1    / <tet count>   / one "ux uy uz" line per tet
//   EDGEFIELD v1  / <n_state> <n_boundary> / coefficients, then boundary
//                   values, one per line
// Counts must match the mesh/dofmap on import (InputError otherwise).
void write_p0_field(const P0Field& u, std::ostream& os);
void write_p0_field(const P0Field& u, const std::string& path);
P0Field read_p0_field(std::istream& is, const TetMesh& mesh);
P0Field read_p0_field(const std::string& path, const TetMesh& mesh);

void write_edge_field(const EdgeField& v, std::ostream& os);
void write_edge_field(const EdgeField& v, const std::string& path);
EdgeField read_edge_field(std::istream& is, const DofMap& dofmap);
EdgeField read_edge_field(const std::string& path, const DofMap& dofmap);

// Legacy-format VTK unstructured grid with optional per-cell data arrays.
// Scalar/vector arrays must have one entry (or 3 components) per tet.
struct VtkCellData {
  std::vector<std::pair<std::string, std::vector<double>>> scalars;
  std::vector<std::pair<std::string, std::vector<Vec3>>> vectors;
};

void write_vtk(const TetMesh& mesh, const std::string& path,
               const VtkCellData& cell_data = {});

} // namespace emoc
