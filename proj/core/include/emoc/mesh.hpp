#pragma once

// Conforming tetrahedral meshes with subdomain labels and newest-vertex
// bisection refinement.
//
// Refinement follows the tagged-tetrahedron scheme: each tet carries a type
// in {0,1,2} and an ordering (x0,x1,x2,x3) of its vertices; the refinement
// edge is always (x0,x3).  Bisection at the midpoint x_m replaces the tet by
//
//   child A = (x0, x_m, x1, x2)
//   child B = (x3, x_m, x2, x1)   if type = 0
//   child B = (x3, x_m, x1, x2)   if type = 1 or 2
//
// both of type (type+1) mod 3.  Stored tets are kept positively oriented;
// the tagged ordering is remembered through a per-tet permutation so the
// orientation invariant and the bisection bookkeeping coexist.
//
// Conformity closure is recursive: a tet may be bisected only when every
// tet sharing its refinement edge has the same refinement edge; offenders
// are bisected first.  Cube-type initial meshes are built from Kuhn
// subdivisions (six tets per box, sharing the box diagonal, type 0), for
// which repeated closure stays conforming and three mark-all sweeps
// octasect every tet.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "emoc/types.hpp"

namespace emoc {

// Local edge e spans local vertices kTetEdges[e] = {a,b}, a < b.
inline constexpr std::array<std::array<int, 2>, 6> kTetEdges = {
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

// Local face i is opposite local vertex i.
inline constexpr std::array<std::array<int, 3>, 4> kTetFaces = {
    {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}}};

// Local edge index of the pair of local vertex positions {i,j}, i != j.
int local_edge_index(int i, int j);

struct EdgeTable {
  std::vector<std::array<int, 2>> edges;     // sorted global vertex pairs
  std::vector<std::vector<int>> edge_tets;   // incident tets, ascending
  std::vector<std::array<int, 6>> tet_edges; // per tet, local edge -> global

  int n_edges() const { return static_cast<int>(edges.size()); }
  // Global edge id of vertex pair {a,b}; -1 if absent.
  int find(int a, int b) const;

  std::unordered_map<std::uint64_t, int> index; // packed sorted pair -> id
};

struct FaceTable {
  std::vector<std::array<int, 3>> faces;     // sorted global vertex triples
  std::vector<std::array<int, 2>> face_tets; // {lower tet, higher tet or -1}
  std::vector<Vec3> normal; // unit; points lower -> higher tet, outward on
                            // boundary faces
  std::vector<double> area;
  std::vector<std::array<int, 4>> tet_faces; // per tet, local face -> global

  int n_faces() const { return static_cast<int>(faces.size()); }
  bool is_boundary(int f) const { return face_tets[f][1] < 0; }
};

// Immutable after construction: queries are safe to run concurrently and
// refinement returns a new mesh.
struct TetMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> tets; // positive signed volume each
  std::vector<int> subdomain;           // labels in {1..n_subdomains}
  std::vector<int> generation;          // bisection depth, 0 on initial tets

  // Bisection tags: tagged vertex x_k of tet t sits at stored position
  // tag_pos[t][k]; tet_type[t] is the scheme type in {0,1,2}.
  std::vector<std::array<std::uint8_t, 4>> tag_pos;
  std::vector<std::uint8_t> tet_type;

  EdgeTable edge_table;
  FaceTable face_table;
  std::vector<std::array<int, 2>> boundary_faces; // (tet, local face) pairs
  std::vector<int> interface_faces; // interior faces with differing labels
  int n_subdomains = 1;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_tets() const { return static_cast<int>(tets.size()); }

  std::array<Vec3, 4> tet_corners(int t) const;
  std::array<Vec3, 3> face_corners(int f) const;
  double volume(int t) const;
  Vec3 centroid(int t) const;

  // Local edge index of the edge bisected next (the tagged pair (x0,x3)).
  int refinement_edge(int t) const;
};

// Assembles derived tables and validates conformity, orientation and label
// range.  `tagged_tets` lists each tet in tagged order (x0,x1,x2,x3); the
// stored order may differ to keep volumes positive.
TetMesh make_mesh(std::vector<Vec3> vertices,
                  const std::vector<std::array<int, 4>>& tagged_tets,
                  const std::vector<std::uint8_t>& types,
                  std::vector<int> subdomain, std::vector<int> generation);

// Kuhn-subdivided box grid of [-1,1]^3 with n boxes per axis: 6n^3 tets,
// every tet type 0 with the box diagonal as refinement edge.
TetMesh build_cube_mesh(int n);

// The L-shaped prism [-1,1]^3 minus [0,1]x[0,1]x[-1,1]; n=1 gives the
// three-box Kuhn mesh (18 tets).  x/y boxes have size 1/n, z boxes 2/n;
// the reentrant edge lies on the z-axis.
TetMesh build_lshape_mesh(int n);

struct RefineResult {
  TetMesh mesh;
  std::vector<int> parent;  // per new tet: id of the ancestor in the input
  std::vector<char> survived; // per old tet: 1 if it was not bisected
};

// Bisects every marked tet at least once and closes for conformity.
// Children inherit the parent's subdomain label.  Marked IDs out of range
// throw InputError; an empty marked set returns a copy of the input.
TetMesh refine(const TetMesh& mesh, const std::vector<int>& marked);

// Same, plus the ancestry needed to inject element-wise data to children.
RefineResult refine_with_lineage(const TetMesh& mesh,
                                 const std::vector<int>& marked);

// k mark-all bisection sweeps (3 sweeps octasect every tet).
RefineResult bisect_sweeps(const TetMesh& mesh, int sweeps);

struct MeshSizes {
  std::vector<double> h_tet;  // diameter (max pairwise vertex distance)
  std::vector<double> h_face; // triangle diameter (longest side)
};
MeshSizes mesh_size(const TetMesh& mesh);

// Largest circumradius/inradius ratio over all tets (shape regularity).
double shape_ratio_max(const TetMesh& mesh);

// Copy of the mesh with subdomain labels re-evaluated at tet centroids
// (used for geometric interfaces that tets only approximate).
TetMesh relabel(const TetMesh& mesh,
                const std::function<int(const Vec3&)>& classify);

// Brute-force point location; returns -1 if x lies in no tet (tolerance on
// barycentric coordinates).  Intended for tests and diagnostics.
int find_containing_tet(const TetMesh& mesh, const Vec3& x, double tol = 1e-10);

} // namespace emoc
