#include "emoc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include <Eigen/Dense>

#include "emoc/errors.hpp"

namespace emoc {

namespace {

inline std::uint64_t pack_pair(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

inline double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c,
                            const Vec3& d) {
  return (b - a).cross(c - a).dot(d - a) / 6.0;
}

struct TriKey {
  std::array<int, 3> v;
  bool operator==(const TriKey& o) const { return v == o.v; }
};
struct TriKeyHash {
  std::size_t operator()(const TriKey& k) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (int x : k.v) {
      h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) +
           (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

struct VecKey {
  double x, y, z;
  bool operator==(const VecKey& o) const {
    return x == o.x && y == o.y && z == o.z;
  }
};
struct VecKeyHash {
  std::size_t operator()(const VecKey& k) const {
    auto mix = [](std::uint64_t h, double d) {
      std::uint64_t b;
      static_assert(sizeof(b) == sizeof(d));
      std::memcpy(&b, &d, sizeof(b));
      h ^= b + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      return h;
    };
    std::uint64_t h = 0;
    h = mix(h, k.x);
    h = mix(h, k.y);
    h = mix(h, k.z);
    return static_cast<std::size_t>(h);
  }
};

// Orients a tagged tet for storage: positive volume, with the tag
// permutation recording where each tagged vertex went.
void orient_tagged(const std::vector<Vec3>& verts, const std::array<int, 4>& X,
                   std::array<int, 4>& stored,
                   std::array<std::uint8_t, 4>& tpos) {
  double det = signed_volume(verts[X[0]], verts[X[1]], verts[X[2]], verts[X[3]]);
  if (det == 0.0)
    throw GeometryError("degenerate tetrahedron (zero volume)");
  if (det > 0.0) {
    stored = X;
    tpos = {0, 1, 2, 3};
  } else {
    stored = {X[0], X[1], X[3], X[2]};
    tpos = {0, 1, 3, 2};
  }
}

} // namespace

int local_edge_index(int i, int j) {
  static constexpr int tbl[4][4] = {{-1, 0, 1, 2},
                                    {0, -1, 3, 4},
                                    {1, 3, -1, 5},
                                    {2, 4, 5, -1}};
  if (i < 0 || i > 3 || j < 0 || j > 3 || i == j)
    throw InputError("local_edge_index: bad local vertex pair");
  return tbl[i][j];
}

int EdgeTable::find(int a, int b) const {
  auto it = index.find(pack_pair(a, b));
  return it == index.end() ? -1 : it->second;
}

std::array<Vec3, 4> TetMesh::tet_corners(int t) const {
  const auto& T = tets[t];
  return {vertices[T[0]], vertices[T[1]], vertices[T[2]], vertices[T[3]]};
}

std::array<Vec3, 3> TetMesh::face_corners(int f) const {
  const auto& F = face_table.faces[f];
  return {vertices[F[0]], vertices[F[1]], vertices[F[2]]};
}

double TetMesh::volume(int t) const {
  const auto& T = tets[t];
  return signed_volume(vertices[T[0]], vertices[T[1]], vertices[T[2]],
                       vertices[T[3]]);
}

Vec3 TetMesh::centroid(int t) const {
  const auto& T = tets[t];
  return 0.25 * (vertices[T[0]] + vertices[T[1]] + vertices[T[2]] +
                 vertices[T[3]]);
}

int TetMesh::refinement_edge(int t) const {
  return local_edge_index(tag_pos[t][0], tag_pos[t][3]);
}

TetMesh make_mesh(std::vector<Vec3> vertices,
                  const std::vector<std::array<int, 4>>& tagged_tets,
                  const std::vector<std::uint8_t>& types,
                  std::vector<int> subdomain, std::vector<int> generation) {
  const int nt = static_cast<int>(tagged_tets.size());
  if (static_cast<int>(types.size()) != nt ||
      static_cast<int>(subdomain.size()) != nt ||
      static_cast<int>(generation.size()) != nt)
    throw InputError("make_mesh: per-tet array sizes disagree");

  TetMesh m;
  m.vertices = std::move(vertices);
  m.subdomain = std::move(subdomain);
  m.generation = std::move(generation);
  m.tet_type = types;
  m.tets.resize(nt);
  m.tag_pos.resize(nt);
  for (int t = 0; t < nt; ++t) {
    for (int k = 0; k < 4; ++k) {
      int v = tagged_tets[t][k];
      if (v < 0 || v >= m.n_vertices())
        throw InputError("make_mesh: vertex index out of range");
    }
    orient_tagged(m.vertices, tagged_tets[t], m.tets[t], m.tag_pos[t]);
    if (m.volume(t) <= 0.0)
      throw GeometryError("make_mesh: nonpositive tet volume after orientation");
    if (m.subdomain[t] < 1)
      throw InputError("make_mesh: subdomain labels must be >= 1");
  }
  m.n_subdomains =
      nt == 0 ? 1 : *std::max_element(m.subdomain.begin(), m.subdomain.end());

  // Edge table.
  auto& et = m.edge_table;
  et.tet_edges.resize(nt);
  for (int t = 0; t < nt; ++t) {
    for (int e = 0; e < 6; ++e) {
      int a = m.tets[t][kTetEdges[e][0]];
      int b = m.tets[t][kTetEdges[e][1]];
      auto key = pack_pair(a, b);
      auto [it, inserted] = et.index.try_emplace(key, et.n_edges());
      if (inserted) {
        et.edges.push_back({std::min(a, b), std::max(a, b)});
        et.edge_tets.emplace_back();
      }
      et.tet_edges[t][e] = it->second;
      et.edge_tets[it->second].push_back(t);
    }
  }

  // Face table.
  auto& ft = m.face_table;
  ft.tet_faces.resize(nt);
  std::unordered_map<TriKey, int, TriKeyHash> face_index;
  for (int t = 0; t < nt; ++t) {
    for (int f = 0; f < 4; ++f) {
      std::array<int, 3> tri = {m.tets[t][kTetFaces[f][0]],
                                m.tets[t][kTetFaces[f][1]],
                                m.tets[t][kTetFaces[f][2]]};
      std::sort(tri.begin(), tri.end());
      auto [it, inserted] = face_index.try_emplace(TriKey{tri}, ft.n_faces());
      if (inserted) {
        ft.faces.push_back(tri);
        ft.face_tets.push_back({t, -1});
      } else {
        auto& ts = ft.face_tets[it->second];
        if (ts[1] != -1)
          throw GeometryError("make_mesh: face shared by more than two tets");
        ts[1] = t;
      }
      ft.tet_faces[t][f] = it->second;
    }
  }

  // Normals (lower-indexed tet -> higher; outward on the boundary) and areas.
  ft.normal.resize(ft.n_faces());
  ft.area.resize(ft.n_faces());
  for (int f = 0; f < ft.n_faces(); ++f) {
    auto c = m.face_corners(f);
    Vec3 nr = (c[1] - c[0]).cross(c[2] - c[0]);
    double a2 = nr.norm();
    if (a2 == 0.0)
      throw GeometryError("make_mesh: degenerate face");
    ft.area[f] = 0.5 * a2;
    Vec3 n = nr / a2;
    int t = ft.face_tets[f][0];
    // The vertex of t opposite the face.
    Vec3 opp;
    for (int k = 0; k < 4; ++k) {
      int v = m.tets[t][k];
      if (v != ft.faces[f][0] && v != ft.faces[f][1] && v != ft.faces[f][2])
        opp = m.vertices[v];
    }
    Vec3 fc = (c[0] + c[1] + c[2]) / 3.0;
    if (n.dot(fc - opp) < 0.0) n = -n;
    ft.normal[f] = n;
  }

  // Boundary and interface lists.
  for (int f = 0; f < ft.n_faces(); ++f) {
    if (ft.is_boundary(f)) {
      int t = ft.face_tets[f][0];
      int lf = -1;
      for (int k = 0; k < 4; ++k)
        if (ft.tet_faces[t][k] == f) lf = k;
      m.boundary_faces.push_back({t, lf});
    } else if (m.subdomain[ft.face_tets[f][0]] !=
               m.subdomain[ft.face_tets[f][1]]) {
      m.interface_faces.push_back(f);
    }
  }

  // Conformity: a vertex at the midpoint of an existing edge is a hanging
  // node (bisection creates exactly such vertices).  Vertex coordinates are
  // hash-compared bitwise; midpoints of the same parents are bit-identical.
  std::unordered_map<VecKey, int, VecKeyHash> vert_at;
  for (int v = 0; v < m.n_vertices(); ++v)
    vert_at[{m.vertices[v].x(), m.vertices[v].y(), m.vertices[v].z()}] = v;
  for (const auto& e : et.edges) {
    Vec3 mid = 0.5 * (m.vertices[e[0]] + m.vertices[e[1]]);
    auto it = vert_at.find({mid.x(), mid.y(), mid.z()});
    if (it != vert_at.end() && it->second != e[0] && it->second != e[1])
      throw GeometryError("make_mesh: hanging node detected (vertex " +
                          std::to_string(it->second) + " splits an edge)");
  }
  return m;
}

namespace {

// Mutable scratch mesh used by refine; compacted into a TetMesh at the end.
struct Work {
  std::vector<Vec3> verts;
  std::vector<std::array<int, 4>> tet; // stored (positively oriented) order
  std::vector<std::array<std::uint8_t, 4>> tpos;
  std::vector<std::uint8_t> type;
  std::vector<int> sub, gen, origin;
  std::vector<char> alive;
  std::unordered_map<std::uint64_t, std::vector<int>> edge_tets;
  std::unordered_map<std::uint64_t, int> midpoint;
  long n_splits = 0;

  int tagged(int t, int k) const { return tet[t][tpos[t][k]]; }

  std::uint64_t refedge_key(int t) const {
    return pack_pair(tagged(t, 0), tagged(t, 3));
  }

  void register_edges(int t) {
    for (int e = 0; e < 6; ++e)
      edge_tets[pack_pair(tet[t][kTetEdges[e][0]], tet[t][kTetEdges[e][1]])]
          .push_back(t);
  }

  int add_tet(const std::array<int, 4>& X, std::uint8_t typ, int s, int g,
              int orig) {
    std::array<int, 4> stored;
    std::array<std::uint8_t, 4> tp;
    orient_tagged(verts, X, stored, tp);
    int id = static_cast<int>(tet.size());
    tet.push_back(stored);
    tpos.push_back(tp);
    type.push_back(typ);
    sub.push_back(s);
    gen.push_back(g);
    origin.push_back(orig);
    alive.push_back(1);
    register_edges(id);
    return id;
  }

  void kill(int t) {
    alive[t] = 0;
    for (int e = 0; e < 6; ++e) {
      auto& lst =
          edge_tets[pack_pair(tet[t][kTetEdges[e][0]], tet[t][kTetEdges[e][1]])];
      lst.erase(std::remove(lst.begin(), lst.end(), t), lst.end());
    }
  }

  void split(int t) {
    std::array<int, 4> X = {tagged(t, 0), tagged(t, 1), tagged(t, 2),
                            tagged(t, 3)};
    auto key = pack_pair(X[0], X[3]);
    auto [it, inserted] = midpoint.try_emplace(key, -1);
    if (inserted) {
      it->second = static_cast<int>(verts.size());
      verts.push_back(0.5 * (verts[X[0]] + verts[X[3]]));
    }
    int m = it->second;
    std::uint8_t tau = type[t];
    std::uint8_t tc = static_cast<std::uint8_t>((tau + 1) % 3);
    int s = sub[t], g = gen[t] + 1, orig = origin[t];
    kill(t);
    add_tet({X[0], m, X[1], X[2]}, tc, s, g, orig);
    if (tau == 0)
      add_tet({X[3], m, X[2], X[1]}, tc, s, g, orig);
    else
      add_tet({X[3], m, X[1], X[2]}, tc, s, g, orig);
    ++n_splits;
  }

  // Bisects t0, recursively bisecting incompatible refinement-edge
  // neighbours first (smallest ID first).
  void conform(int t0) {
    std::vector<int> stack = {t0};
    while (!stack.empty()) {
      int t = stack.back();
      if (!alive[t]) {
        stack.pop_back();
        continue;
      }
      auto key = refedge_key(t);
      std::vector<int> patch = edge_tets[key];
      std::sort(patch.begin(), patch.end());
      std::vector<int> offenders;
      for (int s : patch)
        if (refedge_key(s) != key) offenders.push_back(s);
      if (offenders.empty()) {
        for (int s : patch) split(s);
        stack.pop_back();
      } else {
        for (auto it = offenders.rbegin(); it != offenders.rend(); ++it)
          stack.push_back(*it);
      }
      if (stack.size() > 200000 || n_splits > 50000000)
        throw SolverError("refine: conformity closure failed to terminate");
    }
  }
};

} // namespace

RefineResult refine_with_lineage(const TetMesh& mesh,
                                 const std::vector<int>& marked) {
  for (int t : marked)
    if (t < 0 || t >= mesh.n_tets())
      throw InputError("refine: marked tet ID " + std::to_string(t) +
                       " out of range");

  Work w;
  w.verts = mesh.vertices;
  w.tet = mesh.tets;
  w.tpos = mesh.tag_pos;
  w.type = mesh.tet_type;
  w.sub = mesh.subdomain;
  w.gen = mesh.generation;
  w.origin.resize(mesh.n_tets());
  std::iota(w.origin.begin(), w.origin.end(), 0);
  w.alive.assign(mesh.n_tets(), 1);
  for (int t = 0; t < mesh.n_tets(); ++t) w.register_edges(t);

  std::vector<int> order(marked);
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());
  for (int t : order)
    if (w.alive[t]) w.conform(t);

  // Compact alive tets in creation order (survivors first, then children).
  std::vector<std::array<int, 4>> tagged;
  std::vector<std::uint8_t> types;
  std::vector<int> sub, gen;
  RefineResult out;
  for (int t = 0; t < static_cast<int>(w.tet.size()); ++t) {
    if (!w.alive[t]) continue;
    tagged.push_back({w.tagged(t, 0), w.tagged(t, 1), w.tagged(t, 2),
                      w.tagged(t, 3)});
    types.push_back(w.type[t]);
    sub.push_back(w.sub[t]);
    gen.push_back(w.gen[t]);
    out.parent.push_back(w.origin[t]);
  }
  out.survived.assign(mesh.n_tets(), 0);
  for (int t = 0; t < mesh.n_tets(); ++t) out.survived[t] = w.alive[t];
  out.mesh = make_mesh(std::move(w.verts), tagged, types, std::move(sub),
                       std::move(gen));
  out.mesh.n_subdomains = mesh.n_subdomains;
  return out;
}

TetMesh refine(const TetMesh& mesh, const std::vector<int>& marked) {
  return refine_with_lineage(mesh, marked).mesh;
}

RefineResult bisect_sweeps(const TetMesh& mesh, int sweeps) {
  RefineResult r;
  r.mesh = mesh;
  r.parent.resize(mesh.n_tets());
  std::iota(r.parent.begin(), r.parent.end(), 0);
  r.survived.assign(mesh.n_tets(), 1);
  for (int s = 0; s < sweeps; ++s) {
    std::vector<int> all(r.mesh.n_tets());
    std::iota(all.begin(), all.end(), 0);
    RefineResult step = refine_with_lineage(r.mesh, all);
    std::vector<int> parent(step.mesh.n_tets());
    for (int t = 0; t < step.mesh.n_tets(); ++t)
      parent[t] = r.parent[step.parent[t]];
    r.mesh = std::move(step.mesh);
    r.parent = std::move(parent);
  }
  if (sweeps > 0) r.survived.assign(mesh.n_tets(), 0);
  return r;
}

TetMesh build_cube_mesh(int n) {
  if (n < 1) throw InputError("build_cube_mesh: n must be >= 1");
  std::vector<Vec3> verts;
  auto vid = [&](int i, int j, int k) {
    return (i * (n + 1) + j) * (n + 1) + k;
  };
  verts.resize((n + 1) * (n + 1) * (n + 1));
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      for (int k = 0; k <= n; ++k)
        verts[vid(i, j, k)] = Vec3(-1.0 + 2.0 * i / n, -1.0 + 2.0 * j / n,
                                   -1.0 + 2.0 * k / n);

  std::vector<std::array<int, 4>> tagged;
  static constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                      {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (const auto& p : perms) {
          std::array<int, 3> c = {i, j, k};
          std::array<int, 4> X;
          X[0] = vid(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s) {
            ++c[p[s]];
            X[s + 1] = vid(c[0], c[1], c[2]);
          }
          tagged.push_back(X);
        }
  const int nt = static_cast<int>(tagged.size());
  return make_mesh(std::move(verts), tagged,
                   std::vector<std::uint8_t>(nt, 0), std::vector<int>(nt, 1),
                   std::vector<int>(nt, 0));
}

TetMesh build_lshape_mesh(int n) {
  if (n < 1) throw InputError("build_lshape_mesh: n must be >= 1");
  // x/y boxes of size 1/n on [-1,1], z boxes of size 2/n; the column
  // x>0, y>0 is left out.
  const int nxy = 2 * n, nz = n;
  std::vector<Vec3> verts((nxy + 1) * (nxy + 1) * (nz + 1));
  auto vid = [&](int i, int j, int k) {
    return (i * (nxy + 1) + j) * (nz + 1) + k;
  };
  for (int i = 0; i <= nxy; ++i)
    for (int j = 0; j <= nxy; ++j)
      for (int k = 0; k <= nz; ++k)
        verts[vid(i, j, k)] = Vec3(-1.0 + 1.0 * i / n, -1.0 + 1.0 * j / n,
                                   -1.0 + 2.0 * k / n);

  std::vector<std::array<int, 4>> tagged;
  static constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                      {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (int i = 0; i < nxy; ++i)
    for (int j = 0; j < nxy; ++j) {
      if (i >= n && j >= n) continue; // removed quadrant x>0, y>0
      for (int k = 0; k < nz; ++k)
        for (const auto& p : perms) {
          std::array<int, 3> c = {i, j, k};
          std::array<int, 4> X;
          X[0] = vid(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s) {
            ++c[p[s]];
            X[s + 1] = vid(c[0], c[1], c[2]);
          }
          tagged.push_back(X);
        }
    }

  // Drop grid vertices the removed column orphaned.
  std::vector<int> remap(verts.size(), -1);
  std::vector<Vec3> used;
  for (auto& X : tagged)
    for (int& v : X) {
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(used.size());
        used.push_back(verts[v]);
      }
      v = remap[v];
    }
  const int nt = static_cast<int>(tagged.size());
  return make_mesh(std::move(used), tagged, std::vector<std::uint8_t>(nt, 0),
                   std::vector<int>(nt, 1), std::vector<int>(nt, 0));
}

MeshSizes mesh_size(const TetMesh& mesh) {
  MeshSizes s;
  s.h_tet.resize(mesh.n_tets());
  for (int t = 0; t < mesh.n_tets(); ++t) {
    auto c = mesh.tet_corners(t);
    double h = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) h = std::max(h, (c[i] - c[j]).norm());
    s.h_tet[t] = h;
  }
  s.h_face.resize(mesh.face_table.n_faces());
  for (int f = 0; f < mesh.face_table.n_faces(); ++f) {
    auto c = mesh.face_corners(f);
    s.h_face[f] = std::max({(c[0] - c[1]).norm(), (c[1] - c[2]).norm(),
                            (c[0] - c[2]).norm()});
  }
  return s;
}

double shape_ratio_max(const TetMesh& mesh) {
  double worst = 0.0;
  for (int t = 0; t < mesh.n_tets(); ++t) {
    auto v = mesh.tet_corners(t);
    double vol = mesh.volume(t);
    double area = 0.0;
    for (const auto& f : kTetFaces) {
      area += 0.5 *
              (v[f[1]] - v[f[0]]).cross(v[f[2]] - v[f[0]]).norm();
    }
    double inradius = 3.0 * vol / area;
    // Circumcenter from |x-v0|^2 = |x-vi|^2, i=1..3.
    Eigen::Matrix3d A;
    Vec3 rhs;
    for (int i = 0; i < 3; ++i) {
      A.row(i) = 2.0 * (v[i + 1] - v[0]).transpose();
      rhs[i] = v[i + 1].squaredNorm() - v[0].squaredNorm();
    }
    Vec3 c = A.partialPivLu().solve(rhs);
    double circum = (v[0] - c).norm();
    worst = std::max(worst, circum / inradius);
  }
  return worst;
}

TetMesh relabel(const TetMesh& mesh,
                const std::function<int(const Vec3&)>& classify) {
  TetMesh m = mesh;
  for (int t = 0; t < m.n_tets(); ++t) {
    int label = classify(m.centroid(t));
    if (label < 1)
      throw InputError("relabel: classifier returned label < 1");
    m.subdomain[t] = label;
  }
  m.n_subdomains =
      *std::max_element(m.subdomain.begin(), m.subdomain.end());
  m.interface_faces.clear();
  const auto& ft = m.face_table;
  for (int f = 0; f < ft.n_faces(); ++f) {
    if (!ft.is_boundary(f) &&
        m.subdomain[ft.face_tets[f][0]] != m.subdomain[ft.face_tets[f][1]])
      m.interface_faces.push_back(f);
  }
  return m;
}

int find_containing_tet(const TetMesh& mesh, const Vec3& x, double tol) {
  for (int t = 0; t < mesh.n_tets(); ++t) {
    auto v = mesh.tet_corners(t);
    double V = signed_volume(v[0], v[1], v[2], v[3]);
    double l0 = signed_volume(x, v[1], v[2], v[3]) / V;
    double l1 = signed_volume(v[0], x, v[2], v[3]) / V;
    double l2 = signed_volume(v[0], v[1], x, v[3]) / V;
    double l3 = 1.0 - l0 - l1 - l2;
    if (l0 >= -tol && l1 >= -tol && l2 >= -tol && l3 >= -tol) return t;
  }
  return -1;
}

} // namespace emoc
