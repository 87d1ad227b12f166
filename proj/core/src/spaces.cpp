#include "emoc/spaces.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "emoc/errors.hpp"
#include "emoc/quadrature.hpp"

namespace emoc {

DofMap build_dofmap(const TetMesh& mesh) {
  const auto& et = mesh.edge_table;
  DofMap dm;
  dm.edge_dof.assign(et.n_edges(), 0);
  dm.edge_bslot.assign(et.n_edges(), -1);

  // Constrain every edge of a boundary face.
  std::vector<char> on_boundary(et.n_edges(), 0);
  for (const auto& [t, lf] : mesh.boundary_faces) {
    const auto& fv = kTetFaces[lf];
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        int le = local_edge_index(fv[i], fv[j]);
        on_boundary[et.tet_edges[t][le]] = 1;
      }
  }
  for (int e = 0; e < et.n_edges(); ++e) {
    if (on_boundary[e]) {
      dm.edge_dof[e] = -1;
      dm.edge_bslot[e] = dm.n_boundary++;
    } else {
      dm.edge_dof[e] = dm.n_state++;
    }
  }

  dm.sign.resize(mesh.n_tets());
  for (int t = 0; t < mesh.n_tets(); ++t) {
    for (int e = 0; e < 6; ++e) {
      int a = mesh.tets[t][kTetEdges[e][0]];
      int b = mesh.tets[t][kTetEdges[e][1]];
      dm.sign[t][e] = static_cast<std::int8_t>(a < b ? 1 : -1);
    }
  }
  return dm;
}

EdgeField zero_edge_field(const DofMap& dofmap) {
  EdgeField f;
  f.coeffs = VecX::Zero(dofmap.n_state);
  f.boundary_values = VecX::Zero(dofmap.n_boundary);
  return f;
}

P0Field zero_p0_field(const TetMesh& mesh) {
  P0Field f;
  f.values.assign(mesh.n_tets(), Vec3::Zero());
  return f;
}

WhitneyBasis whitney_basis(const std::array<Vec3, 4>& v) {
  Eigen::Matrix3d J;
  J.col(0) = v[1] - v[0];
  J.col(1) = v[2] - v[0];
  J.col(2) = v[3] - v[0];
  double det = J.determinant();
  if (det == 0.0 || !std::isfinite(det))
    throw GeometryError("whitney_basis: degenerate tetrahedron");
  Eigen::Matrix3d Jinv = J.inverse();
  WhitneyBasis wb;
  // Row k of J^{-1} is grad(lambda_{k+1}); lambdas sum to one.
  wb.grad_lambda[1] = Jinv.row(0);
  wb.grad_lambda[2] = Jinv.row(1);
  wb.grad_lambda[3] = Jinv.row(2);
  wb.grad_lambda[0] = -(wb.grad_lambda[1] + wb.grad_lambda[2] +
                        wb.grad_lambda[3]);
  for (int e = 0; e < 6; ++e) {
    int a = kTetEdges[e][0], b = kTetEdges[e][1];
    wb.curl[e] = 2.0 * wb.grad_lambda[a].cross(wb.grad_lambda[b]);
  }
  return wb;
}

std::array<double, 4> barycentric(const std::array<Vec3, 4>& corners,
                                  const WhitneyBasis& wb, const Vec3& x) {
  std::array<double, 4> l;
  for (int i = 0; i < 4; ++i) {
    int j = (i + 1) % 4; // any other vertex: lambda_i vanishes there
    l[i] = wb.grad_lambda[i].dot(x - corners[j]);
  }
  return l;
}

Vec3 whitney_value(const WhitneyBasis& wb, int e,
                   const std::array<double, 4>& l) {
  int a = kTetEdges[e][0], b = kTetEdges[e][1];
  return l[a] * wb.grad_lambda[b] - l[b] * wb.grad_lambda[a];
}

std::array<double, 6> local_coefficients(const TetMesh& mesh,
                                         const DofMap& dofmap,
                                         const EdgeField& field, int t) {
  std::array<double, 6> c;
  for (int e = 0; e < 6; ++e) {
    int ge = mesh.edge_table.tet_edges[t][e];
    double v = dofmap.edge_dof[ge] >= 0
                   ? field.coeffs[dofmap.edge_dof[ge]]
                   : field.boundary_values[dofmap.edge_bslot[ge]];
    c[e] = dofmap.sign[t][e] * v;
  }
  return c;
}

Vec3 eval_edge_field(const TetMesh& mesh, const DofMap& dofmap,
                     const EdgeField& field, int t, const Vec3& x) {
  auto corners = mesh.tet_corners(t);
  auto wb = whitney_basis(corners);
  auto l = barycentric(corners, wb, x);
  auto c = local_coefficients(mesh, dofmap, field, t);
  Vec3 val = Vec3::Zero();
  for (int e = 0; e < 6; ++e) val += c[e] * whitney_value(wb, e, l);
  return val;
}

Vec3 eval_curl(const TetMesh& mesh, const DofMap& dofmap,
               const EdgeField& field, int t) {
  auto wb = whitney_basis(mesh.tet_corners(t));
  auto c = local_coefficients(mesh, dofmap, field, t);
  Vec3 val = Vec3::Zero();
  for (int e = 0; e < 6; ++e) val += c[e] * wb.curl[e];
  return val;
}

namespace {

// Tangential line integral of g along the edge a->b, 2-point Gauss.
double edge_integral(const std::function<Vec3(const Vec3&)>& g, const Vec3& a,
                     const Vec3& b) {
  static const double s0 = 0.5 - 0.5 / std::sqrt(3.0);
  static const double s1 = 0.5 + 0.5 / std::sqrt(3.0);
  Vec3 d = b - a;
  return 0.5 * (g(a + s0 * d).dot(d) + g(a + s1 * d).dot(d));
}

} // namespace

EdgeField edge_interpolate(const std::function<Vec3(const Vec3&)>& g,
                           const TetMesh& mesh, const DofMap& dofmap) {
  EdgeField f = zero_edge_field(dofmap);
  const auto& et = mesh.edge_table;
  for (int e = 0; e < et.n_edges(); ++e) {
    const auto& [a, b] = et.edges[e]; // a < b: the global direction
    double dof = edge_integral(g, mesh.vertices[a], mesh.vertices[b]);
    if (dofmap.edge_dof[e] >= 0)
      f.coeffs[dofmap.edge_dof[e]] = dof;
    else
      f.boundary_values[dofmap.edge_bslot[e]] = dof;
  }
  return f;
}

EdgeField edge_interpolate_boundary(const std::function<Vec3(const Vec3&)>& g,
                                    const TetMesh& mesh,
                                    const DofMap& dofmap) {
  EdgeField f = zero_edge_field(dofmap);
  const auto& et = mesh.edge_table;
  for (int e = 0; e < et.n_edges(); ++e) {
    if (dofmap.edge_bslot[e] < 0) continue;
    const auto& [a, b] = et.edges[e];
    f.boundary_values[dofmap.edge_bslot[e]] =
        edge_integral(g, mesh.vertices[a], mesh.vertices[b]);
  }
  return f;
}

P0Field project_p0(const std::function<Vec3(const Vec3&)>& v,
                   const TetMesh& mesh, const std::vector<int>& degree) {
  if (static_cast<int>(degree.size()) != mesh.n_tets())
    throw InputError("project_p0: per-tet degree vector has wrong size");
  P0Field f = zero_p0_field(mesh);
  for (int t = 0; t < mesh.n_tets(); ++t) {
    const QuadRule& rule = tet_rule(degree[t]);
    auto corners = mesh.tet_corners(t);
    Vec3 sum = Vec3::Zero();
    double wsum = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      sum += rule.weights[q] * v(bary_point(corners, rule.points[q]));
      wsum += rule.weights[q];
    }
    f.values[t] = sum / wsum; // weights sum to the reference volume
  }
  return f;
}

P0Field project_p0(const std::function<Vec3(const Vec3&)>& v,
                   const TetMesh& mesh, int degree) {
  return project_p0(v, mesh, std::vector<int>(mesh.n_tets(), degree));
}

P0Field project_p0(const TetMesh& mesh, const DofMap& dofmap,
                   const EdgeField& field) {
  // The restriction to a tet is linear, so its mean is the centroid value.
  P0Field f = zero_p0_field(mesh);
  for (int t = 0; t < mesh.n_tets(); ++t)
    f.values[t] = eval_edge_field(mesh, dofmap, field, t, mesh.centroid(t));
  return f;
}

P0Field project_admissible(const P0Field& v) {
  P0Field f = v;
  for (auto& val : f.values) val = val.cwiseMax(0.0);
  return f;
}

double p0_dot(const TetMesh& mesh, const P0Field& a, const P0Field& b) {
  double s = 0.0;
  for (int t = 0; t < mesh.n_tets(); ++t)
    s += mesh.volume(t) * a.values[t].dot(b.values[t]);
  return s;
}

double p0_norm(const TetMesh& mesh, const P0Field& a) {
  return std::sqrt(std::max(0.0, p0_dot(mesh, a, a)));
}

} // namespace emoc
