#include "emoc/assembly.hpp"

#include <cstdio>
#include <fstream>

#include "emoc/errors.hpp"
#include "emoc/quadrature.hpp"

namespace emoc {

Coefficients make_coefficients(const TetMesh& mesh,
                               const std::vector<double>& mu_inv_by_label,
                               const std::vector<double>& sigma_by_label) {
  Coefficients c;
  c.mu_inv.resize(mesh.n_tets());
  c.sigma.resize(mesh.n_tets());
  for (int t = 0; t < mesh.n_tets(); ++t) {
    int l = mesh.subdomain[t];
    if (l < 1 || l > static_cast<int>(mu_inv_by_label.size()) ||
        l > static_cast<int>(sigma_by_label.size()))
      throw InputError("make_coefficients: no coefficients for label " +
                       std::to_string(l));
    c.mu_inv[t] = mu_inv_by_label[l - 1];
    c.sigma[t] = sigma_by_label[l - 1];
    if (!(c.mu_inv[t] > 0.0) || !(c.sigma[t] > 0.0))
      throw InputError("make_coefficients: coefficients must be positive");
  }
  return c;
}

Eigen::Matrix<double, 6, 6> local_matrix_B(const TetMesh& mesh,
                                           const DofMap& dofmap,
                                           const Coefficients& coeffs, int t) {
  auto corners = mesh.tet_corners(t);
  auto wb = whitney_basis(corners);
  double vol = mesh.volume(t);
  Eigen::Matrix<double, 6, 6> K;

  // Curl-curl block: curls are constant, the integral is exact.
  for (int i = 0; i < 6; ++i)
    for (int j = i; j < 6; ++j)
      K(i, j) = coeffs.mu_inv[t] * vol * wb.curl[i].dot(wb.curl[j]);

  // Mass block: products of linear fields, exact with a degree-2 rule.
  const QuadRule& rule = tet_rule(2);
  double scale = 6.0 * vol;
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const auto& l = rule.points[q];
    std::array<Vec3, 6> phi;
    for (int e = 0; e < 6; ++e) phi[e] = whitney_value(wb, e, l);
    double w = coeffs.sigma[t] * scale * rule.weights[q];
    for (int i = 0; i < 6; ++i)
      for (int j = i; j < 6; ++j) K(i, j) += w * phi[i].dot(phi[j]);
  }

  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < i; ++j) K(i, j) = K(j, i);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      K(i, j) *= dofmap.sign[t][i] * dofmap.sign[t][j];
  return K;
}

SpMat assemble_B(const TetMesh& mesh, const DofMap& dofmap,
                 const Coefficients& coeffs) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(36 * mesh.n_tets());
  for (int t = 0; t < mesh.n_tets(); ++t) {
    auto K = local_matrix_B(mesh, dofmap, coeffs, t);
    const auto& te = mesh.edge_table.tet_edges[t];
    for (int i = 0; i < 6; ++i) {
      int gi = dofmap.edge_dof[te[i]];
      if (gi < 0) continue;
      for (int j = 0; j < 6; ++j) {
        int gj = dofmap.edge_dof[te[j]];
        if (gj < 0) continue;
        trip.emplace_back(gi, gj, K(i, j));
      }
    }
  }
  SpMat A(dofmap.n_state, dofmap.n_state);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  return A;
}

double energy_B(const TetMesh& mesh, const DofMap& dofmap,
                const Coefficients& coeffs, const EdgeField& v) {
  double s = 0.0;
  for (int t = 0; t < mesh.n_tets(); ++t) {
    auto K = local_matrix_B(mesh, dofmap, coeffs, t);
    auto c = local_coefficients(mesh, dofmap, v, t);
    // local_coefficients are pre-signed; undo the signs K already carries.
    Eigen::Matrix<double, 6, 1> cv;
    for (int e = 0; e < 6; ++e) cv[e] = c[e] * dofmap.sign[t][e];
    s += cv.dot(K * cv);
  }
  return s;
}

VecX assemble_state_rhs(const TetMesh& mesh, const DofMap& dofmap,
                        const Coefficients& coeffs, const BranchField& f,
                        const P0Field* u, const EdgeField* lifting,
                        const std::vector<int>& degree) {
  if (static_cast<int>(degree.size()) != mesh.n_tets())
    throw InputError("assemble_state_rhs: per-tet degree vector wrong size");
  VecX rhs = VecX::Zero(dofmap.n_state);
  for (int t = 0; t < mesh.n_tets(); ++t) {
    auto corners = mesh.tet_corners(t);
    auto wb = whitney_basis(corners);
    double scale = 6.0 * mesh.volume(t);
    const QuadRule& rule = tet_rule(degree[t]);
    const auto& te = mesh.edge_table.tet_edges[t];
    int label = mesh.subdomain[t];

    Eigen::Matrix<double, 6, 1> r = Eigen::Matrix<double, 6, 1>::Zero();
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const auto& l = rule.points[q];
      Vec3 x = bary_point(corners, l);
      Vec3 val = f(x, label);
      if (u) val += u->values[t];
      double w = scale * rule.weights[q];
      for (int e = 0; e < 6; ++e)
        r[e] += w * val.dot(whitney_value(wb, e, l));
    }
    for (int e = 0; e < 6; ++e) r[e] *= dofmap.sign[t][e];

    if (lifting) {
      auto K = local_matrix_B(mesh, dofmap, coeffs, t);
      Eigen::Matrix<double, 6, 1> lv;
      bool any = false;
      for (int e = 0; e < 6; ++e) {
        int bs = dofmap.edge_bslot[te[e]];
        lv[e] = bs >= 0 ? lifting->boundary_values[bs] : 0.0;
        any = any || bs >= 0;
      }
      if (any) r -= K * lv;
    }

    for (int e = 0; e < 6; ++e) {
      int gi = dofmap.edge_dof[te[e]];
      if (gi >= 0) rhs[gi] += r[e];
    }
  }
  return rhs;
}

VecX assemble_p0_load(const TetMesh& mesh, const DofMap& dofmap,
                      const P0Field& u) {
  VecX rhs = VecX::Zero(dofmap.n_state);
  for (int t = 0; t < mesh.n_tets(); ++t) {
    auto wb = whitney_basis(mesh.tet_corners(t));
    double vol = mesh.volume(t);
    const auto& te = mesh.edge_table.tet_edges[t];
    for (int e = 0; e < 6; ++e) {
      int gi = dofmap.edge_dof[te[e]];
      if (gi < 0) continue;
      int a = kTetEdges[e][0], b = kTetEdges[e][1];
      // int_T phi_e = |T| (grad lambda_b - grad lambda_a) / 4
      Vec3 mean = 0.25 * (wb.grad_lambda[b] - wb.grad_lambda[a]);
      rhs[gi] += dofmap.sign[t][e] * vol * u.values[t].dot(mean);
    }
  }
  return rhs;
}

VecX assemble_adjoint_rhs(const TetMesh& mesh, const DofMap& dofmap,
                          const EdgeField& y, const BranchField& y_d,
                          const std::vector<int>& degree) {
  if (static_cast<int>(degree.size()) != mesh.n_tets())
    throw InputError("assemble_adjoint_rhs: per-tet degree vector wrong size");
  VecX rhs = VecX::Zero(dofmap.n_state);
  for (int t = 0; t < mesh.n_tets(); ++t) {
    auto corners = mesh.tet_corners(t);
    auto wb = whitney_basis(corners);
    double vol = mesh.volume(t);
    double scale = 6.0 * vol;
    const QuadRule& rule = tet_rule(degree[t]);
    const auto& te = mesh.edge_table.tet_edges[t];
    int label = mesh.subdomain[t];

    auto c = local_coefficients(mesh, dofmap, y, t);
    Vec3 curl_y = Vec3::Zero();
    for (int e = 0; e < 6; ++e) curl_y += c[e] * wb.curl[e];

    // int_T (curl y - y_d) . curl phi_e with constant curl phi_e.
    Vec3 moment = vol * curl_y;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      Vec3 x = bary_point(corners, rule.points[q]);
      moment -= scale * rule.weights[q] * y_d(x, label);
    }
    for (int e = 0; e < 6; ++e) {
      int gi = dofmap.edge_dof[te[e]];
      if (gi >= 0) rhs[gi] += dofmap.sign[t][e] * moment.dot(wb.curl[e]);
    }
  }
  return rhs;
}

void write_matrix_market(const SpMat& A, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw InputError("write_matrix_market: cannot open '" + path + "'");
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << "\n";
  char buf[64];
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it) {
      std::snprintf(buf, sizeof(buf), "%d %d %.17g\n",
                    static_cast<int>(it.row()) + 1,
                    static_cast<int>(it.col()) + 1, it.value());
      os << buf;
    }
  if (!os) throw InputError("write_matrix_market: write failed");
}

} // namespace emoc
