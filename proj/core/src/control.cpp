#include "emoc/control.hpp"

#include <cmath>
#include <utility>

#include "emoc/errors.hpp"
#include "emoc/quadrature.hpp"

namespace emoc {
namespace {

VecX solve_interior(const LevelAssets& assets, const VecX& rhs,
                    SolveReport* report, const VecX* x0) {
  auto [x, rep] = pcg_solve(assets.B, rhs, assets.cg_tol, assets.cg_max_iter, x0);
  if (!rep.converged)
    throw SolverError("conjugate gradients stalled at relative residual " +
                      std::to_string(rep.rel_residual));
  if (report)
    *report = rep;
  return std::move(x);
}

EdgeField with_boundary(const LevelAssets& assets, VecX coeffs,
                        bool carries_lifting) {
  EdgeField field = zero_edge_field(assets.dofmap);
  field.coeffs = std::move(coeffs);
  if (carries_lifting)
    field.boundary_values = assets.lifting.boundary_values;
  return field;
}

// int_T g dx by quadrature of the given degree.
template <class G>
Vec3 integrate_tet(const TetMesh& mesh, int t, int degree, const G& g) {
  const auto corners = mesh.tet_corners(t);
  const QuadRule& rule = tet_rule(degree);
  Vec3 acc = Vec3::Zero();
  for (size_t q = 0; q < rule.weights.size(); ++q)
    acc += rule.weights[q] * g(bary_point(corners, rule.points[q]));
  return 6.0 * mesh.volume(t) * acc;
}

template <class G>
double integrate_tet_scalar(const TetMesh& mesh, int t, int degree, const G& g) {
  const auto corners = mesh.tet_corners(t);
  const QuadRule& rule = tet_rule(degree);
  double acc = 0.0;
  for (size_t q = 0; q < rule.weights.size(); ++q)
    acc += rule.weights[q] * g(bary_point(corners, rule.points[q]));
  return 6.0 * mesh.volume(t) * acc;
}

P0Field p0_combine(const P0Field& a, double ca, const P0Field& b, double cb) {
  P0Field r;
  r.values.resize(a.values.size());
  for (size_t i = 0; i < a.values.size(); ++i)
    r.values[i] = ca * a.values[i] + cb * b.values[i];
  return r;
}

} // namespace

LevelAssets build_level_assets(const TetMesh& mesh, const ProblemSpec& problem,
                               double cg_tol) {
  LevelAssets assets;
  assets.mesh = &mesh;
  assets.problem = &problem;
  assets.dofmap = build_dofmap(mesh);
  assets.coeffs =
      make_coefficients(mesh, problem.mu_inv_by_label, problem.sigma_by_label);
  assets.qdeg = quad_degrees(problem, mesh);
  assets.B = assemble_B(mesh, assets.dofmap, assets.coeffs);
  assets.cg_tol = cg_tol;

  if (problem.lifting_g)
    assets.lifting =
        edge_interpolate_boundary(problem.lifting_g, mesh, assets.dofmap);
  else
    assets.lifting = zero_edge_field(assets.dofmap);

  auto classify = problem.classify;
  auto f = problem.f;
  BranchField f_geometric = [classify, f](const Vec3& x, int) {
    return f(x, classify ? classify(x) : 1);
  };
  assets.rhs_f = assemble_state_rhs(mesh, assets.dofmap, assets.coeffs,
                                    f_geometric, nullptr,
                                    problem.lifting_g ? &assets.lifting : nullptr,
                                    assets.qdeg);
  assets.u_hd =
      project_p0(bind_geometric(problem, problem.u_d), mesh, assets.qdeg);
  assets.osc_ud_sq_tet.assign(static_cast<size_t>(mesh.n_tets()), 0.0);
  std::vector<char> cut(static_cast<size_t>(mesh.n_tets()), 0);
  if (problem.interface_ball) {
    // On elements cut by the sphere the quadrature projection samples the
    // indicator poorly; replace it by the volume-fraction average and keep
    // the fraction for the constant cost term below.
    for (int t = 0; t < mesh.n_tets(); ++t) {
      const auto corners = mesh.tet_corners(t);
      const double frac = ball_volume_fraction(*problem.interface_ball, corners);
      if (frac > 0.0 && frac < 1.0) {
        cut[static_cast<size_t>(t)] = 1;
        const Vec3 c = mesh.centroid(t);
        const Vec3 u_in = problem.u_d(c, 2), u_out = problem.u_d(c, 1);
        const Vec3 mean = frac * u_in + (1.0 - frac) * u_out;
        assets.u_hd.values[static_cast<size_t>(t)] = mean;
        // ||u_d - mean||^2 on this tet, exact for per-side constants.
        assets.osc_ud_sq_tet[static_cast<size_t>(t)] =
            mesh.volume(t) * (frac * (u_in - mean).squaredNorm() +
                              (1.0 - frac) * (u_out - mean).squaredNorm());
      }
    }
  }
  auto u_d_geo = bind_geometric(problem, problem.u_d);
  for (int t = 0; t < mesh.n_tets(); ++t) {
    if (cut[static_cast<size_t>(t)])
      continue;
    const Vec3 mean = assets.u_hd.values[static_cast<size_t>(t)];
    assets.osc_ud_sq_tet[static_cast<size_t>(t)] = integrate_tet_scalar(
        mesh, t, assets.qdeg[static_cast<size_t>(t)],
        [&](const Vec3& x) { return (u_d_geo(x) - mean).squaredNorm(); });
  }
  for (double v : assets.osc_ud_sq_tet)
    assets.ud_osc_sq += v;
  return assets;
}

EdgeField solve_state(const LevelAssets& assets, const P0Field& u,
                      SolveReport* report, const VecX* x0) {
  VecX rhs = assets.rhs_f +
             assemble_p0_load(*assets.mesh, assets.dofmap, u);
  return with_boundary(assets, solve_interior(assets, rhs, report, x0), true);
}

EdgeField solve_response(const LevelAssets& assets, const P0Field& d,
                         SolveReport* report, const VecX* x0) {
  VecX rhs = assemble_p0_load(*assets.mesh, assets.dofmap, d);
  return with_boundary(assets, solve_interior(assets, rhs, report, x0), false);
}

EdgeField solve_adjoint(const LevelAssets& assets, const EdgeField& y,
                        SolveReport* report, const VecX* x0) {
  auto y_d = bind_geometric(*assets.problem, assets.problem->y_d);
  BranchField y_d_wrapped = [y_d](const Vec3& x, int) { return y_d(x); };
  VecX rhs = assemble_adjoint_rhs(*assets.mesh, assets.dofmap, y, y_d_wrapped,
                                  assets.qdeg);
  return with_boundary(assets, solve_interior(assets, rhs, report, x0), false);
}

double objective(const LevelAssets& assets, const P0Field& u,
                 const EdgeField& y) {
  const TetMesh& mesh = *assets.mesh;
  const ProblemSpec& problem = *assets.problem;
  auto y_d = bind_geometric(problem, problem.y_d);
  double track = 0.0;
  for (int t = 0; t < mesh.n_tets(); ++t) {
    const Vec3 cy = eval_curl(mesh, assets.dofmap, y, t);
    track += integrate_tet_scalar(mesh, t, assets.qdeg[static_cast<size_t>(t)],
                                  [&](const Vec3& x) {
                                    return (cy - y_d(x)).squaredNorm();
                                  });
  }
  // ||u - u_d||^2 splits orthogonally into the P0 distance to P_h u_d plus
  // the data oscillation; evaluating it this way keeps the objective
  // consistent with the gradient P_h p + alpha (u - P_h u_d).
  double cost = assets.ud_osc_sq;
  for (int t = 0; t < mesh.n_tets(); ++t)
    cost += mesh.volume(t) *
            (u.values[static_cast<size_t>(t)] -
             assets.u_hd.values[static_cast<size_t>(t)])
                .squaredNorm();
  return 0.5 * track + 0.5 * problem.alpha * cost;
}

P0Field initial_control(const LevelAssets& assets) {
  return project_admissible(assets.u_hd);
}

KKTSolution projected_gradient(const LevelAssets& assets, const P0Field& u0,
                               double tol, int max_outer) {
  const TetMesh& mesh = *assets.mesh;
  const double alpha = assets.problem->alpha;
  auto y_d = bind_geometric(*assets.problem, assets.problem->y_d);

  KKTSolution sol;
  sol.u = project_admissible(u0);

  SolveReport rep;
  sol.y = solve_state(assets, sol.u, &rep);
  sol.total_cg_iterations += rep.iterations;
  double J = objective(assets, sol.u, sol.y);
  sol.objective_history.push_back(J);

  P0Field Pp;
  EdgeField ytil;
  bool have_ytil = false;

  for (int n = 0;; ++n) {
    sol.p = solve_adjoint(assets, sol.y, &rep,
                          n > 0 ? &sol.p.coeffs : nullptr);
    sol.total_cg_iterations += rep.iterations;
    Pp = project_p0(mesh, assets.dofmap, sol.p);

    // Fixed-point residual of u = max{0, -P_h p / alpha + u_hd}.
    P0Field candidate =
        project_admissible(p0_combine(Pp, -1.0 / alpha, assets.u_hd, 1.0));
    P0Field diff = p0_combine(sol.u, 1.0, candidate, -1.0);
    sol.fixed_point_residual = p0_norm(mesh, diff);
    if (sol.fixed_point_residual <= tol * (1.0 + p0_norm(mesh, sol.u))) {
      sol.converged = true;
      break;
    }
    if (n >= max_outer)
      break;

    // Negative gradient direction d = -(P_h p + alpha (u - u_hd)).
    P0Field d = p0_combine(Pp, -1.0,
                           p0_combine(sol.u, 1.0, assets.u_hd, -1.0), -alpha);
    ytil = solve_response(assets, d, &rep, have_ytil ? &ytil.coeffs : nullptr);
    have_ytil = true;
    sol.total_cg_iterations += rep.iterations;

    // Exact step along d for the unconstrained quadratic model.
    double cross = 0.0, curl_sq = 0.0;
    for (int t = 0; t < mesh.n_tets(); ++t) {
      const Vec3 ct = eval_curl(mesh, assets.dofmap, ytil, t);
      const Vec3 cy = eval_curl(mesh, assets.dofmap, sol.y, t);
      const Vec3 m = integrate_tet(mesh, t, assets.qdeg[static_cast<size_t>(t)],
                                   y_d);
      cross += (m - mesh.volume(t) * cy).dot(ct);
      curl_sq += mesh.volume(t) * ct.squaredNorm();
    }
    const double num =
        alpha * p0_dot(mesh, p0_combine(assets.u_hd, 1.0, sol.u, -1.0), d) +
        cross;
    const double den = curl_sq + alpha * p0_dot(mesh, d, d);
    if (!(den > 0.0) || !std::isfinite(num) || num <= 0.0)
      break; // stagnation: direction carries no descent
    double s = num / den;

    // Projected update with halving safeguard against increase of J
    // caused by the projection bending the path.
    bool accepted = false;
    P0Field u_new;
    EdgeField y_new;
    double J_new = J;
    for (int bt = 0; bt < 40; ++bt) {
      u_new = project_admissible(p0_combine(sol.u, 1.0, d, s));
      // The state map is affine in u, so y + s ytil predicts the new state
      // exactly up to the projection clip: a near-perfect CG start.
      VecX x0 = sol.y.coeffs + s * ytil.coeffs;
      y_new = solve_state(assets, u_new, &rep, &x0);
      sol.total_cg_iterations += rep.iterations;
      J_new = objective(assets, u_new, y_new);
      if (J_new <= J + 1e-12 * (1.0 + std::abs(J))) {
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (!accepted)
      break; // no admissible decrease; report the last iterate

    sol.u = std::move(u_new);
    sol.y = std::move(y_new);
    J = J_new;
    sol.objective_history.push_back(J);
    sol.outer_iterations = n + 1;
  }

  sol.lambda = p0_combine(Pp, 1.0,
                          p0_combine(sol.u, 1.0, assets.u_hd, -1.0), alpha);
  sol.objective = J;
  return sol;
}

} // namespace emoc
