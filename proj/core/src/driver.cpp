#include "emoc/driver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <utility>

#include "emoc/errors.hpp"
#include "emoc/marking.hpp"
#include "emoc/quadrature.hpp"

namespace emoc {
namespace {

template <class G>
double tet_integral(const TetMesh& mesh, int t, int degree, const G& g) {
  const auto corners = mesh.tet_corners(t);
  const QuadRule& rule = tet_rule(degree);
  double acc = 0.0;
  for (size_t q = 0; q < rule.weights.size(); ++q)
    acc += rule.weights[q] * g(bary_point(corners, rule.points[q]));
  return 6.0 * mesh.volume(t) * acc;
}

// Squared H(curl) distance of an edge field to a smooth field.
double hcurl_error_sq(const LevelAssets& assets, const EdgeField& field,
                      const std::function<Vec3(const Vec3&)>& exact,
                      const std::function<Vec3(const Vec3&)>& exact_curl) {
  const TetMesh& mesh = *assets.mesh;
  double acc = 0.0;
  for (int t = 0; t < mesh.n_tets(); ++t) {
    const Vec3 ch = eval_curl(mesh, assets.dofmap, field, t);
    acc += tet_integral(mesh, t, assets.qdeg[static_cast<size_t>(t)],
                        [&](const Vec3& x) {
                          const Vec3 dv =
                              exact(x) -
                              eval_edge_field(mesh, assets.dofmap, field, t, x);
                          const Vec3 dc = exact_curl(x) - ch;
                          return dv.squaredNorm() + dc.squaredNorm();
                        });
  }
  return acc;
}

bool near_interface(const TetMesh& mesh, int t, const BallInterface& ball,
                    double band) {
  const auto c = mesh.tet_corners(t);
  double dmin = (mesh.centroid(t) - ball.center).norm();
  for (const auto& v : c)
    dmin = std::min(dmin, (v - ball.center).norm());
  return dmin <= ball.radius + band;
}

std::vector<ConvergenceRecord> run_loop(const ProblemSpec& problem,
                                        const AdaptiveConfig& config,
                                        bool uniform,
                                        const LevelCallback& callback) {
  if (!(config.theta > 0.0) || !(config.theta < 1.0))
    throw InputError("run: theta must lie in (0, 1)");
  if (config.max_iterations < 0 || config.max_dofs <= 0)
    throw InputError("run: iteration and DoF limits must be positive");
  if (config.marking != "doerfler" && config.marking != "maximum")
    throw InputError("run: unknown marking strategy '" + config.marking +
                     "' (valid: doerfler, maximum)");

  TetMesh mesh = build_problem_mesh(problem, config.subdivisions);
  std::vector<ConvergenceRecord> records;
  P0Field u_start;
  bool have_start = false;

  for (int iter = 0;; ++iter) {
    const auto t0 = std::chrono::steady_clock::now();
    LevelAssets assets = build_level_assets(mesh, problem, config.cg_tol);
    const P0Field u0 = have_start ? u_start : initial_control(assets);
    KKTSolution kkt =
        projected_gradient(assets, u0, config.pg_tol, config.pg_max_outer);
    IndicatorReport indicator = assemble_indicator(assets, kkt);

    ConvergenceRecord rec;
    rec.iter = iter;
    rec.dofs_state = assets.dofmap.n_state;
    rec.dofs_control = 3L * mesh.n_tets();
    rec.eta_hat = std::sqrt(indicator.total_eta_hat_sq);
    rec.eta_hat_max =
        indicator.argmax_tet >= 0
            ? std::sqrt(indicator.eta_hat_sq[static_cast<size_t>(indicator.argmax_tet)])
            : 0.0;
    if (problem.has_exact) {
      const ExactErrors errs = exact_errors(assets, kkt);
      rec.err_y = errs.err_y;
      rec.err_p = errs.err_p;
      rec.err_u = errs.err_u;
      rec.err_total = errs.err_y + errs.err_p + errs.err_u;
      rec.effectivity =
          rec.err_total > 0.0 ? rec.eta_hat / rec.err_total
                              : std::numeric_limits<double>::quiet_NaN();
    } else {
      rec.err_y = rec.err_p = rec.err_u = rec.err_total = rec.effectivity =
          std::numeric_limits<double>::quiet_NaN();
    }
    rec.objective = kkt.objective;
    rec.pg_iters = kkt.outer_iterations;
    rec.n_tets = mesh.n_tets();
    rec.shape_ratio = shape_ratio_max(mesh);

    std::vector<int> marked;
    if (uniform) {
      marked.resize(static_cast<size_t>(mesh.n_tets()));
      for (int t = 0; t < mesh.n_tets(); ++t)
        marked[static_cast<size_t>(t)] = t;
    } else if (config.marking == "maximum") {
      marked = maximum_mark(indicator.eta_hat_sq, config.gamma);
    } else {
      marked = doerfler_mark(indicator.eta_hat_sq, config.theta);
    }
    rec.marked_count = static_cast<int>(marked.size());
    if (problem.interface_ball && !uniform && !marked.empty()) {
      int near = 0;
      for (int t : marked)
        if (near_interface(mesh, t, *problem.interface_ball, 0.15))
          ++near;
      rec.marked_near_interface_fraction =
          static_cast<double>(near) / static_cast<double>(marked.size());
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                      .count();

    records.push_back(rec);
    if (callback)
      callback(rec, mesh, assets, kkt, indicator);

    if (iter >= config.max_iterations)
      break;
    if (config.eta_tol > 0.0 && rec.eta_hat <= config.eta_tol)
      break;
    if (marked.empty())
      break;

    RefineResult rr = uniform ? bisect_sweeps(mesh, 3)
                              : refine_with_lineage(mesh, marked);
    // Inject the control into the refined partition (nested P0 spaces).
    u_start.values.resize(static_cast<size_t>(rr.mesh.n_tets()));
    for (int t = 0; t < rr.mesh.n_tets(); ++t)
      u_start.values[static_cast<size_t>(t)] =
          kkt.u.values[static_cast<size_t>(rr.parent[static_cast<size_t>(t)])];
    have_start = true;

    if (problem.classify)
      rr.mesh = relabel(rr.mesh, problem.classify);
    const DofMap next_dofs = build_dofmap(rr.mesh);
    if (next_dofs.n_state > config.max_dofs)
      break;
    mesh = std::move(rr.mesh);
  }
  return records;
}

} // namespace

ExactErrors exact_errors(const LevelAssets& assets, const KKTSolution& kkt) {
  const ProblemSpec& problem = *assets.problem;
  const TetMesh& mesh = *assets.mesh;
  if (!problem.has_exact)
    throw UnsupportedError("exact_errors: problem '" + problem.name +
                           "' has no exact solution");

  ExactErrors errs;
  errs.err_y = std::sqrt(
      hcurl_error_sq(assets, kkt.y, problem.y_star, problem.curl_y_star));
  errs.err_p = std::sqrt(
      hcurl_error_sq(assets, kkt.p, problem.p_star, problem.curl_p_star));

  double u_sq = 0.0;
  if (problem.interface_ball) {
    // u* is constant on each side of the sphere: integrate cut elements by
    // the octasection volume fraction.
    const BallInterface& ball = *problem.interface_ball;
    for (int t = 0; t < mesh.n_tets(); ++t) {
      const auto corners = mesh.tet_corners(t);
      const double frac = ball_volume_fraction(ball, corners);
      const Vec3 c = mesh.centroid(t);
      const Vec3 uh = kkt.u.values[static_cast<size_t>(t)];
      const double vol = mesh.volume(t);
      u_sq += vol * (frac * (problem.u_star(c, 2) - uh).squaredNorm() +
                     (1.0 - frac) * (problem.u_star(c, 1) - uh).squaredNorm());
    }
  } else {
    auto classify = problem.classify;
    for (int t = 0; t < mesh.n_tets(); ++t) {
      const Vec3 uh = kkt.u.values[static_cast<size_t>(t)];
      u_sq += tet_integral(mesh, t, assets.qdeg[static_cast<size_t>(t)],
                           [&](const Vec3& x) {
                             return (problem.u_star(x, classify ? classify(x) : 1) -
                                     uh)
                                 .squaredNorm();
                           });
    }
  }
  errs.err_u = std::sqrt(u_sq);
  return errs;
}

std::vector<ConvergenceRecord> run_adaptive(const ProblemSpec& problem,
                                            const AdaptiveConfig& config,
                                            const LevelCallback& callback) {
  return run_loop(problem, config, config.uniform, callback);
}

std::vector<ConvergenceRecord> run_uniform(const ProblemSpec& problem,
                                           const AdaptiveConfig& config,
                                           const LevelCallback& callback) {
  return run_loop(problem, config, true, callback);
}

double fit_slope(const std::vector<ConvergenceRecord>& records,
                 const std::function<double(const ConvergenceRecord&)>& value,
                 int window) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : records) {
    const double v = value(r);
    if (r.dofs_state > 0 && v > 0.0 && std::isfinite(v))
      pts.emplace_back(std::log10(static_cast<double>(r.dofs_state)),
                       std::log10(v));
  }
  if (window > 0 && static_cast<int>(pts.size()) > window)
    pts.erase(pts.begin(), pts.end() - window);
  if (pts.size() < 2)
    return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx <= 0.0)
    return std::numeric_limits<double>::quiet_NaN();
  return sxy / sxx;
}

void write_csv(const std::vector<ConvergenceRecord>& records,
               std::ostream& os) {
  os << "iter,dofs_state,dofs_control,eta_hat,eta_hat_max,err_y,err_p,err_u,"
        "err_total,effectivity,J,pg_iters,seconds\n";
  char buf[512];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf,
                  "%d,%ld,%ld,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,"
                  "%d,%.12g\n",
                  r.iter, r.dofs_state, r.dofs_control, r.eta_hat,
                  r.eta_hat_max, r.err_y, r.err_p, r.err_u, r.err_total,
                  r.effectivity, r.objective, r.pg_iters, r.seconds);
    os << buf;
  }
}

void write_csv(const std::vector<ConvergenceRecord>& records,
               const std::string& path) {
  std::ofstream os(path);
  if (!os)
    throw InputError("write_csv: cannot open '" + path + "'");
  write_csv(records, os);
}

} // namespace emoc
