#include "emoc/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "emoc/assembly.hpp"
#include "emoc/control.hpp"
#include "emoc/errors.hpp"
#include "emoc/estimator.hpp"
#include "emoc/marking.hpp"
#include "emoc/mesh.hpp"
#include "emoc/problems.hpp"
#include "emoc/quadrature.hpp"
#include "emoc/spaces.hpp"

namespace emoc {
namespace {

struct Failure {
  std::string message;
};

void require(bool condition, const std::string& message) {
  if (!condition)
    throw Failure{message};
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// --- suite 1: conformity and refinement bookkeeping -----------------------

void suite_mesh_conformity(std::mt19937& rng, std::string& detail) {
  const std::vector<TetMesh> bases = {build_cube_mesh(1), build_cube_mesh(2),
                                      build_lshape_mesh(1)};
  int cases = 0;
  for (int c = 0; c < 200; ++c) {
    TetMesh mesh = bases[static_cast<size_t>(c % 3)];
    const int rounds = 1 + static_cast<int>(rng() % 2u);
    for (int r = 0; r < rounds; ++r) {
      std::vector<int> marked;
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      for (int t = 0; t < mesh.n_tets(); ++t)
        if (coin(rng) < 0.2)
          marked.push_back(t);
      if (marked.empty())
        marked.push_back(static_cast<int>(rng() % static_cast<unsigned>(mesh.n_tets())));

      double vol_before = 0.0;
      for (int t = 0; t < mesh.n_tets(); ++t)
        vol_before += mesh.volume(t);

      // make_mesh inside refine validates conformity (no vertex sitting on
      // the midpoint of another element's edge) and positive orientation.
      RefineResult rr = refine_with_lineage(mesh, marked);
      for (int t : marked)
        require(rr.survived[static_cast<size_t>(t)] == 0,
                "marked tet survived refinement");
      require(rr.mesh.n_tets() > mesh.n_tets(), "refinement did not grow");

      double vol_after = 0.0;
      for (int t = 0; t < rr.mesh.n_tets(); ++t) {
        vol_after += rr.mesh.volume(t);
        const int p = rr.parent[static_cast<size_t>(t)];
        require(p >= 0 && p < mesh.n_tets(), "parent id out of range");
        require(rr.mesh.subdomain[static_cast<size_t>(t)] ==
                    mesh.subdomain[static_cast<size_t>(p)],
                "child label differs from parent");
      }
      require(std::abs(vol_after - vol_before) <= 1e-12 * vol_before,
              "volume not conserved: " + fmt(vol_before) + " -> " +
                  fmt(vol_after));
      mesh = std::move(rr.mesh);
    }
    ++cases;
  }
  detail = std::to_string(cases) + " random marking cases";
}

// --- suite 2: operator symmetry, definiteness, reproduction ---------------

void suite_assembly_spd(std::mt19937& rng, std::string& detail) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst_sym = 0.0, worst_rep = 0.0;
  for (const TetMesh& mesh :
       {build_cube_mesh(1), build_cube_mesh(2), build_lshape_mesh(1)}) {
    const DofMap dofmap = build_dofmap(mesh);
    const Coefficients coeffs = make_coefficients(mesh, {1.0}, {1.0});
    const SpMat B = assemble_B(mesh, dofmap, coeffs);

    SpMat Bt = SpMat(B.transpose());
    double scale = 0.0, asym = 0.0;
    for (int k = 0; k < B.outerSize(); ++k)
      for (SpMat::InnerIterator it(B, k); it; ++it)
        scale = std::max(scale, std::abs(it.value()));
    SpMat D = Bt - B;
    for (int k = 0; k < D.outerSize(); ++k)
      for (SpMat::InnerIterator it(D, k); it; ++it)
        asym = std::max(asym, std::abs(it.value()));
    require(asym <= 1e-12 * scale, "matrix not symmetric");
    worst_sym = std::max(worst_sym, scale > 0 ? asym / scale : 0.0);

    // Positive definiteness through the CG curvature guard.
    VecX b = VecX::Zero(dofmap.n_state);
    for (int i = 0; i < b.size(); ++i)
      b[i] = unit(rng);
    auto [x, rep] = pcg_solve(B, b, 1e-12);
    require(rep.converged, "CG failed on random right-hand side");

    // A global field a x X + b solves the problem with f = sigma (a x X + b)
    // and matching boundary data; the discrete solution must reproduce its
    // interpolant to solver accuracy.
    const Vec3 a(unit(rng), unit(rng), unit(rng));
    const Vec3 bb(unit(rng), unit(rng), unit(rng));
    auto field = [a, bb](const Vec3& X) { return Vec3(a.cross(X) + bb); };
    const EdgeField interp = edge_interpolate(field, mesh, dofmap);
    const EdgeField lifting = edge_interpolate_boundary(field, mesh, dofmap);
    BranchField f = [field](const Vec3& X, int) { return field(X); };
    const std::vector<int> deg(static_cast<size_t>(mesh.n_tets()), 2);
    VecX rhs = assemble_state_rhs(mesh, dofmap, coeffs, f, nullptr, &lifting, deg);
    auto [y, rep2] = pcg_solve(B, rhs, 1e-13);
    require(rep2.converged, "CG failed on reproduction problem");
    const double err = (y - interp.coeffs).norm() /
                       std::max(1.0, interp.coeffs.norm());
    require(err <= 1e-9, "linear field not reproduced: error " + fmt(err));
    worst_rep = std::max(worst_rep, err);
  }
  detail = "max asymmetry " + fmt(worst_sym) + ", max reproduction error " +
           fmt(worst_rep);
}

// --- suite 3: P0 projection properties ------------------------------------

void suite_projection(std::mt19937& rng, std::string& detail) {
  const TetMesh mesh = build_cube_mesh(2);
  const DofMap dofmap = build_dofmap(mesh);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    EdgeField v = zero_edge_field(dofmap);
    for (int i = 0; i < v.coeffs.size(); ++i)
      v.coeffs[i] = unit(rng);
    for (int i = 0; i < v.boundary_values.size(); ++i)
      v.boundary_values[i] = unit(rng);

    const P0Field pv = project_p0(mesh, dofmap, v);

    // Idempotence: projecting the projected field changes nothing.
    auto piecewise = [&](const Vec3& x) {
      const int t = find_containing_tet(mesh, x);
      require(t >= 0, "quadrature point outside mesh");
      return pv.values[static_cast<size_t>(t)];
    };
    const P0Field pv2 = project_p0(piecewise, mesh, 1);
    for (int t = 0; t < mesh.n_tets(); ++t) {
      const double d =
          (pv2.values[static_cast<size_t>(t)] - pv.values[static_cast<size_t>(t)])
              .norm();
      require(d <= 1e-12, "projection not idempotent");
      worst = std::max(worst, d);
    }

    // L2 contraction: ||P_h v|| <= ||v|| (exact degree-2 quadrature).
    double v_sq = 0.0;
    for (int t = 0; t < mesh.n_tets(); ++t) {
      const auto corners = mesh.tet_corners(t);
      const QuadRule& rule = tet_rule(2);
      double acc = 0.0;
      for (size_t q = 0; q < rule.weights.size(); ++q) {
        const Vec3 x = bary_point(corners, rule.points[q]);
        acc += rule.weights[q] *
               eval_edge_field(mesh, dofmap, v, t, x).squaredNorm();
      }
      v_sq += 6.0 * mesh.volume(t) * acc;
    }
    const double pn = p0_norm(mesh, pv);
    require(pn * pn <= v_sq * (1.0 + 1e-12) + 1e-14,
            "projection is not an L2 contraction");
  }
  detail = "20 random fields, idempotence within " + fmt(worst);
}

// --- suite 4: minimal bulk marking vs brute force -------------------------

void suite_marking(std::mt19937& rng, std::string& detail) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 12u);
    std::vector<double> eta(static_cast<size_t>(n));
    const bool all_zero = trial % 25 == 0;
    for (auto& e : eta)
      e = all_zero ? 0.0 : unit(rng);
    const double theta = 0.05 + 0.9 * unit(rng);

    const std::vector<int> marked = doerfler_mark(eta, theta);
    const double total = [&] {
      double s = 0.0;
      for (double e : eta)
        s += e;
      return s;
    }();

    if (total <= 0.0) {
      require(marked.empty(), "zero indicators must mark nothing");
      ++checked;
      continue;
    }
    require(!marked.empty(), "positive total must mark something");
    require(std::is_sorted(marked.begin(), marked.end()),
            "marked ids not ascending");
    double sum = 0.0;
    for (int t : marked)
      sum += eta[static_cast<size_t>(t)];
    require(sum >= theta * total - 1e-12 * total,
            "marked set misses the bulk threshold");
    const int argmax = static_cast<int>(
        std::max_element(eta.begin(), eta.end()) - eta.begin());
    require(std::find(marked.begin(), marked.end(), argmax) != marked.end(),
            "largest indicator not marked");

    // Brute force: smallest subset cardinality reaching the threshold.
    int best = n;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
      double s = 0.0;
      int bits = 0;
      for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) {
          s += eta[static_cast<size_t>(i)];
          ++bits;
        }
      if (s >= theta * total)
        best = std::min(best, bits);
    }
    require(static_cast<int>(marked.size()) == best,
            "marked set not of minimal cardinality: " +
                std::to_string(marked.size()) + " vs " + std::to_string(best));
    ++checked;
  }
  detail = std::to_string(checked) + " random vectors vs brute force";
}

// --- suite 5: projected-gradient convergence ------------------------------

void suite_pg(std::mt19937&, std::string& detail) {
  const ProblemSpec problem = benchmark_inclusion();
  const TetMesh mesh = build_problem_mesh(problem, 4);
  const LevelAssets assets = build_level_assets(mesh, problem, 1e-10);
  const KKTSolution kkt =
      projected_gradient(assets, initial_control(assets), 1e-8, 200);

  require(kkt.converged, "projected gradient did not converge");
  const double unorm = p0_norm(mesh, kkt.u);
  require(kkt.fixed_point_residual <= 1e-8 * (1.0 + unorm),
          "fixed-point residual above tolerance: " +
              fmt(kkt.fixed_point_residual));
  for (const auto& v : kkt.u.values)
    require(v.minCoeff() >= 0.0, "control violates the constraint u >= 0");
  for (size_t i = 1; i < kkt.objective_history.size(); ++i)
    require(kkt.objective_history[i] <=
                kkt.objective_history[i - 1] +
                    1e-12 * (1.0 + std::abs(kkt.objective_history[i - 1])),
            "objective increased along the iteration");
  detail = std::to_string(kkt.outer_iterations) + " outer iterations, residual " +
           fmt(kkt.fixed_point_residual);
}

// --- suite 6: gradient versus finite differences --------------------------

void suite_gradient_fd(std::mt19937& rng, std::string& detail) {
  const ProblemSpec problem = benchmark_inclusion();
  const TetMesh mesh = build_problem_mesh(problem, 2);
  const LevelAssets assets = build_level_assets(mesh, problem, 1e-12);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  P0Field u = zero_p0_field(mesh);
  for (auto& v : u.values)
    v = Vec3(unit(rng), unit(rng), unit(rng));

  // lambda = P_h p + alpha (u - u_hd) is the L2 gradient of the reduced
  // objective, which is quadratic in u: central differences are exact up
  // to roundoff.
  const EdgeField y = solve_state(assets, u);
  const EdgeField p = solve_adjoint(assets, y);
  const P0Field Pp = project_p0(mesh, assets.dofmap, p);
  P0Field grad = zero_p0_field(mesh);
  for (size_t t = 0; t < grad.values.size(); ++t)
    grad.values[t] = Pp.values[t] +
                     problem.alpha * (u.values[t] - assets.u_hd.values[t]);

  double worst = 0.0;
  const double eps = 1e-3;
  for (int dir = 0; dir < 5; ++dir) {
    P0Field delta = zero_p0_field(mesh);
    for (auto& v : delta.values)
      v = Vec3(unit(rng) - 0.5, unit(rng) - 0.5, unit(rng) - 0.5);
    P0Field up = u, um = u;
    for (size_t t = 0; t < u.values.size(); ++t) {
      up.values[t] += eps * delta.values[t];
      um.values[t] -= eps * delta.values[t];
    }
    const double Jp = objective(assets, up, solve_state(assets, up));
    const double Jm = objective(assets, um, solve_state(assets, um));
    const double fd = (Jp - Jm) / (2.0 * eps);
    const double an = p0_dot(mesh, grad, delta);
    const double rel = std::abs(fd - an) / std::max(1.0, std::abs(an));
    require(rel <= 1e-4, "gradient mismatch: fd " + fmt(fd) + " vs " + fmt(an));
    worst = std::max(worst, rel);
  }
  detail = "5 directions, max relative deviation " + fmt(worst);
}

// --- suite 7: manufactured zero-residual case -----------------------------

void suite_zero_estimator(std::mt19937&, std::string& detail) {
  const Vec3 a(0.3, -0.2, 0.5), b(0.1, 0.4, -0.3);
  auto field = [a, b](const Vec3& X) { return Vec3(a.cross(X) + b); };

  ProblemSpec p;
  p.name = "manufactured";
  p.build_mesh = [](int n) { return build_cube_mesh(n); };
  p.default_subdivisions = 2;
  p.mu_inv_by_label = {1.0};
  p.sigma_by_label = {1.0};
  p.classify = [](const Vec3&) { return 1; };
  p.f = [field](const Vec3& X, int) { return field(X); };
  p.div_f = [](const Vec3&, int) { return 0.0; };
  p.u_d = [](const Vec3&, int) { return Vec3(-1.0, -1.0, -1.0); };
  p.y_d = [a](const Vec3&, int) { return Vec3(2.0 * a); };
  p.curl_y_d = [](const Vec3&, int) { return Vec3::Zero().eval(); };
  p.alpha = 0.1;
  p.lifting_g = field;
  p.quad_degree = 4;
  p.quad_degree_singular = 5;

  const TetMesh mesh = build_problem_mesh(p, 2);
  const LevelAssets assets = build_level_assets(mesh, p, 1e-13);
  const KKTSolution kkt =
      projected_gradient(assets, initial_control(assets), 1e-10, 50);
  require(kkt.converged, "manufactured case did not converge");

  const IndicatorReport rep = assemble_indicator(assets, kkt);
  const double eta = std::sqrt(rep.total_eta_hat_sq);
  require(eta <= 1e-10,
          "estimator not zero at the exact solution: " + fmt(eta));
  detail = "eta_hat = " + fmt(eta);
}

// --- suite 8: quadrature exactness ----------------------------------------

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i)
    r *= i;
  return r;
}

void suite_quadrature(std::mt19937& rng, std::string& detail) {
  const std::array<Vec3, 4> tet = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0),
                                   Vec3(0, 0, 1)};
  const std::array<Vec3, 3> tri = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
  double worst = 0.0;
  for (int deg = 1; deg <= 5; ++deg) {
    const QuadRule& rt = tet_rule(deg);
    const QuadRule& rf = tri_rule(deg);
    for (int trial = 0; trial < 40; ++trial) {
      int e0 = static_cast<int>(rng() % static_cast<unsigned>(deg + 1));
      int e1 = static_cast<int>(rng() % static_cast<unsigned>(deg + 1 - e0));
      int e2 = deg - e0 - e1 > 0
                   ? static_cast<int>(rng() % static_cast<unsigned>(deg + 1 - e0 - e1))
                   : 0;

      double qs = 0.0;
      for (size_t q = 0; q < rt.weights.size(); ++q) {
        const Vec3 x = bary_point(tet, rt.points[q]);
        qs += rt.weights[q] * std::pow(x[0], e0) * std::pow(x[1], e1) *
              std::pow(x[2], e2);
      }
      const double exact_tet = factorial(e0) * factorial(e1) * factorial(e2) /
                               factorial(e0 + e1 + e2 + 3);
      worst = std::max(worst, std::abs(qs - exact_tet) /
                                  std::max(1e-30, std::abs(exact_tet)));
      require(std::abs(qs - exact_tet) <= 1e-13 * std::max(1.0, std::abs(exact_tet)),
              "tet rule degree " + std::to_string(deg) + " misses x^" +
                  std::to_string(e0) + " y^" + std::to_string(e1) + " z^" +
                  std::to_string(e2));

      double qf = 0.0;
      for (size_t q = 0; q < rf.weights.size(); ++q) {
        const Vec3 x = bary_point(tri, rf.points[q]);
        qf += rf.weights[q] * std::pow(x[0], e0) * std::pow(x[1], e1);
      }
      const double exact_tri =
          factorial(e0) * factorial(e1) / factorial(e0 + e1 + 2);
      require(std::abs(qf - exact_tri) <= 1e-13 * std::max(1.0, std::abs(exact_tri)),
              "triangle rule degree " + std::to_string(deg) + " misses x^" +
                  std::to_string(e0) + " y^" + std::to_string(e1));
    }
  }
  detail = "degrees 1..5, max relative defect " + fmt(worst);
}

CheckResult run_one(const std::string& name, unsigned seed,
                    const std::function<void(std::mt19937&, std::string&)>& fn) {
  CheckResult result;
  result.name = name;
  std::mt19937 rng(seed);
  try {
    fn(rng, result.detail);
    result.passed = true;
  } catch (const Failure& f) {
    result.passed = false;
    result.detail = f.message;
  } catch (const std::exception& e) {
    result.passed = false;
    result.detail = std::string("exception: ") + e.what();
  }
  return result;
}

} // namespace

std::vector<CheckResult> run_selfchecks(unsigned seed) {
  std::vector<CheckResult> results;
  results.push_back(run_one("mesh-conformity", seed + 1, suite_mesh_conformity));
  results.push_back(run_one("assembly-spd", seed + 2, suite_assembly_spd));
  results.push_back(run_one("p0-projection", seed + 3, suite_projection));
  results.push_back(run_one("bulk-marking", seed + 4, suite_marking));
  results.push_back(run_one("projected-gradient", seed + 5, suite_pg));
  results.push_back(run_one("gradient-fd", seed + 6, suite_gradient_fd));
  results.push_back(run_one("zero-estimator", seed + 7, suite_zero_estimator));
  results.push_back(run_one("quadrature", seed + 8, suite_quadrature));
  return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.passed)
      return false;
  return true;
}

} // namespace emoc
