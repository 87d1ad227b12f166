// Command-line front end: adaptive/uniform convergence runs with CSV and
// VTK output, a mesh refinement demo, and the built-in invariant suite.

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <fcntl.h>
#include <unistd.h>

#include <CLI11.hpp>

#include "emoc/config.hpp"
#include "emoc/control.hpp"
#include "emoc/driver.hpp"
#include "emoc/errors.hpp"
#include "emoc/estimator.hpp"
#include "emoc/mesh_io.hpp"
#include "emoc/selfcheck.hpp"

namespace {

// One run at a time per output directory.
class Lockfile {
public:
  explicit Lockfile(const std::string& dir) : path_(dir + "/.emoc.lock") {
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
      if (errno == EEXIST)
        throw emoc::InputError("output directory '" + dir +
                               "' is locked by another run (remove " + path_ +
                               " if that run is gone)");
      throw emoc::InputError("cannot create lockfile '" + path_ +
                             "': " + std::strerror(errno));
    }
    const std::string pid = std::to_string(::getpid()) + "\n";
    (void)!::write(fd, pid.c_str(), pid.size());
    ::close(fd);
  }
  ~Lockfile() { ::unlink(path_.c_str()); }
  Lockfile(const Lockfile&) = delete;
  Lockfile& operator=(const Lockfile&) = delete;

private:
  std::string path_;
};

std::string vtk_name(const std::string& dir, int iter) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "iter_%03d.vtk", iter);
  return dir + "/" + buf;
}

void print_slopes(const std::vector<emoc::ConvergenceRecord>& records) {
  using Rec = emoc::ConvergenceRecord;
  const std::vector<std::pair<std::string, std::function<double(const Rec&)>>>
      fields = {
          {"eta_hat", [](const Rec& r) { return r.eta_hat; }},
          {"err_total", [](const Rec& r) { return r.err_total; }},
          {"err_y", [](const Rec& r) { return r.err_y; }},
          {"err_p", [](const Rec& r) { return r.err_p; }},
          {"err_u", [](const Rec& r) { return r.err_u; }},
      };
  for (const auto& [name, fn] : fields) {
    const double s = emoc::fit_slope(records, fn);
    if (s == s)
      std::printf("slope(%s) vs dofs: %+.3f\n", name.c_str(), s);
  }
}

int cmd_run(const emoc::RunConfig& config) {
  std::string out_dir = config.output_dir;
  if (const char* env = std::getenv("EMOC_OUTPUT_DIR"); env && *env)
    out_dir = env;
  std::filesystem::create_directories(out_dir);
  Lockfile lock(out_dir);

  const emoc::ProblemSpec problem = emoc::resolve_problem(config);
  const emoc::AdaptiveConfig acfg = emoc::to_adaptive_config(config);

  std::printf("problem %s, mode %s, theta %.3g, alpha %.3g, max_dofs %ld\n",
              problem.name.c_str(), config.mode.c_str(), acfg.theta,
              problem.alpha, acfg.max_dofs);

  auto callback = [&](const emoc::ConvergenceRecord& rec,
                      const emoc::TetMesh& mesh, const emoc::LevelAssets&,
                      const emoc::KKTSolution& kkt,
                      const emoc::IndicatorReport& indicator) {
    emoc::VtkCellData data;
    std::vector<double> eta(indicator.eta_hat_sq.size());
    for (size_t t = 0; t < eta.size(); ++t)
      eta[t] = std::sqrt(indicator.eta_hat_sq[t]);
    data.scalars.emplace_back("eta_hat", std::move(eta));
    data.vectors.emplace_back("control", kkt.u.values);
    emoc::write_vtk(mesh, vtk_name(out_dir, rec.iter), data);
    std::printf("iter %3d  tets %7ld  dofs %7ld  eta %.4e  err %.4e  J %.6e  "
                "pg %3d  cg %6ld  %.2fs\n",
                rec.iter, rec.n_tets, rec.dofs_state, rec.eta_hat,
                rec.err_total, rec.objective, rec.pg_iters,
                kkt.total_cg_iterations, rec.seconds);
    std::fflush(stdout);
  };

  const std::vector<emoc::ConvergenceRecord> records =
      acfg.uniform ? emoc::run_uniform(problem, acfg, callback)
                   : emoc::run_adaptive(problem, acfg, callback);

  const std::string csv = out_dir + "/convergence.csv";
  emoc::write_csv(records, csv);
  std::printf("%zu levels -> %s\n", records.size(), csv.c_str());
  print_slopes(records);
  return 0;
}

int cmd_refine_demo(const std::string& problem_name, int iters,
                    const std::string& out_dir_opt) {
  std::string out_dir = out_dir_opt;
  if (const char* env = std::getenv("EMOC_OUTPUT_DIR"); env && *env)
    out_dir = env;
  std::filesystem::create_directories(out_dir);
  Lockfile lock(out_dir);

  emoc::RunConfig rc;
  rc.problem = problem_name;
  const emoc::ProblemSpec problem = emoc::resolve_problem(rc);
  emoc::TetMesh mesh = emoc::build_problem_mesh(problem, 0);

  // Refine toward a geometric feature: the interface sphere when present,
  // else the reentrant axis / origin.
  const emoc::Vec3 target = problem.interface_ball
                                ? problem.interface_ball->center +
                                      problem.interface_ball->radius *
                                          emoc::Vec3(1, 0, 0)
                                : emoc::Vec3(0, 0, 0);

  std::printf("refine-demo: %s, %d rounds toward (%g, %g, %g)\n",
              problem.name.c_str(), iters, target[0], target[1], target[2]);
  for (int k = 0; k <= iters; ++k) {
    emoc::write_vtk(mesh, vtk_name(out_dir, k));
    std::printf("iter %2d: %7d tets, %6d vertices, shape ratio %.3f\n", k,
                mesh.n_tets(), mesh.n_vertices(), emoc::shape_ratio_max(mesh));
    if (k == iters)
      break;
    std::vector<int> order(static_cast<size_t>(mesh.n_tets()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return (mesh.centroid(a) - target).norm() <
             (mesh.centroid(b) - target).norm();
    });
    const size_t n_mark = std::max<size_t>(1, order.size() / 10);
    std::vector<int> marked(order.begin(),
                            order.begin() + static_cast<long>(n_mark));
    std::sort(marked.begin(), marked.end());
    mesh = emoc::refine(mesh, marked);
  }
  return 0;
}

int cmd_check(unsigned seed) {
  const std::vector<emoc::CheckResult> results = emoc::run_selfchecks(seed);
  for (const auto& r : results)
    std::printf("[%s] %-18s %s\n", r.passed ? " ok " : "FAIL", r.name.c_str(),
                r.detail.c_str());
  if (!emoc::all_passed(results)) {
    std::fprintf(stderr, "check: FAILURES detected\n");
    return 1;
  }
  std::printf("check: all %zu suites passed\n", results.size());
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive edge-element solver for constrained H(curl) "
               "optimal control"};
  app.require_subcommand(1);

  // --- run ---------------------------------------------------------------
  auto* run = app.add_subcommand("run", "Run a convergence study");
  std::string config_path;
  emoc::RunConfig cli; // CLI values; merged over the config file
  run->add_option("--config", config_path, "key = value configuration file");
  auto* o_problem =
      run->add_option("--problem,-p", cli.problem, "lshape | inclusion");
  auto* o_mode = run->add_option("--mode,-m", cli.mode, "adaptive | uniform");
  auto* o_theta = run->add_option("--theta", cli.theta, "bulk parameter");
  auto* o_alpha = run->add_option("--alpha", cli.alpha, "cost weight");
  auto* o_marking =
      run->add_option("--marking", cli.marking, "doerfler | maximum");
  auto* o_gamma = run->add_option("--gamma", cli.gamma, "maximum threshold");
  auto* o_iters = run->add_option("--max-iters", cli.max_iters,
                                  "refinement iterations");
  auto* o_dofs = run->add_option("--max-dofs", cli.max_dofs, "state DoF cap");
  auto* o_eta = run->add_option("--eta-tol", cli.eta_tol,
                                "estimator stopping tolerance");
  auto* o_cg = run->add_option("--cg-tol", cli.cg_tol, "CG tolerance");
  auto* o_pg = run->add_option("--pg-tol", cli.pg_tol,
                               "projected-gradient tolerance");
  auto* o_pgmax = run->add_option("--pg-max-outer", cli.pg_max_outer,
                                  "projected-gradient iteration cap");
  auto* o_sub = run->add_option("--subdivisions", cli.subdivisions,
                                "initial mesh subdivisions (0: default)");
  auto* o_qd =
      run->add_option("--quad-degree", cli.quad_degree, "volume quadrature");
  auto* o_qds = run->add_option("--quad-degree-singular",
                                cli.quad_degree_singular,
                                "quadrature near singularities");
  auto* o_out = run->add_option("--out,-o", cli.output_dir,
                                "output directory (env EMOC_OUTPUT_DIR "
                                "overrides)");
  auto* o_seed = run->add_option("--seed", cli.seed, "recorded random seed");

  // --- refine-demo -------------------------------------------------------
  auto* demo = app.add_subcommand("refine-demo",
                                  "Bisection showcase without solves");
  std::string demo_problem = "lshape";
  int demo_iters = 5;
  std::string demo_out = "out-demo";
  demo->add_option("--problem,-p", demo_problem, "lshape | inclusion");
  demo->add_option("--iters", demo_iters, "refinement rounds")
      ->check(CLI::NonNegativeNumber);
  demo->add_option("--out,-o", demo_out, "output directory");

  // --- check -------------------------------------------------------------
  auto* check = app.add_subcommand("check", "Run the invariant suites");
  unsigned check_seed = 1234;
  check->add_option("--seed", check_seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) {
      emoc::RunConfig config;
      if (!config_path.empty()) {
        std::ifstream is(config_path);
        if (!is)
          throw emoc::InputError("cannot open config file '" + config_path +
                                 "'");
        std::ostringstream text;
        text << is.rdbuf();
        config = emoc::parse_config(text.str());
      }
      if (o_problem->count()) config.problem = cli.problem;
      if (o_mode->count()) config.mode = cli.mode;
      if (o_theta->count()) config.theta = cli.theta;
      if (o_alpha->count()) config.alpha = cli.alpha;
      if (o_marking->count()) config.marking = cli.marking;
      if (o_gamma->count()) config.gamma = cli.gamma;
      if (o_iters->count()) config.max_iters = cli.max_iters;
      if (o_dofs->count()) config.max_dofs = cli.max_dofs;
      if (o_eta->count()) config.eta_tol = cli.eta_tol;
      if (o_cg->count()) config.cg_tol = cli.cg_tol;
      if (o_pg->count()) config.pg_tol = cli.pg_tol;
      if (o_pgmax->count()) config.pg_max_outer = cli.pg_max_outer;
      if (o_sub->count()) config.subdivisions = cli.subdivisions;
      if (o_qd->count()) config.quad_degree = cli.quad_degree;
      if (o_qds->count()) config.quad_degree_singular = cli.quad_degree_singular;
      if (o_out->count()) config.output_dir = cli.output_dir;
      if (o_seed->count()) config.seed = cli.seed;
      emoc::validate_config(config);
      return cmd_run(config);
    }
    if (demo->parsed())
      return cmd_refine_demo(demo_problem, demo_iters, demo_out);
    if (check->parsed())
      return cmd_check(check_seed);
  } catch (const emoc::InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const emoc::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
