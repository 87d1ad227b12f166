// Micro-benchmarks over the reentrant-corner benchmark at two mesh levels:
// curl-curl assembly, the Jacobi-PCG solve, marked bisection with closure,
// a full uniform sweep, the residual indicator, and interface-fraction
// integration.

#include <algorithm>
#include <array>
#include <memory>
#include <numeric>
#include <vector>

#include <benchmark/benchmark.h>

#include "emoc/assembly.hpp"
#include "emoc/control.hpp"
#include "emoc/driver.hpp"
#include "emoc/estimator.hpp"
#include "emoc/linsolve.hpp"
#include "emoc/mesh.hpp"
#include "emoc/problems.hpp"

namespace {

// One solved level per subdivision count, built once and reused; the assets
// hold pointers into the fixture, so its address must stay fixed.
struct Fixture {
  int subdivisions = 0;
  emoc::ProblemSpec problem;
  emoc::TetMesh mesh;
  emoc::LevelAssets assets;
  emoc::KKTSolution kkt;
};

const Fixture& level(int subdivisions) {
  static std::vector<std::unique_ptr<Fixture>> cache;
  for (const auto& f : cache)
    if (f->subdivisions == subdivisions)
      return *f;
  auto f = std::make_unique<Fixture>();
  f->subdivisions = subdivisions;
  f->problem = emoc::benchmark_lshape();
  f->mesh = emoc::build_problem_mesh(f->problem, subdivisions);
  f->assets = emoc::build_level_assets(f->mesh, f->problem, 1e-8);
  f->kkt = emoc::projected_gradient(f->assets, emoc::initial_control(f->assets),
                                    1e-4, 50);
  cache.push_back(std::move(f));
  return *cache.back();
}

void BM_assemble_B(benchmark::State& state) {
  const Fixture& f = level(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    emoc::SpMat B = emoc::assemble_B(f.mesh, f.assets.dofmap, f.assets.coeffs);
    benchmark::DoNotOptimize(B);
  }
  state.SetItemsProcessed(state.iterations() * f.mesh.n_tets());
}
BENCHMARK(BM_assemble_B)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_pcg_solve(benchmark::State& state) {
  const Fixture& f = level(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto [x, rep] = emoc::pcg_solve(f.assets.B, f.assets.rhs_f, 1e-8);
    benchmark::DoNotOptimize(x);
    benchmark::DoNotOptimize(rep);
  }
  state.SetItemsProcessed(state.iterations() * f.assets.dofmap.n_state);
}
BENCHMARK(BM_pcg_solve)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_refine_marked(benchmark::State& state) {
  const Fixture& f = level(static_cast<int>(state.range(0)));
  // Mark the tenth of the tets closest to the reentrant axis.
  std::vector<int> order(static_cast<size_t>(f.mesh.n_tets()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const emoc::Vec3 ca = f.mesh.centroid(a), cb = f.mesh.centroid(b);
    return ca.head<2>().norm() < cb.head<2>().norm();
  });
  std::vector<int> marked(order.begin(),
                          order.begin() + f.mesh.n_tets() / 10 + 1);
  std::sort(marked.begin(), marked.end());
  for (auto _ : state) {
    emoc::TetMesh refined = emoc::refine(f.mesh, marked);
    benchmark::DoNotOptimize(refined);
  }
  state.SetItemsProcessed(state.iterations() * f.mesh.n_tets());
}
BENCHMARK(BM_refine_marked)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_uniform_sweep(benchmark::State& state) {
  const Fixture& f = level(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    emoc::RefineResult r = emoc::bisect_sweeps(f.mesh, 3);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * f.mesh.n_tets());
}
BENCHMARK(BM_uniform_sweep)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_indicator(benchmark::State& state) {
  const Fixture& f = level(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    emoc::IndicatorReport rep = emoc::assemble_indicator(f.assets, f.kkt);
    benchmark::DoNotOptimize(rep);
  }
  state.SetItemsProcessed(state.iterations() * f.mesh.n_tets());
}
BENCHMARK(BM_indicator)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_ball_fraction(benchmark::State& state) {
  const emoc::BallInterface ball{emoc::Vec3::Zero(), 0.6};
  // A corner-cut tet: the interface crosses all four faces.
  const std::array<emoc::Vec3, 4> corners = {
      emoc::Vec3(0.5, 0.0, 0.0), emoc::Vec3(0.9, 0.0, 0.0),
      emoc::Vec3(0.5, 0.4, 0.0), emoc::Vec3(0.5, 0.0, 0.4)};
  for (auto _ : state) {
    const double frac =
        emoc::ball_volume_fraction(ball, corners, static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(frac);
  }
}
BENCHMARK(BM_ball_fraction)->Arg(4)->Arg(6);

} // namespace

BENCHMARK_MAIN();
