#include <benchmark/benchmark.h>

#include <cmath>

#include "fhnpulse/descent.hpp"
#include "fhnpulse/nonlocal.hpp"
#include "fhnpulse/parabolic.hpp"

using namespace fhn;

namespace {

ModelParams table1(double c, Dimension dim = Dimension::line) {
  ModelParams p;
  p.d = 5e-4;
  p.gamma = 1.0 / 16.0;
  p.beta = 0.25;
  p.c = c;
  p.dim = dim;
  return p;
}

Profile line_bump(int n) {
  Grid g = Grid::line(-120.0, 160.0 / n, n);
  return Profile::sample(g, [](double x) { return std::exp(-x * x / 25.0); });
}

Profile strip_bump(int n_x, int n_y, const ModelParams& p) {
  Grid g = Grid::strip(-240.0, 280.0 / n_x, n_x, p.solver_half_width(), n_y);
  const double l = p.solver_half_width();
  return Profile::sample(g, [=](double x, double y) { return std::exp(-x * x / 25.0) * std::cos(M_PI * y / (2 * l)); });
}

}  // namespace

static void BM_ApplyLcLine(benchmark::State& st) {
  NonlocalSolver solver(table1(14.04));
  const Profile w = line_bump(int(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(solver.apply_Lc(w));
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_ApplyLcLine)->Arg(4000)->Arg(16000)->Arg(48000)->Complexity();

static void BM_ApplyLcStrip(benchmark::State& st) {
  const ModelParams p = table1(13.74, Dimension::strip);
  NonlocalSolver solver(p);
  const Profile w = strip_bump(int(st.range(0)), int(st.range(1)), p);
  for (auto _ : st) benchmark::DoNotOptimize(solver.apply_Lc(w));
}
BENCHMARK(BM_ApplyLcStrip)->Args({2800, 40})->Args({5600, 80})->Unit(benchmark::kMillisecond);

static void BM_DescentStepLine(benchmark::State& st) {
  const ModelParams p = table1(14.04);
  NonlocalSolver solver(p);
  const DescentConfig cfg;
  DescentState s = make_state(initial_guess(make_line_grid(0.01, 160.0, 40.0)), solver, cfg);
  for (auto _ : st) {
    StepResult r = descent_step(s, solver, cfg);
    if (r.accepted) s = std::move(r.state);
  }
}
BENCHMARK(BM_DescentStepLine)->Unit(benchmark::kMillisecond);

static void BM_ParabolicSteps(benchmark::State& st) {
  const double c = 14.04;
  const Grid g = Grid::line(-120.0 / c, 0.01 / c, 16000);
  const Profile u = Profile::sample(g, [](double x) { return 0.9 * std::exp(-x * x * 4.0); });
  const PhysicalState s{u, Profile::zeros(g), 0.0};
  EvolveOptions opt;
  opt.stop_on_collapse = false;
  for (auto _ : st) benchmark::DoNotOptimize(evolve_moving_window(s, table1(c), c, 100 * g.h() / c, opt));
  st.SetItemsProcessed(st.iterations() * 100);
}
BENCHMARK(BM_ParabolicSteps)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
