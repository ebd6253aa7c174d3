#include <benchmark/benchmark.h>

#include <cmath>

#include "edwards/besselsim.hpp"
#include "edwards/edwardsmc.hpp"
#include "edwards/spectral.hpp"

using namespace edwards;

namespace {

spectral::GridFunction bump(std::size_t n) {
  auto g = spectral::uniform_grid(20.0, n);
  for (std::size_t i = 0; i < g.h.size(); ++i) g.u[i] = std::exp(-(g.h[i] - 4.0) * (g.h[i] - 4.0));
  return g;
}

void GreenSerial(benchmark::State& st) {
  const auto f = bump(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(spectral::green_apply_serial(f));
}

void GreenParallel(benchmark::State& st) {
  const auto f = bump(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(spectral::green_apply(f));
}

// arg 0: serial, 1: OpenMP
void BesqY(benchmark::State& st) {
  besq::SimConfig c;
  c.n_paths = 4000;
  c.parallel = st.range(0) != 0;
  for (auto _ : st) benchmark::DoNotOptimize(besq::estimate_y(1.0, 1.0, c));
}

void Polymer(benchmark::State& st) {
  polymer::PolymerConfig c;
  c.T = 2.0;
  c.n_paths = 2000;
  c.parallel = st.range(0) != 0;
  for (auto _ : st) benchmark::DoNotOptimize(polymer::sample_polymer(c));
}

}  // namespace

BENCHMARK(GreenSerial)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(GreenParallel)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BesqY)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(Polymer)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
