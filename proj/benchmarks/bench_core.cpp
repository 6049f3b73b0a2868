#include <benchmark/benchmark.h>

#include "bidla/brw.hpp"
#include "bidla/engine.hpp"
#include "bidla/green.hpp"
#include "bidla/lattice.hpp"
#include "bidla/rbg.hpp"
#include "bidla/stacks.hpp"

using namespace bidla;

static void BM_InstructionAt(benchmark::State& state) {
  const InstructionStacks stacks(7, 2, OffspringLaw::binary_fair());
  std::uint64_t j = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(stacks.instruction_at(origin(2), ++j));
  }
}
BENCHMARK(BM_InstructionAt);

static void BM_BallSites(benchmark::State& state) {
  const double radius = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ball_sites(radius, 2));
  }
}
BENCHMARK(BM_BallSites)->Arg(10)->Arg(40)->Arg(80);

static void BM_StabilizePointMass(benchmark::State& state) {
  const auto mass = state.range(0);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const InstructionStacks stacks(++seed, 2, OffspringLaw::binary_fair());
    benchmark::DoNotOptimize(stabilize(
        ParticleConfig::point_mass(origin(2), mass), Domain::all(2), stacks));
  }
}
BENCHMARK(BM_StabilizePointMass)->Arg(10)->Arg(50);

static void BM_BidlaRun(benchmark::State& state) {
  const auto steps = state.range(0);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const InstructionStacks stacks(++seed, 2, OffspringLaw::binary_fair());
    BidlaProcess proc(stacks);
    for (std::int64_t t = 0; t < steps; ++t) proc.advance();
    benchmark::DoNotOptimize(proc.volume());
  }
}
BENCHMARK(BM_BidlaRun)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_RunBrw(benchmark::State& state) {
  const double radius = static_cast<double>(state.range(0));
  const Domain K = Domain::ball(radius, 2);
  const OffspringLaw law = OffspringLaw::binary_fair();
  RandomStream stream(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_brw(origin(2), K, stream, law));
  }
}
BENCHMARK(BM_RunBrw)->Arg(8)->Arg(16)->Arg(32);

static void BM_GreenSolve(benchmark::State& state) {
  const double radius = static_cast<double>(state.range(0));
  const Domain K = Domain::ball(radius, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(GreenTable::solve(K));
  }
}
BENCHMARK(BM_GreenSolve)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_RbgShell(benchmark::State& state) {
  const auto sphere = Domain::ball(10.0, 3).boundary();
  const OffspringLaw law = OffspringLaw::binary_fair();
  std::uint64_t r = 0;
  for (auto _ : state) {
    RandomStream stream(++r);
    ParticleConfig eta;
    for (int p = 0; p < 50; ++p) {
      eta.add(sphere[stream.next_below(
                  static_cast<std::uint32_t>(sphere.size()))],
              1);
    }
    StreamSource source(stream, law, 3);
    benchmark::DoNotOptimize(
        rbg_shell(eta, 10, 20, source, nullptr, stream));
  }
}
BENCHMARK(BM_RbgShell)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
