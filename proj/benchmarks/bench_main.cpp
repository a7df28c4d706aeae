#include <benchmark/benchmark.h>

#include <random>
#include <sstream>

#include "effgap/canonical.hpp"
#include "effgap/county_graph.hpp"
#include "effgap/local_search.hpp"
#include "effgap/oracle.hpp"
#include "effgap/synthetic.hpp"
#include "effgap/yconvex.hpp"

namespace {

using namespace effgap;

std::vector<VoteCounts> random_votes(std::size_t n, std::uint64_t seed, std::int64_t pop) {
  std::mt19937_64 rng(seed);
  std::vector<VoteCounts> v(n);
  for (auto& c : v) {
    const auto a = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(pop + 1));
    c = {a, pop - a};
  }
  return v;
}

void BM_TotalEffgap(benchmark::State& state) {
  const auto v = random_votes(static_cast<std::size_t>(state.range(0)), 1, 700000);
  for (auto _ : state) benchmark::DoNotOptimize(total_effgap(v).total_scaled_abs);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TotalEffgap)->Arg(8)->Arg(36)->Arg(435);

void BM_BruteForce(benchmark::State& state) {
  const int cols = static_cast<int>(state.range(0));
  const GridPolygon p = GridPolygon::rectangle(3, cols, random_votes(static_cast<std::size_t>(3 * cols), 2, 4));
  for (auto _ : state) {
    benchmark::DoNotOptimize(brute_force_opt(p, 2, PopulationMode::near(Rational(1, 10)), 24).best_scaled_abs);
  }
}
BENCHMARK(BM_BruteForce)->DenseRange(3, 6)->Unit(benchmark::kMillisecond);

void BM_YConvex(benchmark::State& state) {
  const int cols = static_cast<int>(state.range(0));
  const auto kappa = static_cast<int>(state.range(1));
  const GridPolygon p = GridPolygon::rectangle(3, cols, std::vector<VoteCounts>(static_cast<std::size_t>(3 * cols), VoteCounts{1, 1}));
  for (auto _ : state) benchmark::DoNotOptimize(solve_yconvex(p, kappa).best_scaled_abs);
}
BENCHMARK(BM_YConvex)->Args({6, 2})->Args({12, 2})->Args({6, 3})->Unit(benchmark::kMillisecond);

void BM_Canonical(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GridPolygon p = GridPolygon::rectangle(n, n, random_votes(static_cast<std::size_t>(n * n), 3, 4));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_two_near_stable(p, Rational(1, 3), Rational(1, 6)).delta_achieved);
  }
}
BENCHMARK(BM_Canonical)->Arg(6)->Arg(9)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_LocalSearchIteration(benchmark::State& state) {
  std::istringstream in(synthesize_state_csv(state_profile("PA")));
  const CountyData d = ingest_county_csv(in);
  DistrictPlan plan = d.plan;
  Rng rng(1);
  std::int64_t sum = total_effgap(plan.district_votes()).signed_scaled_sum;
  int it = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_iteration(d.graph, plan, rng, 20, it++, false, sum).size());
  }
}
BENCHMARK(BM_LocalSearchIteration);

}  // namespace

BENCHMARK_MAIN();
