#include <benchmark/benchmark.h>

#include "adn/data.hpp"
#include "adn/engine.hpp"

namespace {

// Ten ADN rounds on the dual L2-logistic problem, K = range(0).
void BM_AdnRounds(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto threading = state.range(1) ? adn::Threading::concurrent : adn::Threading::multiplexed;
  adn::SyntheticSpec s;
  s.d = 200;
  s.n = 8000;
  s.density = 0.05;
  s.seed = 2;
  s.layout = adn::Layout::dual;
  const auto data = adn::generate_synthetic(s);
  adn::ProblemParams params;
  params.mu = 1.0;
  const auto problem = adn::build_problem(data, params);
  const auto part = adn::partition_columns(s.n, k, adn::PartitionStrategy::seeded_random, 3);
  adn::SolverBudget budget;
  budget.epochs = 2;
  adn::StopCriteria stop;
  stop.max_rounds = 10;
  adn::EngineOptions options;
  options.threading = threading;
  options.verify_shared = false;
  for (auto _ : state) {
    auto r = adn::run_adn(problem.spec, problem.matrix, part, adn::TrustConfig{}, budget, stop, options);
    benchmark::DoNotOptimize(r.objective);
  }
}
BENCHMARK(BM_AdnRounds)
    ->ArgsProduct({{1, 4, 8}, {0, 1}})
    ->ArgNames({"K", "threads"})
    ->Unit(benchmark::kMillisecond);

}  // namespace
