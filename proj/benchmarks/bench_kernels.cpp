#include <benchmark/benchmark.h>

#include <vector>

#include "adn/data.hpp"
#include "adn/local_solver.hpp"
#include "adn/sparse.hpp"

namespace {

adn::Dataset make_data(std::size_t d, std::size_t n) {
  adn::SyntheticSpec s;
  s.d = d;
  s.n = n;
  s.density = 0.05;
  s.seed = 1;
  s.layout = adn::Layout::dual;
  return adn::generate_synthetic(s);
}

void BM_BlockMatvec(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto data = make_data(500, n);
  const auto part = adn::partition_columns(n, 8, adn::PartitionStrategy::contiguous);
  const std::vector<double> block(part.members(0).size(), 0.5);
  for (auto _ : state) {
    auto y = adn::block_matvec(data.matrix, part.members(0), block);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(part.members(0).size()));
}
BENCHMARK(BM_BlockMatvec)->Arg(4000)->Arg(32000);

// One pass of proximal coordinate descent over a worker's block.
void BM_LocalEpoch(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto data = make_data(500, n);
  adn::ProblemParams params;
  params.mu = 1e-2;
  const auto problem = adn::build_problem(data, params);
  const auto part = adn::partition_columns(n, 8, adn::PartitionStrategy::contiguous);
  const std::vector<double> alpha(n, 0.5);
  const auto v = problem.matrix.multiply(alpha);
  const auto snap = adn::ModelSnapshot::capture(problem.spec.loss, v);
  const adn::LocalSubproblem sub(problem.matrix, part.members(0), 0, 8, snap, part.extract(0, alpha),
                                 problem.spec.reg, 1.0);
  adn::SolverBudget budget;
  budget.epochs = 1;
  for (auto _ : state) {
    auto sol = adn::solve_local(sub, budget);
    benchmark::DoNotOptimize(sol.decrease);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(sub.size()));
}
BENCHMARK(BM_LocalEpoch)->Arg(4000)->Arg(32000);

}  // namespace
