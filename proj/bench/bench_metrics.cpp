// Serial reference vs OpenMP batch scoring. Arg is the number of cases.

#include <benchmark/benchmark.h>

#include <vector>

#include "agentrec/metrics/batch.hpp"
#include "support/generators.hpp"

namespace {

using agentrec::metrics::Cutoff;
using agentrec::metrics::ExecPolicy;
using agentrec::metrics::RankingCase;
using agentrec::metrics::SummaryCase;

std::vector<RankingCase> ranking_cases(std::size_t n) {
  gen::Rng rng(42);
  std::vector<RankingCase> cases;
  cases.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    RankingCase c;
    c.ranking.items = gen::ranking(rng, 50);
    for (auto& [id, rel] : gen::judgments(rng, 50)) c.judged.graded[id] = rel;
    c.k = Cutoff(gen::uniform(rng, 1, 50));
    cases.push_back(std::move(c));
  }
  return cases;
}

std::vector<SummaryCase> summary_cases(std::size_t n) {
  gen::Rng rng(7);
  std::vector<SummaryCase> cases;
  cases.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    cases.push_back({gen::text(rng, 120, 12), gen::text(rng, 120, 12)});
  }
  return cases;
}

template <ExecPolicy P>
void BM_Rankings(benchmark::State& state) {
  const auto cases = ranking_cases(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(agentrec::metrics::score_rankings(cases, P));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <ExecPolicy P>
void BM_Summaries(benchmark::State& state) {
  const auto cases = summary_cases(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(agentrec::metrics::score_summaries(cases, P));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Rankings<ExecPolicy::kSerial>)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Rankings<ExecPolicy::kParallel>)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Summaries<ExecPolicy::kSerial>)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Summaries<ExecPolicy::kParallel>)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
