#include "agentrec/metrics/batch.hpp"

#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace agentrec::metrics {

namespace {

RankingScores score_one(const RankingCase& c) {
  RankingScores s;
  s.precision = precision_at_k(c.ranking, c.judged, c.k);
  s.recall = recall_at_k(c.ranking, c.judged, c.k);
  s.ndcg = ndcg_at_k(c.ranking, c.judged, c.k);
  s.first_relevant_rank = first_relevant_rank(c.ranking, c.judged, c.k);
  return s;
}

SummaryScores score_one(const SummaryCase& c) {
  const auto cand = tokenize(c.candidate);
  const auto ref = tokenize(c.reference);
  return {rouge_n_tokens(cand, ref, 1), rouge_n_tokens(cand, ref, 2), rouge_l_tokens(cand, ref)};
}

// Exceptions must not cross an OpenMP region boundary; each case parks its
// failure and the first one (by index) is rethrown after the join.
template <typename Case, typename Result>
std::vector<Result> run(std::span<const Case> cases, ExecPolicy policy) {
  const auto n = static_cast<long>(cases.size());
  std::vector<Result> out(cases.size());
  std::vector<std::exception_ptr> errors(cases.size());
  if (policy == ExecPolicy::kParallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < n; ++i) {
      try {
        out[i] = score_one(cases[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    for (long i = 0; i < n; ++i) {
      try {
        out[i] = score_one(cases[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace

std::vector<RankingScores> score_rankings(std::span<const RankingCase> cases, ExecPolicy policy) {
  return run<RankingCase, RankingScores>(cases, policy);
}

std::vector<SummaryScores> score_summaries(std::span<const SummaryCase> cases, ExecPolicy policy) {
  return run<SummaryCase, SummaryScores>(cases, policy);
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace agentrec::metrics
