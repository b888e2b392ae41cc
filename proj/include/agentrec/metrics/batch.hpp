#pragma once

// Batch scoring over many (ranking, judgments) or (candidate, reference)
// cases. kParallel spreads cases over OpenMP threads; kSerial is the plain
// loop kept as the reference path. Both fill results[i] from cases[i] only,
// so their outputs are bit-identical.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agentrec/metrics/ranking.hpp"

namespace agentrec::metrics {

enum class ExecPolicy { kSerial, kParallel };

struct RankingCase {
  RankedList ranking;
  RelevanceJudgments judged;
  Cutoff k{1};
};

struct RankingScores {
  double precision = 0.0;
  double recall = 0.0;
  double ndcg = 0.0;
  std::optional<int> first_relevant_rank;
};

struct SummaryCase {
  std::string candidate;
  std::string reference;
};

struct SummaryScores {
  RougeScore rouge1;
  RougeScore rouge2;
  RougeScore rougeL;
};

// Rethrows the exception of the lowest-index failing case, if any.
std::vector<RankingScores> score_rankings(std::span<const RankingCase> cases, ExecPolicy policy);
std::vector<SummaryScores> score_summaries(std::span<const SummaryCase> cases, ExecPolicy policy);

int max_threads();

}  // namespace agentrec::metrics
