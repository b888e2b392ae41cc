#pragma once

// Scores recorded agent outputs against gold judgments and reference
// summaries, one MetricRow per (model, agent), and averages rows into the
// system-level score.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "agentrec/eval/dataset.hpp"
#include "agentrec/metrics/batch.hpp"

namespace agentrec::eval {

struct GoldMatch {
  metrics::RankedList ranking;
  metrics::RelevanceJudgments judged;
};

// Binary relevance by normalized-name equality. Ranking ids are normalized
// names with repeats dropped (first occurrence wins); gold names are
// deduplicated the same way.
GoldMatch match_gold(const std::vector<std::string>& recommendations,
                     const std::vector<std::string>& gold_items);

struct MetricRow {
  std::string model_id;
  EvalAgent agent = EvalAgent::kProduct;
  std::size_t records = 0;
  std::optional<double> p_at_k;
  std::optional<double> r_at_k;
  std::optional<double> f1;
  std::optional<double> mrr;
  std::optional<double> ndcg;
  std::optional<metrics::RougeScore> rouge1;
  std::optional<metrics::RougeScore> rouge2;
  std::optional<metrics::RougeScore> rougeL;
};

// Means over rows that carry each metric; absent when none does.
struct SystemScore {
  std::string model_id;
  std::size_t rows = 0;
  std::optional<double> p_at_k;
  std::optional<double> r_at_k;
  std::optional<double> f1;
  std::optional<double> mrr;
  std::optional<double> ndcg;
  std::optional<metrics::RougeScore> rouge1;
  std::optional<metrics::RougeScore> rouge2;
  std::optional<metrics::RougeScore> rougeL;
};

// Scores every record of `agent` in `records`. Records are processed in
// record_id order, so the result does not depend on input order. Throws
// kMissingOutput naming the first uncovered record, kEmptyRows when no
// record belongs to `agent`.
MetricRow evaluate_agent(const std::vector<EvalRecord>& records, EvalAgent agent,
                         const OutputRun& run,
                         metrics::ExecPolicy policy = metrics::ExecPolicy::kParallel);

// One row per agent present in the dataset, in enum order.
std::vector<MetricRow> evaluate_run(const std::vector<EvalRecord>& records, const OutputRun& run,
                                    metrics::ExecPolicy policy = metrics::ExecPolicy::kParallel);

// Throws kEmptyRows. model_id is the rows' shared id, or "" when mixed.
SystemScore overall_mean(const std::vector<MetricRow>& rows);

nlohmann::json to_json(const MetricRow& row);
nlohmann::json to_json(const SystemScore& score);

}  // namespace agentrec::eval
