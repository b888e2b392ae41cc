#pragma once

// Ranking and summary-overlap metrics: Precision@K, Recall@K, F-beta, MRR,
// DCG/IDCG/NDCG (linear gain), ROUGE-N and ROUGE-L, plus the tokenizer
// ROUGE runs on. Everything here is a pure function.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace agentrec::metrics {

struct RankedList {
  std::vector<std::string> items;
};

// rel >= 0 per item id; items not present have relevance 0. An item counts
// as relevant when rel > 0.
struct RelevanceJudgments {
  std::unordered_map<std::string, double> graded;

  double relevance(const std::string& id) const;
  std::size_t relevant_count() const;
};

class Cutoff {
 public:
  // Throws Error(kInvalidArgument) when k < 1.
  explicit Cutoff(int k);
  int k() const noexcept { return k_; }

 private:
  int k_;
};

class BetaWeight {
 public:
  // Throws Error(kInvalidArgument) unless finite and > 0.
  explicit BetaWeight(double beta);
  double beta() const noexcept { return beta_; }

 private:
  double beta_;
};

// Query id -> rank of the first relevant item, nullopt when none was found.
struct QueryRanks {
  std::map<std::string, std::optional<int>> first_relevant_rank;
};

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

// Throws kInvalidArgument on duplicate ranking ids or negative/non-finite
// relevance.
void validate(const RankedList& ranking);
void validate(const RelevanceJudgments& judged);

std::size_t relevant_in_top_k(const RankedList& ranking, const RelevanceJudgments& judged,
                              Cutoff k);

// Divides by k even when the ranking has fewer than k items.
double precision_at_k(const RankedList& ranking, const RelevanceJudgments& judged, Cutoff k);

// Throws kNoRelevantItems when judged holds no relevant item.
double recall_at_k(const RankedList& ranking, const RelevanceJudgments& judged, Cutoff k);

// (1+b^2)PR / (b^2 P + R); 0 when the denominator is 0.
double f_beta(double precision, double recall, BetaWeight beta);

// 1-based rank of the first relevant item within the top k.
std::optional<int> first_relevant_rank(const RankedList& ranking,
                                       const RelevanceJudgments& judged, Cutoff k);

// Queries with no relevant item contribute 0. Throws kEmptyQuerySet.
double mean_reciprocal_rank(const QueryRanks& ranks);

double dcg_at_k(const RankedList& ranking, const RelevanceJudgments& judged, Cutoff k);
// Ideal ordering = all judged relevances sorted descending.
double idcg_at_k(const RelevanceJudgments& judged, Cutoff k);
// 0 when IDCG is 0.
double ndcg_at_k(const RankedList& ranking, const RelevanceJudgments& judged, Cutoff k);

// Lowercase (ASCII), split on Unicode whitespace, strip leading/trailing
// punctuation from each token, drop empties.
std::vector<std::string> tokenize(std::string_view text);

// Clipped n-gram overlap. Throws kInvalidArgument when n < 1.
RougeScore rouge_n(std::string_view candidate, std::string_view reference, int n);
RougeScore rouge_l(std::string_view candidate, std::string_view reference);

// Token-level variants for callers that already tokenized.
RougeScore rouge_n_tokens(const std::vector<std::string>& cand,
                          const std::vector<std::string>& ref, int n);
RougeScore rouge_l_tokens(const std::vector<std::string>& cand,
                          const std::vector<std::string>& ref);
std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Version tag of the tokenizer rules; ROUGE values are only comparable
// across runs with the same tag.
inline constexpr std::string_view kTokenizerVersion = "tok-v1";

}  // namespace agentrec::metrics
