#include "agentrec/metrics/ranking.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_set>

#include "agentrec/error.hpp"

namespace agentrec::metrics {

double RelevanceJudgments::relevance(const std::string& id) const {
  auto it = graded.find(id);
  return it == graded.end() ? 0.0 : it->second;
}

std::size_t RelevanceJudgments::relevant_count() const {
  return static_cast<std::size_t>(
      std::count_if(graded.begin(), graded.end(), [](const auto& kv) { return kv.second > 0.0; }));
}

Cutoff::Cutoff(int k) : k_(k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "cutoff k must be >= 1");
}

BetaWeight::BetaWeight(double beta) : beta_(beta) {
  if (!std::isfinite(beta) || beta <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "beta must be finite and > 0");
  }
}

void validate(const RankedList& ranking) {
  std::unordered_set<std::string> seen;
  for (const auto& id : ranking.items) {
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate id in ranking: " + id);
    }
  }
}

void validate(const RelevanceJudgments& judged) {
  for (const auto& [id, rel] : judged.graded) {
    if (!std::isfinite(rel) || rel < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "relevance must be finite and >= 0 for " + id);
    }
  }
}

namespace {

std::size_t depth(const RankedList& ranking, Cutoff k) {
  return std::min(ranking.items.size(), static_cast<std::size_t>(k.k()));
}

double discount(std::size_t position_from_one) {
  return std::log2(static_cast<double>(position_from_one) + 1.0);
}

}  // namespace

std::size_t relevant_in_top_k(const RankedList& ranking, const RelevanceJudgments& judged,
                              Cutoff k) {
  std::size_t hits = 0;
  const std::size_t n = depth(ranking, k);
  for (std::size_t i = 0; i < n; ++i) {
    if (judged.relevance(ranking.items[i]) > 0.0) ++hits;
  }
  return hits;
}

double precision_at_k(const RankedList& ranking, const RelevanceJudgments& judged, Cutoff k) {
  return static_cast<double>(relevant_in_top_k(ranking, judged, k)) / k.k();
}

double recall_at_k(const RankedList& ranking, const RelevanceJudgments& judged, Cutoff k) {
  const std::size_t total = judged.relevant_count();
  if (total == 0) throw Error(ErrorCode::kNoRelevantItems, "judgments contain no relevant item");
  return static_cast<double>(relevant_in_top_k(ranking, judged, k)) /
         static_cast<double>(total);
}

double f_beta(double precision, double recall, BetaWeight beta) {
  if (precision < 0.0 || precision > 1.0 || recall < 0.0 || recall > 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "precision and recall must lie in [0,1]");
  }
  const double b2 = beta.beta() * beta.beta();
  const double denom = b2 * precision + recall;
  if (denom == 0.0) return 0.0;
  return (1.0 + b2) * precision * recall / denom;
}

std::optional<int> first_relevant_rank(const RankedList& ranking,
                                       const RelevanceJudgments& judged, Cutoff k) {
  const std::size_t n = depth(ranking, k);
  for (std::size_t i = 0; i < n; ++i) {
    if (judged.relevance(ranking.items[i]) > 0.0) return static_cast<int>(i) + 1;
  }
  return std::nullopt;
}

double mean_reciprocal_rank(const QueryRanks& ranks) {
  if (ranks.first_relevant_rank.empty()) {
    throw Error(ErrorCode::kEmptyQuerySet, "MRR over an empty query set");
  }
  double sum = 0.0;
  for (const auto& [query, rank] : ranks.first_relevant_rank) {
    if (!rank) continue;
    if (*rank < 1) throw Error(ErrorCode::kInvalidArgument, "rank must be >= 1 for " + query);
    sum += 1.0 / *rank;
  }
  return sum / static_cast<double>(ranks.first_relevant_rank.size());
}

double dcg_at_k(const RankedList& ranking, const RelevanceJudgments& judged, Cutoff k) {
  double dcg = 0.0;
  const std::size_t n = depth(ranking, k);
  for (std::size_t i = 0; i < n; ++i) {
    dcg += judged.relevance(ranking.items[i]) / discount(i + 1);
  }
  return dcg;
}

double idcg_at_k(const RelevanceJudgments& judged, Cutoff k) {
  std::vector<double> ideal;
  ideal.reserve(judged.graded.size());
  for (const auto& kv : judged.graded) ideal.push_back(kv.second);
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  const std::size_t n = std::min(ideal.size(), static_cast<std::size_t>(k.k()));
  double idcg = 0.0;
  for (std::size_t i = 0; i < n; ++i) idcg += ideal[i] / discount(i + 1);
  return idcg;
}

double ndcg_at_k(const RankedList& ranking, const RelevanceJudgments& judged, Cutoff k) {
  const double idcg = idcg_at_k(judged, k);
  if (idcg == 0.0) return 0.0;
  return dcg_at_k(ranking, judged, k) / idcg;
}

// ---------------------------------------------------------------------------
// Tokenizer

namespace {

struct CodePoint {
  char32_t value;
  std::size_t length;
};

CodePoint decode_utf8(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  auto cont = [&](std::size_t j) -> int {
    if (j >= s.size()) return -1;
    const auto b = static_cast<unsigned char>(s[j]);
    return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
  };
  if (b0 < 0x80) return {b0, 1};
  if ((b0 & 0xE0) == 0xC0) {
    const int c1 = cont(i + 1);
    if (c1 >= 0) return {static_cast<char32_t>(((b0 & 0x1F) << 6) | c1), 2};
  } else if ((b0 & 0xF0) == 0xE0) {
    const int c1 = cont(i + 1), c2 = cont(i + 2);
    if (c1 >= 0 && c2 >= 0) {
      return {static_cast<char32_t>(((b0 & 0x0F) << 12) | (c1 << 6) | c2), 3};
    }
  } else if ((b0 & 0xF8) == 0xF0) {
    const int c1 = cont(i + 1), c2 = cont(i + 2), c3 = cont(i + 3);
    if (c1 >= 0 && c2 >= 0 && c3 >= 0) {
      return {static_cast<char32_t>(((b0 & 0x07) << 18) | (c1 << 12) | (c2 << 6) | c3), 4};
    }
  }
  return {0xFFFD, 1};
}

bool is_unicode_space(char32_t c) {
  switch (c) {
    case U' ': case U'\t': case U'\n': case U'\v': case U'\f': case U'\r':
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

bool is_punct(char32_t c) {
  if (c < 0x80) return std::ispunct(static_cast<int>(c)) != 0;
  switch (c) {
    case 0xA1: case 0xAB: case 0xBB: case 0xBF:   // ¡ « » ¿
    case 0x2026:                                  // …
    case 0x3001: case 0x3002:                     // 、 。
      return true;
    default:
      return (c >= 0x2010 && c <= 0x2027);  // dashes, quotes, bullets
  }
}

std::string strip_punct(std::string_view tok) {
  std::vector<CodePoint> cps;
  std::vector<std::size_t> offsets;
  for (std::size_t i = 0; i < tok.size();) {
    const auto cp = decode_utf8(tok, i);
    cps.push_back(cp);
    offsets.push_back(i);
    i += cp.length;
  }
  std::size_t b = 0, e = cps.size();
  while (b < e && is_punct(cps[b].value)) ++b;
  while (e > b && is_punct(cps[e - 1].value)) --e;
  if (b == e) return {};
  const std::size_t start = offsets[b];
  const std::size_t stop = offsets[e - 1] + cps[e - 1].length;
  return std::string(tok.substr(start, stop - start));
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    std::string stripped = strip_punct(current);
    if (!stripped.empty()) tokens.push_back(std::move(stripped));
    current.clear();
  };
  for (std::size_t i = 0; i < text.size();) {
    const auto cp = decode_utf8(text, i);
    if (is_unicode_space(cp.value)) {
      flush();
    } else if (cp.length == 1) {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[i]))));
    } else {
      current.append(text.substr(i, cp.length));
    }
    i += cp.length;
  }
  flush();
  return tokens;
}

// ---------------------------------------------------------------------------
// ROUGE

namespace {

std::unordered_map<std::string, int> ngram_counts(const std::vector<std::string>& toks, int n) {
  std::unordered_map<std::string, int> counts;
  const auto un = static_cast<std::size_t>(n);
  if (toks.size() < un) return counts;
  for (std::size_t i = 0; i + un <= toks.size(); ++i) {
    std::string key = toks[i];
    for (std::size_t j = 1; j < un; ++j) {
      key.push_back('\x1f');
      key += toks[i + j];
    }
    ++counts[key];
  }
  return counts;
}

RougeScore make_score(double match, double cand_total, double ref_total) {
  RougeScore s;
  s.precision = cand_total > 0 ? match / cand_total : 0.0;
  s.recall = ref_total > 0 ? match / ref_total : 0.0;
  s.f = f_beta(s.precision, s.recall, BetaWeight(1.0));
  return s;
}

}  // namespace

RougeScore rouge_n_tokens(const std::vector<std::string>& cand,
                          const std::vector<std::string>& ref, int n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "ROUGE-N requires n >= 1");
  const auto cand_counts = ngram_counts(cand, n);
  const auto ref_counts = ngram_counts(ref, n);
  long match = 0;
  for (const auto& [gram, ref_count] : ref_counts) {
    auto it = cand_counts.find(gram);
    if (it != cand_counts.end()) match += std::min(it->second, ref_count);
  }
  const auto un = static_cast<std::size_t>(n);
  const double cand_total = cand.size() >= un ? static_cast<double>(cand.size() - un + 1) : 0.0;
  const double ref_total = ref.size() >= un ? static_cast<double>(ref.size() - un + 1) : 0.0;
  return make_score(static_cast<double>(match), cand_total, ref_total);
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeScore rouge_l_tokens(const std::vector<std::string>& cand,
                          const std::vector<std::string>& ref) {
  const double l = static_cast<double>(lcs_length(cand, ref));
  return make_score(l, static_cast<double>(cand.size()), static_cast<double>(ref.size()));
}

RougeScore rouge_n(std::string_view candidate, std::string_view reference, int n) {
  return rouge_n_tokens(tokenize(candidate), tokenize(reference), n);
}

RougeScore rouge_l(std::string_view candidate, std::string_view reference) {
  return rouge_l_tokens(tokenize(candidate), tokenize(reference));
}

}  // namespace agentrec::metrics
