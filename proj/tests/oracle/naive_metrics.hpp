#pragma once

// Test-only reference formulas, transcribed literally and kept free of any
// library code so they can check the optimized implementation.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace oracle {

using Rels = std::map<std::string, double>;

inline double rel_of(const Rels& rels, const std::string& id) {
  auto it = rels.find(id);
  return it == rels.end() ? 0.0 : it->second;
}

inline int hits_top_k(const std::vector<std::string>& ranking, const Rels& rels, int k) {
  int hits = 0;
  for (int i = 0; i < k && i < static_cast<int>(ranking.size()); ++i) {
    if (rel_of(rels, ranking[i]) > 0) hits += 1;
  }
  return hits;
}

inline double precision_at_k(const std::vector<std::string>& ranking, const Rels& rels, int k) {
  return hits_top_k(ranking, rels, k) / static_cast<double>(k);
}

inline double recall_at_k(const std::vector<std::string>& ranking, const Rels& rels, int k) {
  int total = 0;
  for (const auto& kv : rels) total += kv.second > 0 ? 1 : 0;
  return hits_top_k(ranking, rels, k) / static_cast<double>(total);
}

inline double f_beta(double p, double r, double beta) {
  if (p == 0 && r == 0) return 0.0;
  return (1 + beta * beta) * p * r / (beta * beta * p + r);
}

inline double mrr(const std::vector<std::optional<int>>& ranks) {
  double s = 0;
  for (const auto& r : ranks) s += r ? 1.0 / *r : 0.0;
  return s / ranks.size();
}

inline double dcg(const std::vector<double>& rels_in_order, int k) {
  double s = 0;
  for (int i = 1; i <= k && i <= static_cast<int>(rels_in_order.size()); ++i) {
    s += rels_in_order[i - 1] / std::log2(i + 1.0);
  }
  return s;
}

inline double ndcg(const std::vector<std::string>& ranking, const Rels& rels, int k) {
  std::vector<double> actual;
  for (const auto& id : ranking) actual.push_back(rel_of(rels, id));
  std::vector<double> ideal;
  for (const auto& kv : rels) ideal.push_back(kv.second);
  std::sort(ideal.rbegin(), ideal.rend());
  const double idcg = dcg(ideal, k);
  return idcg == 0 ? 0.0 : dcg(actual, k) / idcg;
}

// ASCII-only tokenizer: enough for the generated test texts.
inline std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> raw;
  std::string cur;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) raw.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (!cur.empty()) raw.push_back(cur);
  std::vector<std::string> out;
  for (auto t : raw) {
    while (!t.empty() && std::ispunct(static_cast<unsigned char>(t.front()))) t.erase(0, 1);
    while (!t.empty() && std::ispunct(static_cast<unsigned char>(t.back()))) t.pop_back();
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

struct Prf {
  double p, r, f;
};

inline std::vector<std::vector<std::string>> ngrams(const std::vector<std::string>& t, int n) {
  std::vector<std::vector<std::string>> g;
  for (int i = 0; i + n <= static_cast<int>(t.size()); ++i) {
    g.emplace_back(t.begin() + i, t.begin() + i + n);
  }
  return g;
}

inline Prf rouge_n(const std::string& cand, const std::string& ref, int n) {
  const auto cg = ngrams(tokenize(cand), n);
  const auto rg = ngrams(tokenize(ref), n);
  // Clipped count: greedily consume matching candidate n-grams.
  std::vector<bool> used(cg.size(), false);
  int match = 0;
  for (const auto& r : rg) {
    for (std::size_t j = 0; j < cg.size(); ++j) {
      if (!used[j] && cg[j] == r) {
        used[j] = true;
        ++match;
        break;
      }
    }
  }
  const double p = cg.empty() ? 0.0 : static_cast<double>(match) / cg.size();
  const double r = rg.empty() ? 0.0 : static_cast<double>(match) / rg.size();
  return {p, r, f_beta(p, r, 1.0)};
}

inline Prf rouge_l(const std::string& cand, const std::string& ref) {
  const auto a = tokenize(cand);
  const auto b = tokenize(ref);
  std::vector<std::vector<int>> t(a.size() + 1, std::vector<int>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      if (a[i - 1] == b[j - 1]) {
        t[i][j] = t[i - 1][j - 1] + 1;
      } else {
        t[i][j] = std::max(t[i - 1][j], t[i][j - 1]);
      }
    }
  }
  const double l = t[a.size()][b.size()];
  const double p = a.empty() ? 0.0 : l / a.size();
  const double r = b.empty() ? 0.0 : l / b.size();
  return {p, r, f_beta(p, r, 1.0)};
}

}  // namespace oracle
