#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace gen {

using Rng = std::mt19937_64;

inline int uniform(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Ranking of up to max_len unique ids drawn from a pool of 2*max_len ids.
inline std::vector<std::string> ranking(Rng& rng, int max_len = 20) {
  std::vector<std::string> pool;
  for (int i = 0; i < 2 * max_len; ++i) pool.push_back("item" + std::to_string(i));
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(static_cast<std::size_t>(uniform(rng, 0, max_len)));
  return pool;
}

// Graded judgments over a random subset of the pool; with graded=false the
// values are {0,1}. Guarantees at least one relevant item when requested.
inline std::map<std::string, double> judgments(Rng& rng, int max_len = 20, bool graded = true,
                                               bool ensure_relevant = true) {
  std::map<std::string, double> rels;
  for (int i = 0; i < 2 * max_len; ++i) {
    if (uniform(rng, 0, 2) == 0) {
      rels["item" + std::to_string(i)] = graded ? uniform(rng, 0, 3) : uniform(rng, 0, 1);
    }
  }
  if (ensure_relevant) {
    bool any = false;
    for (auto& kv : rels) any = any || kv.second > 0;
    if (!any) rels["item" + std::to_string(uniform(rng, 0, 2 * max_len - 1))] = 1.0;
  }
  return rels;
}

// Up to max_tokens words from a vocabulary of vocab words, with occasional
// punctuation and mixed case.
inline std::string text(Rng& rng, int max_tokens = 30, int vocab = 10) {
  static const char* kWords[] = {"the", "cat", "sat", "on", "mat", "shoe",
                                 "red", "fast", "price", "trend", "watch", "phone"};
  static const char* kPunct[] = {"", "", "", ",", ".", "!", "?", ";", "\"", "("};
  const int n = uniform(rng, 0, max_tokens);
  std::string out;
  for (int i = 0; i < n; ++i) {
    if (i) out += uniform(rng, 0, 5) == 0 ? "  " : " ";
    std::string w = kWords[uniform(rng, 0, std::min(vocab, 12) - 1)];
    if (uniform(rng, 0, 4) == 0) w[0] = static_cast<char>(w[0] - 'a' + 'A');
    if (uniform(rng, 0, 6) == 0) w = kPunct[uniform(rng, 3, 9)] + w;
    w += kPunct[uniform(rng, 0, 9)];
    out += w;
  }
  return out;
}

}  // namespace gen
