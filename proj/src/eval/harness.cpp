#include "agentrec/eval/harness.hpp"

#include <algorithm>
#include <set>

#include "agentrec/error.hpp"
#include "agentrec/util/text.hpp"

namespace agentrec::eval {

using nlohmann::json;

GoldMatch match_gold(const std::vector<std::string>& recommendations,
                     const std::vector<std::string>& gold_items) {
  GoldMatch out;
  for (const auto& g : gold_items) {
    const std::string key = util::normalize_key(g);
    if (!key.empty()) out.judged.graded[key] = 1.0;
  }
  std::set<std::string> seen;
  for (const auto& r : recommendations) {
    const std::string key = util::normalize_key(r);
    if (key.empty() || !seen.insert(key).second) continue;
    out.ranking.items.push_back(key);
  }
  return out;
}

namespace {

std::vector<const EvalRecord*> records_for(const std::vector<EvalRecord>& records, EvalAgent agent,
                                           const OutputRun& run) {
  std::vector<const EvalRecord*> out;
  for (const auto& r : records) {
    if (r.agent == agent) out.push_back(&r);
  }
  if (out.empty()) {
    throw Error(ErrorCode::kEmptyRows, "no " + std::string(to_string(agent)) + " records to evaluate");
  }
  std::sort(out.begin(), out.end(),
            [](const EvalRecord* a, const EvalRecord* b) { return a->record_id < b->record_id; });
  for (const auto* r : out) {
    if (!run.outputs.count(r->record_id)) {
      throw Error(ErrorCode::kMissingOutput,
                  "model '" + run.model_id + "' has no output for record '" + r->record_id + "'");
    }
  }
  return out;
}

metrics::RougeScore mean_rouge(const std::vector<metrics::RougeScore>& xs) {
  metrics::RougeScore m;
  for (const auto& x : xs) {
    m.precision += x.precision;
    m.recall += x.recall;
    m.f += x.f;
  }
  const double n = static_cast<double>(xs.size());
  m.precision /= n;
  m.recall /= n;
  m.f /= n;
  return m;
}

}  // namespace

MetricRow evaluate_agent(const std::vector<EvalRecord>& records, EvalAgent agent,
                         const OutputRun& run, metrics::ExecPolicy policy) {
  const auto recs = records_for(records, agent, run);
  MetricRow row;
  row.model_id = run.model_id;
  row.agent = agent;
  row.records = recs.size();
  const double n = static_cast<double>(recs.size());

  if (is_ranking_agent(agent)) {
    std::vector<metrics::RankingCase> cases;
    cases.reserve(recs.size());
    for (const auto* r : recs) {
      auto m = match_gold(run.outputs.at(r->record_id).recommendations, r->gold_items);
      cases.push_back({std::move(m.ranking), std::move(m.judged), r->k});
    }
    const auto scores = metrics::score_rankings(cases, policy);
    double p = 0, rec = 0, nd = 0;
    metrics::QueryRanks ranks;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      p += scores[i].precision;
      rec += scores[i].recall;
      nd += scores[i].ndcg;
      ranks.first_relevant_rank[recs[i]->record_id] = scores[i].first_relevant_rank;
    }
    row.p_at_k = p / n;
    row.r_at_k = rec / n;
    row.ndcg = nd / n;
    row.f1 = metrics::f_beta(*row.p_at_k, *row.r_at_k, metrics::BetaWeight(1.0));
    row.mrr = metrics::mean_reciprocal_rank(ranks);
  } else {
    std::vector<metrics::SummaryCase> cases;
    cases.reserve(recs.size());
    for (const auto* r : recs) {
      cases.push_back({run.outputs.at(r->record_id).summary.value_or(""), *r->reference_summary});
    }
    const auto scores = metrics::score_summaries(cases, policy);
    std::vector<metrics::RougeScore> r1, r2, rl;
    for (const auto& s : scores) {
      r1.push_back(s.rouge1);
      r2.push_back(s.rouge2);
      rl.push_back(s.rougeL);
    }
    row.rouge1 = mean_rouge(r1);
    row.rouge2 = mean_rouge(r2);
    row.rougeL = mean_rouge(rl);
  }
  return row;
}

std::vector<MetricRow> evaluate_run(const std::vector<EvalRecord>& records, const OutputRun& run,
                                    metrics::ExecPolicy policy) {
  std::vector<MetricRow> rows;
  for (EvalAgent a : {EvalAgent::kProduct, EvalAgent::kMultimodal, EvalAgent::kMarket}) {
    const bool present = std::any_of(records.begin(), records.end(),
                                     [&](const EvalRecord& r) { return r.agent == a; });
    if (present) rows.push_back(evaluate_agent(records, a, run, policy));
  }
  return rows;
}

namespace {

std::optional<double> mean_of(const std::vector<MetricRow>& rows,
                              std::optional<double> MetricRow::*field) {
  double sum = 0;
  std::size_t n = 0;
  for (const auto& r : rows) {
    if (!(r.*field)) continue;
    sum += *(r.*field);
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::optional<metrics::RougeScore> mean_of(const std::vector<MetricRow>& rows,
                                           std::optional<metrics::RougeScore> MetricRow::*field) {
  std::vector<metrics::RougeScore> xs;
  for (const auto& r : rows) {
    if (r.*field) xs.push_back(*(r.*field));
  }
  if (xs.empty()) return std::nullopt;
  return mean_rouge(xs);
}

}  // namespace

SystemScore overall_mean(const std::vector<MetricRow>& rows) {
  if (rows.empty()) throw Error(ErrorCode::kEmptyRows, "overall mean needs at least one row");
  SystemScore s;
  s.model_id = rows.front().model_id;
  for (const auto& r : rows) {
    if (r.model_id != s.model_id) s.model_id.clear();
  }
  s.rows = rows.size();
  s.p_at_k = mean_of(rows, &MetricRow::p_at_k);
  s.r_at_k = mean_of(rows, &MetricRow::r_at_k);
  s.f1 = mean_of(rows, &MetricRow::f1);
  s.mrr = mean_of(rows, &MetricRow::mrr);
  s.ndcg = mean_of(rows, &MetricRow::ndcg);
  s.rouge1 = mean_of(rows, &MetricRow::rouge1);
  s.rouge2 = mean_of(rows, &MetricRow::rouge2);
  s.rougeL = mean_of(rows, &MetricRow::rougeL);
  return s;
}

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json opt(const std::optional<metrics::RougeScore>& v) {
  if (!v) return nullptr;
  return {{"precision", v->precision}, {"recall", v->recall}, {"f", v->f}};
}

template <typename T>
void fill_metrics(json& j, const T& v) {
  j["p_at_k"] = opt(v.p_at_k);
  j["r_at_k"] = opt(v.r_at_k);
  j["f1"] = opt(v.f1);
  j["mrr"] = opt(v.mrr);
  j["ndcg"] = opt(v.ndcg);
  j["rouge1"] = opt(v.rouge1);
  j["rouge2"] = opt(v.rouge2);
  j["rougeL"] = opt(v.rougeL);
}

}  // namespace

json to_json(const MetricRow& row) {
  json j{{"model_id", row.model_id}, {"agent", to_string(row.agent)}, {"records", row.records}};
  fill_metrics(j, row);
  return j;
}

json to_json(const SystemScore& score) {
  json j{{"model_id", score.model_id}, {"rows", score.rows}};
  fill_metrics(j, score);
  return j;
}

}  // namespace agentrec::eval
