#include "agentrec/eval/dataset.hpp"

#include <set>

#include "agentrec/agents/parse.hpp"
#include "agentrec/error.hpp"
#include "agentrec/util/fs.hpp"
#include "agentrec/util/text.hpp"

namespace agentrec::eval {

using nlohmann::json;

std::string_view to_string(EvalAgent a) {
  switch (a) {
    case EvalAgent::kProduct: return "product";
    case EvalAgent::kMultimodal: return "multimodal";
    case EvalAgent::kMarket: return "market";
  }
  return "product";
}

EvalAgent parse_eval_agent(std::string_view s) {
  if (s == "product") return EvalAgent::kProduct;
  if (s == "multimodal") return EvalAgent::kMultimodal;
  if (s == "market") return EvalAgent::kMarket;
  throw Error(ErrorCode::kSchemaViolation, "unknown agent '" + std::string(s) + "'");
}

bool is_ranking_agent(EvalAgent a) { return a != EvalAgent::kMarket; }

namespace {

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

[[noreturn]] void schema(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kSchemaViolation, at_line(line) + what);
}

std::string required_string(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) schema(line, std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) schema(line, std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

EvalRecord record_from_json(const json& j, std::size_t line) {
  if (!j.is_object()) schema(line, "record must be a JSON object");
  EvalRecord r;
  r.record_id = util::trim(required_string(j, "record_id", line));
  if (r.record_id.empty()) schema(line, "'record_id' is empty");
  const std::string agent = required_string(j, "agent", line);
  if (agent != "product" && agent != "multimodal" && agent != "market") {
    schema(line, "unknown agent '" + agent + "'");
  }
  r.agent = parse_eval_agent(agent);
  r.prompt = required_string(j, "prompt", line);
  r.image_path = optional_string(j, "image_path", line);
  r.reference_summary = optional_string(j, "reference_summary", line);

  auto gold = j.find("gold_items");
  if (gold != j.end() && !gold->is_null()) {
    if (!gold->is_array()) schema(line, "'gold_items' must be an array of strings");
    for (const auto& g : *gold) {
      if (!g.is_string()) schema(line, "'gold_items' must be an array of strings");
      const std::string name = util::trim(g.get<std::string>());
      if (name.empty()) schema(line, "'gold_items' contains an empty name");
      r.gold_items.push_back(name);
    }
  }

  auto k = j.find("k");
  if (k == j.end() || !k->is_number_integer()) schema(line, "'k' must be an integer");
  const auto kv = k->get<long long>();
  if (kv < 1 || kv > 1000) schema(line, "'k' must be in [1, 1000]");
  r.k = metrics::Cutoff(static_cast<int>(kv));

  if (is_ranking_agent(r.agent)) {
    if (r.gold_items.empty()) schema(line, "'gold_items' is required for " + std::string(to_string(r.agent)) + " records");
  } else if (!r.reference_summary || util::trim(*r.reference_summary).empty()) {
    schema(line, "'reference_summary' is required for market records");
  }
  return r;
}

}  // namespace

std::vector<EvalRecord> parse_dataset(std::string_view jsonl) {
  std::vector<EvalRecord> out;
  std::set<std::string> ids;
  const auto lines = util::split_lines(jsonl);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line = i + 1;
    if (util::trim(lines[i]).empty()) continue;
    json j;
    try {
      j = json::parse(lines[i]);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kParseError, at_line(line) + e.what());
    }
    EvalRecord r = record_from_json(j, line);
    if (!ids.insert(r.record_id).second) {
      throw Error(ErrorCode::kDuplicateRecord, at_line(line) + "duplicate record_id '" + r.record_id + "'");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<EvalRecord> load_dataset(const std::filesystem::path& path) {
  const auto text = util::read_file(path);
  if (!text) throw Error(ErrorCode::kNotFound, "cannot read dataset " + path.string());
  return parse_dataset(*text);
}

json to_json(const EvalRecord& r) {
  json j;
  j["record_id"] = r.record_id;
  j["agent"] = to_string(r.agent);
  j["prompt"] = r.prompt;
  j["image_path"] = r.image_path ? json(*r.image_path) : json(nullptr);
  j["gold_items"] = r.gold_items;
  j["reference_summary"] = r.reference_summary ? json(*r.reference_summary) : json(nullptr);
  j["k"] = r.k.k();
  return j;
}

namespace {

RecordOutput output_from_json(const json& j, const EvalRecord& rec, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::kSchemaViolation, where + ": entry must be an object");
  RecordOutput out;
  if (auto it = j.find("answer"); it != j.end()) {
    if (!it->is_string()) throw Error(ErrorCode::kSchemaViolation, where + ": 'answer' must be a string");
    const std::string answer = it->get<std::string>();
    if (is_ranking_agent(rec.agent)) {
      const std::string body = agents::parse_followups(answer).answer;
      for (const auto& r : agents::parse_recommendations(body, to_string(rec.agent), {}).items) {
        out.recommendations.push_back(r.product.name);
      }
    } else {
      out.summary = answer;
    }
    return out;
  }
  if (is_ranking_agent(rec.agent)) {
    auto it = j.find("recommendations");
    if (it == j.end() || !it->is_array()) {
      throw Error(ErrorCode::kSchemaViolation, where + ": 'recommendations' must be an array");
    }
    for (const auto& r : *it) {
      if (!r.is_string()) throw Error(ErrorCode::kSchemaViolation, where + ": recommendation names must be strings");
      out.recommendations.push_back(r.get<std::string>());
    }
  } else {
    auto it = j.find("summary");
    if (it == j.end() || !it->is_string()) {
      throw Error(ErrorCode::kSchemaViolation, where + ": 'summary' must be a string");
    }
    out.summary = it->get<std::string>();
  }
  return out;
}

}  // namespace

std::vector<OutputRun> parse_outputs(const json& j, const std::vector<EvalRecord>& records) {
  std::map<std::string, const EvalRecord*> by_id;
  for (const auto& r : records) by_id[r.record_id] = &r;
  auto runs = j.find("runs");
  if (!j.is_object() || runs == j.end() || !runs->is_array()) {
    throw Error(ErrorCode::kSchemaViolation, "outputs file needs a 'runs' array");
  }
  std::vector<OutputRun> out;
  std::set<std::string> models;
  for (std::size_t i = 0; i < runs->size(); ++i) {
    const json& rj = (*runs)[i];
    const std::string where = "runs[" + std::to_string(i) + "]";
    if (!rj.is_object() || !rj.contains("model_id") || !rj["model_id"].is_string() ||
        util::trim(rj["model_id"].get<std::string>()).empty()) {
      throw Error(ErrorCode::kSchemaViolation, where + ": 'model_id' must be a non-empty string");
    }
    OutputRun run;
    run.model_id = util::trim(rj["model_id"].get<std::string>());
    if (!models.insert(run.model_id).second) {
      throw Error(ErrorCode::kSchemaViolation, where + ": duplicate model_id '" + run.model_id + "'");
    }
    auto outs = rj.find("outputs");
    if (outs == rj.end() || !outs->is_object()) {
      throw Error(ErrorCode::kSchemaViolation, where + ": 'outputs' must be an object");
    }
    for (const auto& [rid, entry] : outs->items()) {
      auto rec = by_id.find(rid);
      // Outputs for records outside the dataset are ignored.
      if (rec == by_id.end()) continue;
      run.outputs[rid] = output_from_json(entry, *rec->second, where + "." + rid);
    }
    out.push_back(std::move(run));
  }
  return out;
}

std::vector<OutputRun> load_outputs(const std::filesystem::path& path,
                                    const std::vector<EvalRecord>& records) {
  const auto text = util::read_file(path);
  if (!text) throw Error(ErrorCode::kNotFound, "cannot read outputs " + path.string());
  json j;
  try {
    j = json::parse(*text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  return parse_outputs(j, records);
}

json to_json(const std::vector<OutputRun>& runs) {
  json arr = json::array();
  for (const auto& run : runs) {
    json outs = json::object();
    for (const auto& [rid, o] : run.outputs) {
      outs[rid] = o.summary ? json{{"summary", *o.summary}} : json{{"recommendations", o.recommendations}};
    }
    arr.push_back({{"model_id", run.model_id}, {"outputs", outs}});
  }
  return {{"runs", arr}};
}

}  // namespace agentrec::eval
