#pragma once

// Evaluation dataset (JSON Lines, one EvalRecord per line) and the recorded
// agent outputs it is scored against.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "agentrec/metrics/ranking.hpp"

namespace agentrec::eval {

enum class EvalAgent { kProduct, kMultimodal, kMarket };

std::string_view to_string(EvalAgent a);
// Throws kSchemaViolation.
EvalAgent parse_eval_agent(std::string_view s);
bool is_ranking_agent(EvalAgent a);

struct EvalRecord {
  std::string record_id;
  EvalAgent agent = EvalAgent::kProduct;
  std::string prompt;
  std::optional<std::string> image_path;
  std::vector<std::string> gold_items;
  std::optional<std::string> reference_summary;
  metrics::Cutoff k{1};
};

// Line format:
//   {"record_id", "agent", "prompt", "image_path"?, "gold_items"?,
//    "reference_summary"?, "k"}
// Blank lines are skipped. Errors name the 1-based line: kParseError for bad
// JSON, kSchemaViolation for missing/ill-typed fields or broken invariants,
// kDuplicateRecord for a repeated record_id.
std::vector<EvalRecord> parse_dataset(std::string_view jsonl);
std::vector<EvalRecord> load_dataset(const std::filesystem::path& path);

nlohmann::json to_json(const EvalRecord& r);

// What one agent produced for one record. Ranking agents carry the ordered
// product names; the market agent carries its summary.
struct RecordOutput {
  std::vector<std::string> recommendations;
  std::optional<std::string> summary;
};

// Outputs of one model over the dataset.
struct OutputRun {
  std::string model_id;
  std::map<std::string, RecordOutput> outputs;
};

// Outputs file:
//   {"runs": [{"model_id", "outputs": {record_id: entry}}]}
// where entry is {"recommendations": [names]}, {"summary": text} or
// {"answer": raw agent text}. A raw answer is parsed into numbered
// recommendations for ranking records and used verbatim as the market
// summary. Throws kSchemaViolation.
std::vector<OutputRun> parse_outputs(const nlohmann::json& j,
                                     const std::vector<EvalRecord>& records);
std::vector<OutputRun> load_outputs(const std::filesystem::path& path,
                                    const std::vector<EvalRecord>& records);
nlohmann::json to_json(const std::vector<OutputRun>& runs);

}  // namespace agentrec::eval
