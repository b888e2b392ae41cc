#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "agentrec/eval/harness.hpp"

namespace agentrec::eval {

// Fixed 4 decimals, ties to even on the exact binary value.
std::string format_metric(double v);

struct Report {
  std::string text;
  std::string csv;
};

// Text: an aligned metrics table (model x agent), a blank line, then the
// overall-mean table (one line per score). Absent metrics print as "-".
// CSV: one line per row, absent metrics empty.
Report render_report(const std::vector<MetricRow>& rows, const std::vector<SystemScore>& scores);

// Full evaluation: rows for every run, then one score per run.
struct Evaluation {
  std::vector<MetricRow> rows;
  std::vector<SystemScore> scores;
};

Evaluation evaluate_all(const std::vector<EvalRecord>& records, const std::vector<OutputRun>& runs,
                        metrics::ExecPolicy policy = metrics::ExecPolicy::kParallel);

// Stored report served by the API:
//   {"format": "agentrec-report/1", "dataset": name, "records": n,
//    "rows": [...], "scores": [...], "text": ..., "csv": ...}
nlohmann::json report_json(const Evaluation& ev, const std::string& dataset_name,
                           std::size_t record_count);
void write_report(const std::filesystem::path& path, const nlohmann::json& report);
// Throws kNotFound when absent.
nlohmann::json read_report(const std::filesystem::path& path);

}  // namespace agentrec::eval
