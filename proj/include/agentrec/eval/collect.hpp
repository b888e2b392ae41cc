#pragma once

// Produces an OutputRun by running the agents over a dataset (the --live
// path). Each record gets a fresh provider from `providers`.

#include <filesystem>
#include <functional>
#include <memory>

#include "agentrec/eval/dataset.hpp"
#include "agentrec/runtime/crew.hpp"

namespace agentrec::eval {

using ProviderFactory = std::function<std::shared_ptr<llm::Provider>(const std::string& agent_id)>;

struct CollectOptions {
  runtime::RunOptions run;
  runtime::ClockFactory clock_factory;  // defaults to system clocks
  // Image paths in the dataset are relative to this directory.
  std::filesystem::path dataset_dir;
};

// Records whose agent fails are left out of the run, so evaluation reports
// them as missing. Results are keyed by record_id.
OutputRun collect_outputs(const std::vector<EvalRecord>& records, const std::string& model_id,
                          const runtime::AgentSet& agents, const ProviderFactory& providers,
                          const tools::ToolRegistry& registry, const CollectOptions& options);

}  // namespace agentrec::eval
