#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "agentrec/runtime/agent.hpp"

namespace agentrec::runtime {

using AgentSet = std::map<std::string, AgentDef>;
using ProviderMap = std::map<std::string, std::shared_ptr<llm::Provider>>;

// Phrases that send a text query to the market agent. Single words match as
// token prefixes ("trend" matches "trends", "trending").
const std::vector<std::string>& trend_lexicon();

// Image -> multimodal; trend phrase -> market; otherwise product.
// Throws kInvalidArgument unless all three standard agents are present.
std::string route_task(const core::Query& query, const AgentSet& agents);

struct TaskPlan {
  // Tasks within a stage are independent; stage k+1 consumes stage k.
  std::vector<std::vector<AgentTask>> stages;

  std::size_t task_count() const;
};

// Throws kInvalidArgument on duplicate task ids or empty instructions.
void validate(const TaskPlan& plan);

// Image goal: product -> multimodal -> market, one task per stage.
// Text goal: a single stage {product, market}; aggregation follows the
// last stage inside run_crew. Agents absent from `agents` are left out.
// Throws kInvalidArgument when `agents` is empty.
TaskPlan plan_tasks(const core::Query& goal, const AgentSet& agents);

enum class CrewMode { kSequential, kConcurrent };

using ClockFactory = std::function<std::unique_ptr<Clock>(const AgentTask&)>;

// Fresh ManualClock at the epoch for every task. Makes traces reproducible.
ClockFactory manual_clock_factory();
ClockFactory system_clock_factory();

struct CrewOptions {
  CrewMode mode = CrewMode::kConcurrent;
  RunOptions run;
  ClockFactory clock_factory;  // defaults to system clocks
  // Mixed into the trace id so repeated identical plans get distinct files.
  std::string trace_salt;
};

struct CrewResult {
  std::map<std::string, AgentOutput> outputs;
  // Output task ids in plan order.
  std::vector<std::string> order;
  std::string final_answer;
  std::string trace_id;
  nlohmann::json trace;

  // Outputs in plan order.
  std::vector<const AgentOutput*> ordered() const;
  const AgentOutput* find_agent(std::string_view agent_id) const;
};

// Section header for an agent's part of the aggregate answer.
std::string section_title(std::string_view agent_id);

// Ok answers under fixed headers in order; failed tasks become a one-line
// notice naming the status.
std::string aggregate(const std::vector<const AgentOutput*>& outputs);
std::string aggregate(const std::vector<AgentOutput>& outputs);

// Missing agent defs are a precondition violation (kInvalidArgument); a
// missing provider is reported as model_failure for that task.
CrewResult run_crew(const TaskPlan& plan, const AgentSet& agents, const ProviderMap& providers,
                    const tools::ToolRegistry& registry, const CrewOptions& options = {});

// traces/<trace_id>.json, pretty printed with sorted keys.
std::filesystem::path write_trace(const std::filesystem::path& dir, const CrewResult& result);

}  // namespace agentrec::runtime
