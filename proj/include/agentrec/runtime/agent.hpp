#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "agentrec/core/domain.hpp"
#include "agentrec/llm/chat.hpp"
#include "agentrec/llm/gateway.hpp"
#include "agentrec/tools/registry.hpp"

namespace agentrec::runtime {

inline constexpr const char* kProductAgent = "product";
inline constexpr const char* kMultimodalAgent = "multimodal";
inline constexpr const char* kMarketAgent = "market";

inline constexpr int kDefaultMaxIterations = 15;
inline constexpr int kToolFailureThreshold = 3;

struct AgentDef {
  std::string agent_id;
  std::string role_prompt;
  std::vector<std::string> allowed_tools;
  std::string model_id;
  int max_iterations = kDefaultMaxIterations;
};

// Throws kInvalidArgument: empty id, max_iterations < 1, or a tool the
// registry does not know.
void validate(const AgentDef& agent, const tools::ToolRegistry& registry);

struct AgentTask {
  std::string task_id;
  std::string agent_id;
  std::string instruction;
  std::vector<std::string> context;
  std::vector<core::ImageAttachment> attachments;
};

struct ToolLogEntry {
  tools::ToolCall call;
  tools::ToolResult result;
};

enum class AgentStatus { kOk, kIterationLimit, kToolFailure, kModelFailure };

std::string_view to_string(AgentStatus s);
AgentStatus parse_agent_status(std::string_view s);

struct AgentOutput {
  std::string task_id;
  std::string agent_id;
  std::string answer;  // empty unless status == kOk
  std::vector<ToolLogEntry> tool_log;
  int model_calls = 0;
  Millis elapsed{0};
  AgentStatus status = AgentStatus::kOk;
  std::string error;  // last error text for non-ok statuses
  // Every message exchanged, in order, final assistant reply included.
  std::vector<llm::Message> transcript;
  std::vector<llm::CallTrace> calls;
};

struct RunOptions {
  llm::RetryPolicy retry;
  std::size_t max_content_chars = tools::kDefaultMaxContentChars;
  int tool_failure_threshold = kToolFailureThreshold;
  double temperature = llm::kDefaultTemperature;
  int max_tokens = llm::kDefaultMaxTokens;
};

// System prompt = role prompt + tool catalogue + call grammar.
std::string build_system_prompt(const AgentDef& agent, const tools::ToolRegistry& registry);
// User turn text = instruction followed by the context block.
std::string build_user_prompt(const AgentTask& task);

// Think/act/observe loop. Never throws for model or tool trouble; the
// outcome is reported in status.
AgentOutput run_agent(const AgentDef& agent, const AgentTask& task, llm::Provider& provider,
                      const tools::ToolRegistry& registry, Clock& clock,
                      const RunOptions& options = {});

nlohmann::json to_json(const AgentOutput& output);
// Traces reference images by size and digest instead of inlining the bytes.
nlohmann::json image_ref(const core::ImageAttachment& image);

}  // namespace agentrec::runtime
