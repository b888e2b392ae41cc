#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "agentrec/agents/parse.hpp"
#include "agentrec/llm/http_provider.hpp"
#include "agentrec/profile/store.hpp"
#include "agentrec/runtime/crew.hpp"

namespace agentrec::agents {

// Tool allowlists of the three standard agents.
std::vector<std::string> standard_tools(std::string_view agent_id);

// Reads prompts/<agent_id>.txt for product, multimodal and market. Model ids
// come from `config` when given (GatewayConfig::for_agent), else "scripted".
runtime::AgentSet load_agents(const std::filesystem::path& prompts_dir,
                              const llm::GatewayConfig* config = nullptr,
                              int max_iterations = runtime::kDefaultMaxIterations);

// Parse, dedupe, profile re-rank. Throws kEmptyRecommendations when the
// output is not ok or yields no items.
std::vector<core::Recommendation> recommendations_from_output(
    const runtime::AgentOutput& output, const profile::UserProfile& profile,
    const profile::RerankWeights& weights = {});

struct ImageAnswer {
  std::string answer;
  std::vector<std::string> followups;  // at most kMaxFollowups
};

// Throws kEmptySummary when the output is not ok or the answer is blank.
ImageAnswer image_answer_from_output(const runtime::AgentOutput& output);

// Sources are the URLs of successful tool results, first use first.
// Throws kEmptySummary when the output is not ok or the answer is blank.
core::MarketReport market_report_from_output(const runtime::AgentOutput& output,
                                             std::string topic, Timestamp generated_at);

// Single-agent entry points. Each runs the agent loop once.
std::vector<core::Recommendation> recommend_products(
    const core::Query& query, const profile::UserProfile& profile, const runtime::AgentDef& agent,
    llm::Provider& provider, const tools::ToolRegistry& registry, Clock& clock,
    const std::vector<std::string>& context = {}, const runtime::RunOptions& options = {});

// Throws kCapabilityError for a text-only provider.
ImageAnswer answer_image_query(const core::ImageAttachment& image, const std::string& question,
                               const std::vector<std::string>& context,
                               const runtime::AgentDef& agent, llm::Provider& provider,
                               const tools::ToolRegistry& registry, Clock& clock,
                               const runtime::RunOptions& options = {});

core::MarketReport analyze_market(const std::string& topic, const runtime::AgentDef& agent,
                                  llm::Provider& provider, const tools::ToolRegistry& registry,
                                  Clock& clock, const runtime::RunOptions& options = {});

}  // namespace agentrec::agents
