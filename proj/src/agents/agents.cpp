#include "agentrec/agents/agents.hpp"

#include <fstream>
#include <sstream>

#include "agentrec/error.hpp"
#include "agentrec/util/text.hpp"

namespace agentrec::agents {

using runtime::AgentOutput;
using runtime::AgentStatus;

std::vector<std::string> standard_tools(std::string_view agent_id) {
  if (agent_id == runtime::kMultimodalAgent) return {"web_search"};
  return {"web_search", "scrape"};
}

runtime::AgentSet load_agents(const std::filesystem::path& prompts_dir,
                              const llm::GatewayConfig* config, int max_iterations) {
  runtime::AgentSet out;
  for (const char* id : {runtime::kProductAgent, runtime::kMultimodalAgent, runtime::kMarketAgent}) {
    const auto path = prompts_dir / (std::string(id) + ".txt");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kInvalidArgument, "missing role prompt " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    runtime::AgentDef def;
    def.agent_id = id;
    def.role_prompt = ss.str();
    def.allowed_tools = standard_tools(id);
    def.model_id = config ? config->for_agent(id).model_id : "scripted";
    def.max_iterations = max_iterations;
    out.emplace(id, std::move(def));
  }
  return out;
}

namespace {

std::string status_note(const AgentOutput& o) {
  return o.agent_id + " agent ended with status " + std::string(to_string(o.status)) +
         (o.error.empty() ? "" : " (" + o.error + ")");
}

}  // namespace

std::vector<core::Recommendation> recommendations_from_output(const AgentOutput& output,
                                                              const profile::UserProfile& profile,
                                                              const profile::RerankWeights& weights) {
  if (output.status != AgentStatus::kOk) {
    throw Error(ErrorCode::kEmptyRecommendations, status_note(output));
  }
  const auto parsed = parse_recommendations(output.answer, output.agent_id, output.tool_log);
  if (parsed.items.empty()) {
    throw Error(ErrorCode::kEmptyRecommendations, "answer contains no numbered recommendations");
  }
  return profile::rerank_with_profile(core::dedupe_recommendations(parsed.items), profile, weights);
}

ImageAnswer image_answer_from_output(const AgentOutput& output) {
  if (output.status != AgentStatus::kOk) throw Error(ErrorCode::kEmptySummary, status_note(output));
  auto parsed = parse_followups(output.answer);
  if (parsed.answer.empty()) throw Error(ErrorCode::kEmptySummary, "image answer is blank");
  return {std::move(parsed.answer), std::move(parsed.questions)};
}

core::MarketReport market_report_from_output(const AgentOutput& output, std::string topic,
                                             Timestamp generated_at) {
  if (output.status != AgentStatus::kOk) throw Error(ErrorCode::kEmptySummary, status_note(output));
  const std::string summary = util::trim(output.answer);
  if (summary.empty()) throw Error(ErrorCode::kEmptySummary, "market summary is blank");
  std::vector<std::string> urls;
  for (const auto& e : output.tool_log) {
    if (!e.result.ok) continue;
    urls.insert(urls.end(), e.result.source_urls.begin(), e.result.source_urls.end());
  }
  return core::MarketReport{std::move(topic), summary, core::dedupe_strings(urls), generated_at};
}

std::vector<core::Recommendation> recommend_products(
    const core::Query& query, const profile::UserProfile& profile, const runtime::AgentDef& agent,
    llm::Provider& provider, const tools::ToolRegistry& registry, Clock& clock,
    const std::vector<std::string>& context, const runtime::RunOptions& options) {
  if (util::trim(query.text).empty()) {
    throw Error(ErrorCode::kEmptyQuery, "recommend_products needs query text");
  }
  runtime::AgentTask task{"t1", agent.agent_id,
                          "Recommend products for this shopper request: " + util::trim(query.text),
                          context, {}};
  return recommendations_from_output(runtime::run_agent(agent, task, provider, registry, clock, options),
                                     profile);
}

ImageAnswer answer_image_query(const core::ImageAttachment& image, const std::string& question,
                               const std::vector<std::string>& context,
                               const runtime::AgentDef& agent, llm::Provider& provider,
                               const tools::ToolRegistry& registry, Clock& clock,
                               const runtime::RunOptions& options) {
  if (!provider.supports_multimodal()) {
    throw Error(ErrorCode::kCapabilityError,
                "provider '" + provider.name() + "' cannot take image input");
  }
  core::validate_image(image);
  runtime::AgentTask task{"t1", agent.agent_id,
                          "Answer the shopper's question about the attached image: " +
                              (util::trim(question).empty() ? std::string("What is this product?")
                                                            : util::trim(question)),
                          context, {image}};
  return image_answer_from_output(runtime::run_agent(agent, task, provider, registry, clock, options));
}

core::MarketReport analyze_market(const std::string& topic, const runtime::AgentDef& agent,
                                  llm::Provider& provider, const tools::ToolRegistry& registry,
                                  Clock& clock, const runtime::RunOptions& options) {
  if (util::trim(topic).empty()) throw Error(ErrorCode::kInvalidArgument, "market topic is empty");
  runtime::AgentTask task{"t1", agent.agent_id,
                          "Analyze recent market trends relevant to: " + util::trim(topic), {}, {}};
  const Timestamp start = clock.now();
  return market_report_from_output(
      runtime::run_agent(agent, task, provider, registry, clock, options), util::trim(topic), start);
}

}  // namespace agentrec::agents
