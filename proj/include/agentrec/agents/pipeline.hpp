#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "agentrec/agents/agents.hpp"
#include "agentrec/llm/scripted.hpp"

namespace agentrec::agents {

// Supplies the providers for one turn. Live deployments hand out the same
// HTTP providers every time; offline replay picks a fresh script per query.
class ProviderSource {
 public:
  virtual ~ProviderSource() = default;
  virtual runtime::ProviderMap for_turn(const core::Query& query) = 0;
  virtual runtime::ProviderMap for_followup(const core::SessionTurn& origin,
                                            const core::FollowupQuestion& question) = 0;
};

class FixedProviders final : public ProviderSource {
 public:
  explicit FixedProviders(runtime::ProviderMap providers) : providers_(std::move(providers)) {}
  runtime::ProviderMap for_turn(const core::Query&) override { return providers_; }
  runtime::ProviderMap for_followup(const core::SessionTurn&, const core::FollowupQuestion&) override {
    return providers_;
  }

 private:
  runtime::ProviderMap providers_;
};

// One HTTP provider per standard agent, as configured.
runtime::ProviderMap make_live_providers(const llm::GatewayConfig& config,
                                         std::shared_ptr<net::HttpTransport> transport = {});

// A recorded three-agent session: query plus per-agent provider scripts.
//   {"name", "user_id"?, "query": {"text", "image"?: path, "caption"?},
//    "scripts": {agent_id: [entries]}, "followup_scripts": {agent_id: [entries]}}
// Image paths are relative to the scenario file.
struct Scenario {
  std::string name;
  std::string user_id = "demo";
  core::Query query;
  std::map<std::string, llm::ProviderScript> scripts;
  std::map<std::string, llm::ProviderScript> followup_scripts;
};

Scenario load_scenario(const std::filesystem::path& path);

// Scripted providers for one scenario phase; the multimodal agent's
// provider accepts images, the others do not.
runtime::ProviderMap scripted_providers(const std::map<std::string, llm::ProviderScript>& scripts);

// Offline provider source keyed by normalized query text. Throws kNoFixture
// for an unknown query.
class ScenarioLibrary final : public ProviderSource {
 public:
  explicit ScenarioLibrary(const std::filesystem::path& dir);
  explicit ScenarioLibrary(std::vector<Scenario> scenarios);

  runtime::ProviderMap for_turn(const core::Query& query) override;
  runtime::ProviderMap for_followup(const core::SessionTurn& origin,
                                    const core::FollowupQuestion& question) override;

  const Scenario* find(std::string_view query_text) const;
  const std::vector<Scenario>& scenarios() const { return scenarios_; }

 private:
  std::vector<Scenario> scenarios_;
};

struct PipelineConfig {
  runtime::AgentSet agents;
  runtime::CrewOptions crew;
  profile::RerankWeights weights;
  std::optional<std::filesystem::path> trace_dir;
};

// Binds the crew to sessions. Not internally synchronized: callers must
// serialize calls per session (the service holds a per-session lock).
class Pipeline {
 public:
  Pipeline(PipelineConfig config, const tools::ToolRegistry& registry, ProviderSource& providers,
           profile::ProfileStore* profiles, Clock& clock);

  // Plans, runs the crew and appends the assembled turn. Failed agents drop
  // their section; throws kAllAgentsFailed when nothing succeeded, leaving
  // the session untouched.
  core::SessionTurn run_turn(core::SessionState& session, core::Query query);

  // Throws kUnknownFollowup unless question_id is pending. On success the
  // question is marked answered and a refined recommendation turn appended.
  core::SessionTurn answer_followup(core::SessionState& session, const std::string& question_id,
                                    const std::string& user_answer);

  const runtime::CrewResult* last_crew() const { return last_crew_ ? &*last_crew_ : nullptr; }
  const PipelineConfig& config() const { return config_; }

 private:
  Timestamp next_timestamp(const core::SessionState& session, Timestamp requested) const;
  profile::UserProfile profile_for(const std::string& user_id) const;
  void record(const std::string& user_id, profile::EventKind kind, const std::string& payload,
              Timestamp at);
  runtime::CrewResult run(const runtime::TaskPlan& plan, const runtime::ProviderMap& providers,
                          const core::SessionState& session);

  PipelineConfig config_;
  const tools::ToolRegistry& registry_;
  ProviderSource& providers_;
  profile::ProfileStore* profiles_;
  Clock& clock_;
  std::optional<runtime::CrewResult> last_crew_;
};

}  // namespace agentrec::agents
