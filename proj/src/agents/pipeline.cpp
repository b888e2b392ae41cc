#include "agentrec/agents/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "agentrec/error.hpp"
#include "agentrec/util/text.hpp"

namespace agentrec::agents {

using nlohmann::json;
namespace fs = std::filesystem;

runtime::ProviderMap make_live_providers(const llm::GatewayConfig& config,
                                         std::shared_ptr<net::HttpTransport> transport) {
  runtime::ProviderMap out;
  for (const char* id : {runtime::kProductAgent, runtime::kMultimodalAgent, runtime::kMarketAgent}) {
    out[id] = llm::make_http_provider(config.for_agent(id), transport);
  }
  return out;
}

namespace {

std::vector<std::uint8_t> read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot read " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::map<std::string, llm::ProviderScript> scripts_from(const json& j) {
  std::map<std::string, llm::ProviderScript> out;
  if (j.is_null()) return out;
  for (const auto& [agent, entries] : j.items()) out[agent] = llm::script_from_json(entries);
  return out;
}

}  // namespace

Scenario load_scenario(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot read scenario " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    const json j = json::parse(ss.str());
    Scenario s;
    s.name = j.value("name", path.stem().string());
    s.user_id = j.value("user_id", "demo");
    const json& q = j.at("query");
    s.query.text = q.value("text", "");
    if (q.contains("image") && !q["image"].is_null()) {
      core::ImageAttachment img;
      img.bytes = read_bytes(path.parent_path() / q["image"].get<std::string>());
      const auto sniffed = core::sniff_media_type(img.bytes);
      if (!sniffed) throw Error(ErrorCode::kUnsupportedMedia, "scenario image is not png/jpeg/webp");
      img.media_type = *sniffed;
      if (q.contains("caption")) img.caption = q["caption"].get<std::string>();
      s.query.image = std::move(img);
    }
    s.scripts = scripts_from(j.at("scripts"));
    s.followup_scripts = scripts_from(j.value("followup_scripts", json()));
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, "bad scenario " + path.string() + ": " + e.what());
  }
}

runtime::ProviderMap scripted_providers(const std::map<std::string, llm::ProviderScript>& scripts) {
  runtime::ProviderMap out;
  for (const auto& [agent, script] : scripts) {
    out[agent] = llm::make_scripted_provider(script, agent == runtime::kMultimodalAgent,
                                             "scripted-" + agent);
  }
  return out;
}

ScenarioLibrary::ScenarioLibrary(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) scenarios_.push_back(load_scenario(f));
}

ScenarioLibrary::ScenarioLibrary(std::vector<Scenario> scenarios) : scenarios_(std::move(scenarios)) {}

const Scenario* ScenarioLibrary::find(std::string_view query_text) const {
  const std::string key = util::normalize_key(query_text);
  for (const auto& s : scenarios_) {
    if (util::normalize_key(s.query.text) == key) return &s;
  }
  return nullptr;
}

runtime::ProviderMap ScenarioLibrary::for_turn(const core::Query& query) {
  const Scenario* s = find(query.text);
  if (!s) {
    throw Error(ErrorCode::kNoFixture,
                "no recorded scenario for query '" + util::normalize_key(query.text) + "'");
  }
  return scripted_providers(s->scripts);
}

runtime::ProviderMap ScenarioLibrary::for_followup(const core::SessionTurn& origin,
                                                   const core::FollowupQuestion&) {
  const Scenario* s = find(origin.query.text);
  if (!s || s->followup_scripts.empty()) {
    throw Error(ErrorCode::kNoFixture, "no recorded follow-up script for query '" +
                                           util::normalize_key(origin.query.text) + "'");
  }
  return scripted_providers(s->followup_scripts);
}

Pipeline::Pipeline(PipelineConfig config, const tools::ToolRegistry& registry,
                   ProviderSource& providers, profile::ProfileStore* profiles, Clock& clock)
    : config_(std::move(config)),
      registry_(registry),
      providers_(providers),
      profiles_(profiles),
      clock_(clock) {
  for (const auto& [id, def] : config_.agents) runtime::validate(def, registry_);
}

Timestamp Pipeline::next_timestamp(const core::SessionState& session, Timestamp requested) const {
  Timestamp t = requested == Timestamp{} ? clock_.now() : requested;
  if (!session.turns.empty()) {
    const Timestamp floor = session.turns.back().query.timestamp + Millis{1};
    if (t < floor) t = floor;
  }
  return t;
}

profile::UserProfile Pipeline::profile_for(const std::string& user_id) const {
  if (profiles_ && profile::is_valid_user_id(user_id)) {
    if (auto p = profiles_->get(user_id)) return *p;
  }
  return profile::UserProfile{user_id};
}

void Pipeline::record(const std::string& user_id, profile::EventKind kind,
                      const std::string& payload, Timestamp at) {
  if (!profiles_ || !profile::is_valid_user_id(user_id)) return;
  try {
    profiles_->record_interaction(user_id, {kind, payload, at});
  } catch (const Error& e) {
    // The interaction log is best effort: unknown users and events older
    // than the stored history must not fail a finished turn.
    if (e.code() != ErrorCode::kUnknownUser && e.code() != ErrorCode::kInvalidArgument) throw;
  }
}

runtime::CrewResult Pipeline::run(const runtime::TaskPlan& plan,
                                  const runtime::ProviderMap& providers,
                                  const core::SessionState& session) {
  runtime::CrewOptions opts = config_.crew;
  opts.trace_salt = session.session_id + "#" + std::to_string(session.turns.size());
  auto crew = runtime::run_crew(plan, config_.agents, providers, registry_, opts);
  if (config_.trace_dir) runtime::write_trace(*config_.trace_dir, crew);
  last_crew_ = crew;
  return crew;
}

namespace {

std::string failure_summary(const runtime::CrewResult& crew) {
  std::string out;
  for (const auto* o : crew.ordered()) {
    if (!out.empty()) out += "; ";
    out += o->agent_id + "=" + std::string(to_string(o->status));
    if (o->status == runtime::AgentStatus::kOk) out += " (unusable answer)";
  }
  return out.empty() ? "no agents ran" : out;
}

bool soft_failure(const Error& e) {
  return e.code() == ErrorCode::kEmptyRecommendations || e.code() == ErrorCode::kEmptySummary;
}

}  // namespace

core::SessionTurn Pipeline::run_turn(core::SessionState& session, core::Query query) {
  query = core::validate_query(query.text, std::move(query.image), session.session_id,
                               next_timestamp(session, query.timestamp));
  const auto providers = providers_.for_turn(query);
  const auto plan = runtime::plan_tasks(query, config_.agents);
  const auto crew = run(plan, providers, session);

  core::SessionTurn turn;
  turn.query = query;
  turn.trace_id = crew.trace_id;
  std::vector<std::string> followups;

  if (const auto* o = crew.find_agent(runtime::kProductAgent)) {
    try {
      turn.recommendations = recommendations_from_output(*o, profile_for(session.user_id), config_.weights);
    } catch (const Error& e) {
      if (!soft_failure(e)) throw;
    }
  }
  if (const auto* o = crew.find_agent(runtime::kMultimodalAgent)) {
    try {
      auto ia = image_answer_from_output(*o);
      turn.image_answer = std::move(ia.answer);
      followups = std::move(ia.followups);
    } catch (const Error& e) {
      if (!soft_failure(e)) throw;
    }
  }
  if (const auto* o = crew.find_agent(runtime::kMarketAgent)) {
    std::string topic = util::trim(query.text);
    if (topic.empty()) topic = "product category of the uploaded image";
    try {
      turn.market_report = market_report_from_output(*o, topic, query.timestamp);
    } catch (const Error& e) {
      if (!soft_failure(e)) throw;
    }
  }
  if (!turn.has_content()) {
    throw Error(ErrorCode::kAllAgentsFailed, "every agent failed: " + failure_summary(crew));
  }

  const std::string turn_tag = "t" + std::to_string(session.turns.size() + 1);
  session.append_turn(turn);
  for (std::size_t i = 0; i < followups.size(); ++i) {
    session.pending_followups.push_back(
        {turn_tag + "q" + std::to_string(i + 1), followups[i], false, std::nullopt});
  }
  record(session.user_id, profile::EventKind::kQuery,
         query.text.empty() ? std::string("[image]") : query.text, query.timestamp);
  return turn;
}

core::SessionTurn Pipeline::answer_followup(core::SessionState& session,
                                            const std::string& question_id,
                                            const std::string& user_answer) {
  auto it = std::find_if(session.pending_followups.begin(), session.pending_followups.end(),
                         [&](const core::FollowupQuestion& q) {
                           return q.question_id == question_id && !q.answered;
                         });
  if (it == session.pending_followups.end()) {
    throw Error(ErrorCode::kUnknownFollowup, "no pending follow-up '" + question_id + "'");
  }
  const core::Query query = core::validate_query(user_answer, std::nullopt, session.session_id,
                                                 next_timestamp(session, Timestamp{}));

  // Question ids are "t<turn>q<n>"; fall back to the latest turn.
  int turn_no = 0;
  int q_no = 0;
  std::size_t origin_idx = session.turns.empty() ? 0 : session.turns.size() - 1;
  if (std::sscanf(question_id.c_str(), "t%dq%d", &turn_no, &q_no) == 2 && turn_no >= 1 &&
      static_cast<std::size_t>(turn_no) <= session.turns.size()) {
    origin_idx = static_cast<std::size_t>(turn_no - 1);
  }
  if (session.turns.empty()) {
    throw Error(ErrorCode::kUnknownFollowup, "follow-up '" + question_id + "' has no turn");
  }
  const core::SessionTurn& origin = session.turns[origin_idx];
  const auto providers = providers_.for_followup(origin, *it);

  runtime::AgentTask task;
  task.task_id = "t1";
  task.agent_id = runtime::kProductAgent;
  const std::string request = util::trim(origin.query.text);
  task.instruction =
      "Refine the product recommendations for this shopper request: " +
      (request.empty() ? std::string("the product shown in the earlier image") : request);
  if (origin.image_answer) task.context.push_back(*origin.image_answer);
  task.context.push_back("Follow-up question: " + it->text);
  task.context.push_back("User answer: " + query.text);
  runtime::TaskPlan plan;
  plan.stages.push_back({task});
  const auto crew = run(plan, providers, session);

  core::SessionTurn turn;
  turn.query = query;
  turn.trace_id = crew.trace_id;
  try {
    turn.recommendations = recommendations_from_output(
        crew.outputs.at("t1"), profile_for(session.user_id), config_.weights);
  } catch (const Error& e) {
    if (!soft_failure(e)) throw;
    throw Error(ErrorCode::kAllAgentsFailed, "refinement failed: " + failure_summary(crew));
  }

  session.append_turn(turn);
  it->answered = true;
  it->answer = query.text;
  record(session.user_id, profile::EventKind::kFollowupAnswer, query.text, query.timestamp);
  return turn;
}

}  // namespace agentrec::agents
