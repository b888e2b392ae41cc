#include "agentrec/runtime/crew.hpp"

#include <future>
#include <set>

#include "agentrec/error.hpp"
#include "agentrec/metrics/ranking.hpp"
#include "agentrec/util/digest.hpp"
#include "agentrec/util/fs.hpp"
#include "agentrec/util/text.hpp"

namespace agentrec::runtime {

using nlohmann::json;

const std::vector<std::string>& trend_lexicon() {
  static const std::vector<std::string> kLexicon = {
      "trend",        "market",      "popular now", "what's popular", "what is popular",
      "best selling", "best-selling", "bestsell",   "hot right now",  "in demand"};
  return kLexicon;
}

namespace {

bool matches_phrase(const std::vector<std::string>& tokens, const std::vector<std::string>& phrase) {
  if (phrase.empty() || phrase.size() > tokens.size()) return false;
  for (std::size_t i = 0; i + phrase.size() <= tokens.size(); ++i) {
    bool ok = true;
    for (std::size_t j = 0; j < phrase.size() && ok; ++j) {
      // Last word matches as a prefix, earlier words exactly.
      ok = j + 1 == phrase.size() ? tokens[i + j].rfind(phrase[j], 0) == 0
                                  : tokens[i + j] == phrase[j];
    }
    if (ok) return true;
  }
  return false;
}

void require_standard_agents(const AgentSet& agents) {
  for (const char* id : {kProductAgent, kMultimodalAgent, kMarketAgent}) {
    if (!agents.count(id)) {
      throw Error(ErrorCode::kInvalidArgument, std::string("missing standard agent: ") + id);
    }
  }
}

}  // namespace

std::string route_task(const core::Query& query, const AgentSet& agents) {
  require_standard_agents(agents);
  if (query.image) return kMultimodalAgent;
  const auto tokens = metrics::tokenize(query.text);
  for (const auto& phrase : trend_lexicon()) {
    if (matches_phrase(tokens, metrics::tokenize(phrase))) return kMarketAgent;
  }
  return kProductAgent;
}

std::size_t TaskPlan::task_count() const {
  std::size_t n = 0;
  for (const auto& s : stages) n += s.size();
  return n;
}

void validate(const TaskPlan& plan) {
  std::set<std::string> ids;
  for (const auto& stage : plan.stages) {
    for (const auto& t : stage) {
      if (t.task_id.empty() || !ids.insert(t.task_id).second) {
        throw Error(ErrorCode::kInvalidArgument, "duplicate or empty task id: " + t.task_id);
      }
      if (util::trim(t.instruction).empty()) {
        throw Error(ErrorCode::kInvalidArgument, "task " + t.task_id + " has no instruction");
      }
    }
  }
}

namespace {

std::string product_instruction(const core::Query& q) {
  if (!util::trim(q.text).empty()) {
    return "Recommend products for this shopper request: " + util::trim(q.text);
  }
  return "The shopper sent a product photo without any text. Recommend products in the "
         "category shown, using the image insights in the context when present.";
}

std::string image_instruction(const core::Query& q) {
  std::string question = util::trim(q.text);
  if (question.empty()) question = "What is this product, and where can I find similar ones?";
  std::string out = "Answer the shopper's question about the attached image: " + question;
  if (q.image && q.image->caption) out += "\nImage caption: " + *q.image->caption;
  return out;
}

std::string market_instruction(const core::Query& q) {
  const std::string topic = util::trim(q.text);
  if (topic.empty()) {
    return "Analyze recent market trends for the product category identified in the context.";
  }
  return "Analyze recent market trends relevant to: " + topic;
}

}  // namespace

TaskPlan plan_tasks(const core::Query& goal, const AgentSet& agents) {
  if (agents.empty()) throw Error(ErrorCode::kInvalidArgument, "plan_tasks needs agents");
  TaskPlan plan;
  int next_id = 1;
  auto make = [&](const char* agent_id, std::string instruction) {
    AgentTask t;
    t.task_id = "t" + std::to_string(next_id++);
    t.agent_id = agent_id;
    t.instruction = std::move(instruction);
    return t;
  };
  if (goal.image) {
    if (agents.count(kProductAgent)) plan.stages.push_back({make(kProductAgent, product_instruction(goal))});
    if (agents.count(kMultimodalAgent)) {
      AgentTask t = make(kMultimodalAgent, image_instruction(goal));
      t.attachments.push_back(*goal.image);
      plan.stages.push_back({std::move(t)});
    }
    if (agents.count(kMarketAgent)) plan.stages.push_back({make(kMarketAgent, market_instruction(goal))});
  } else {
    std::vector<AgentTask> stage;
    if (agents.count(kProductAgent)) stage.push_back(make(kProductAgent, product_instruction(goal)));
    if (agents.count(kMarketAgent)) stage.push_back(make(kMarketAgent, market_instruction(goal)));
    if (!stage.empty()) plan.stages.push_back(std::move(stage));
  }
  return plan;
}

ClockFactory manual_clock_factory() {
  return [](const AgentTask&) { return std::make_unique<ManualClock>(); };
}

ClockFactory system_clock_factory() {
  return [](const AgentTask&) { return std::make_unique<SystemClock>(); };
}

std::vector<const AgentOutput*> CrewResult::ordered() const {
  std::vector<const AgentOutput*> out;
  for (const auto& id : order) out.push_back(&outputs.at(id));
  return out;
}

const AgentOutput* CrewResult::find_agent(std::string_view agent_id) const {
  for (const auto& id : order) {
    const auto& o = outputs.at(id);
    if (o.agent_id == agent_id) return &o;
  }
  return nullptr;
}

std::string section_title(std::string_view agent_id) {
  if (agent_id == kProductAgent) return "Recommendations";
  if (agent_id == kMultimodalAgent) return "Image Insights";
  if (agent_id == kMarketAgent) return "Market Trends";
  return std::string(agent_id);
}

std::string aggregate(const std::vector<const AgentOutput*>& outputs) {
  std::string out;
  for (const auto* o : outputs) {
    if (!out.empty()) out += "\n\n";
    out += "## " + section_title(o->agent_id) + "\n";
    if (o->status == AgentStatus::kOk) {
      out += o->answer;
    } else {
      out += "[unavailable: " + std::string(to_string(o->status)) + "]";
    }
  }
  return out;
}

std::string aggregate(const std::vector<AgentOutput>& outputs) {
  std::vector<const AgentOutput*> ptrs;
  for (const auto& o : outputs) ptrs.push_back(&o);
  return aggregate(ptrs);
}

namespace {

json task_to_json(const AgentTask& t) {
  json atts = json::array();
  for (const auto& a : t.attachments) atts.push_back(image_ref(a));
  return json{{"task_id", t.task_id},
              {"agent_id", t.agent_id},
              {"instruction", t.instruction},
              {"context", t.context},
              {"attachments", atts}};
}

json agents_to_json(const TaskPlan& plan, const AgentSet& agents) {
  json out = json::object();
  for (const auto& stage : plan.stages) {
    for (const auto& t : stage) {
      const AgentDef& a = agents.at(t.agent_id);
      out[a.agent_id] = json{{"model_id", a.model_id},
                             {"max_iterations", a.max_iterations},
                             {"allowed_tools", a.allowed_tools},
                             {"prompt_sha256", util::sha256_hex(a.role_prompt)}};
    }
  }
  return out;
}

AgentOutput missing_provider(const AgentTask& task) {
  AgentOutput o;
  o.task_id = task.task_id;
  o.agent_id = task.agent_id;
  o.status = AgentStatus::kModelFailure;
  o.error = "TransportError: no provider configured for agent '" + task.agent_id + "'";
  return o;
}

}  // namespace

CrewResult run_crew(const TaskPlan& plan, const AgentSet& agents, const ProviderMap& providers,
                    const tools::ToolRegistry& registry, const CrewOptions& options) {
  validate(plan);
  for (const auto& stage : plan.stages) {
    for (const auto& t : stage) {
      if (!agents.count(t.agent_id)) {
        throw Error(ErrorCode::kInvalidArgument, "no agent definition for '" + t.agent_id + "'");
      }
    }
  }
  const ClockFactory clocks = options.clock_factory ? options.clock_factory : system_clock_factory();

  json plan_json = json::array();
  for (const auto& stage : plan.stages) {
    json s = json::array();
    for (const auto& t : stage) s.push_back(task_to_json(t));
    plan_json.push_back(s);
  }
  const json agents_json = agents_to_json(plan, agents);

  CrewResult result;
  result.trace_id =
      util::sha256_hex(json{{"salt", options.trace_salt}, {"plan", plan_json}, {"agents", agents_json}}
                           .dump())
          .substr(0, 16);

  std::vector<std::string> carried;  // ok answers of the previous stage
  json executed = json::array();
  for (const auto& stage : plan.stages) {
    std::vector<AgentTask> tasks = stage;
    for (auto& t : tasks) t.context.insert(t.context.end(), carried.begin(), carried.end());

    auto run_one = [&](const AgentTask& t) {
      auto it = providers.find(t.agent_id);
      if (it == providers.end() || !it->second) return missing_provider(t);
      auto clock = clocks(t);
      return run_agent(agents.at(t.agent_id), t, *it->second, registry, *clock, options.run);
    };

    std::vector<AgentOutput> outs;
    if (options.mode == CrewMode::kConcurrent && tasks.size() > 1) {
      std::vector<std::future<AgentOutput>> futures;
      for (const auto& t : tasks) futures.push_back(std::async(std::launch::async, run_one, std::cref(t)));
      for (auto& f : futures) outs.push_back(f.get());
    } else {
      for (const auto& t : tasks) outs.push_back(run_one(t));
    }

    carried.clear();
    json s = json::array();
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      s.push_back(task_to_json(tasks[i]));
      if (outs[i].status == AgentStatus::kOk) carried.push_back(outs[i].answer);
      result.order.push_back(outs[i].task_id);
      result.outputs.emplace(outs[i].task_id, std::move(outs[i]));
    }
    executed.push_back(s);
  }
  result.final_answer = aggregate(result.ordered());

  json outputs_json = json::array();
  for (const auto* o : result.ordered()) outputs_json.push_back(to_json(*o));
  result.trace = json{{"format", "agentrec-trace/1"},
                      {"trace_id", result.trace_id},
                      {"plan", plan_json},
                      {"executed_tasks", executed},
                      {"agents", agents_json},
                      {"outputs", outputs_json},
                      {"final_answer", result.final_answer}};
  return result;
}

std::filesystem::path write_trace(const std::filesystem::path& dir, const CrewResult& result) {
  const auto path = dir / (result.trace_id + ".json");
  util::write_file_atomic(path, result.trace.dump(2) + "\n");
  return path;
}

}  // namespace agentrec::runtime
