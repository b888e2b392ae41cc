#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "agentrec/error.hpp"
#include "agentrec/runtime/crew.hpp"
#include "support/crew_fixture.hpp"
#include "support/images.hpp"

using namespace agentrec;
using namespace agentrec::runtime;
using crewfix::script;
using crewfix::search_call;

namespace {

AgentOutput run_script(const AgentDef& agent, const std::vector<std::string>& replies,
                       const tools::ToolRegistry& registry, AgentTask task = {}) {
  auto provider = llm::make_scripted_provider(script(replies));
  if (task.task_id.empty()) task = AgentTask{"t1", agent.agent_id, "find shoes", {}, {}};
  ManualClock clock;
  return run_agent(agent, task, *provider, registry, clock);
}

std::string read_all(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("route_task rule table") {
  const auto agents = crewfix::standard_agents();
  CHECK(route_task({"recommend running shoes under $100", {}, "", {}}, agents) == "product");
  CHECK(route_task({"what is this?", testimg::png(), "", {}}, agents) == "multimodal");
  CHECK(route_task({"current trends in smartwatches", {}, "", {}}, agents) == "market");
  CHECK(route_task({"What's popular now in headphones", {}, "", {}}, agents) == "market");
  CHECK(route_task({"Market overview: e-bikes", {}, "", {}}, agents) == "market");
  CHECK(route_task({"trendy sneakers", {}, "", {}}, agents) == "market");
  CHECK(route_task({"cheap popular sneakers", {}, "", {}}, agents) == "product");

  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    std::string text;
    for (int w = 0; w < 6; ++w) text += std::string(1, static_cast<char>('a' + rng() % 26)) + "rend ";
    const core::Query q{text, {}, "", {}};
    CHECK(route_task(q, agents) == route_task(q, agents));
  }

  AgentSet partial = agents;
  partial.erase("market");
  CHECK_THROWS_AS(route_task({"x", {}, "", {}}, partial), Error);
}

TEST_CASE("run_agent: tool call then final answer") {
  crewfix::ToolWorld world;
  const auto agents = crewfix::standard_agents();
  const auto out =
      run_script(agents.at("product"), {search_call("best running shoes"), "Buy X"}, world.registry);
  CHECK(out.status == AgentStatus::kOk);
  CHECK(out.model_calls == 2);
  REQUIRE(out.tool_log.size() == 1);
  CHECK(out.tool_log[0].result.ok);
  CHECK(out.tool_log[0].result.source_urls.size() == 3);
  CHECK(out.answer == "Buy X");
  // system, user, assistant, tool, assistant
  REQUIRE(out.transcript.size() == 5);
  CHECK(out.transcript[3].role == llm::Role::kTool);
  CHECK(out.transcript[3].joined_text().find("Shoe 1") != std::string::npos);
  CHECK(world.transport->calls == 0);
}

TEST_CASE("run_agent: prose-only reply means no tool invocation") {
  crewfix::ToolWorld world;
  const auto out = run_script(crewfix::standard_agents().at("product"),
                              {"I think the best product is X."}, world.registry);
  CHECK(out.status == AgentStatus::kOk);
  CHECK(out.tool_log.empty());
  CHECK(out.model_calls == 1);
  CHECK(out.answer == "I think the best product is X.");
}

TEST_CASE("run_agent: iteration limit is exact for adversarial scripts") {
  crewfix::ToolWorld world;
  for (int max_it : {1, 5, 15}) {
    auto agent = crewfix::standard_agents(max_it).at("product");
    std::vector<std::string> forever(50, search_call("best running shoes"));
    const auto out = run_script(agent, forever, world.registry);
    CHECK(out.status == AgentStatus::kIterationLimit);
    CHECK(out.model_calls == max_it);
    CHECK(out.tool_log.size() == static_cast<std::size_t>(max_it));
  }
}

TEST_CASE("run_agent: model_calls never exceeds max_iterations") {
  crewfix::ToolWorld world;
  std::mt19937_64 rng(11);
  const std::vector<std::string> moves = {search_call("best running shoes"),
                                          crewfix::scrape_call("https://shop.example/shoe1"),
                                          search_call("unknown query"),
                                          "ACTION: teleport\nARGS: {}",
                                          "final answer"};
  for (int iter = 0; iter < 300; ++iter) {
    const int max_it = 1 + static_cast<int>(rng() % 20);
    std::vector<std::string> replies;
    for (int i = 0; i < 25; ++i) replies.push_back(moves[rng() % moves.size()]);
    const auto out = run_script(crewfix::standard_agents(max_it).at("market"), replies, world.registry);
    CHECK(out.model_calls <= max_it);
    CHECK(out.model_calls >= 1);
    if (out.status == AgentStatus::kOk) CHECK(out.answer == "final answer");
  }
}

TEST_CASE("run_agent: three consecutive tool errors end the run") {
  crewfix::ToolWorld world;
  const auto agent = crewfix::standard_agents().at("product");
  auto out = run_script(agent,
                        {search_call("nope 1"), search_call("nope 2"), search_call("nope 3"), "done"},
                        world.registry);
  CHECK(out.status == AgentStatus::kToolFailure);
  CHECK(out.model_calls == 3);
  CHECK(out.answer.empty());
  CHECK(out.error.rfind("NoFixture", 0) == 0);

  // A success in between resets the count.
  out = run_script(agent,
                   {search_call("nope"), search_call("nope"), search_call("best running shoes"),
                    search_call("nope"), "ACTION: teleport\nARGS: {}", "done"},
                   world.registry);
  CHECK(out.status == AgentStatus::kOk);
  CHECK(out.model_calls == 6);
  CHECK(out.tool_log.size() == 4);  // the unknown tool never ran
}

TEST_CASE("run_agent: tools outside the allowlist are refused") {
  crewfix::ToolWorld world;
  const auto agent = crewfix::standard_agents().at("multimodal");  // web_search only
  const auto out = run_script(agent, {crewfix::scrape_call("https://shop.example/shoe1"), "ok"},
                              world.registry);
  CHECK(out.status == AgentStatus::kOk);
  REQUIRE(out.tool_log.size() == 1);
  CHECK_FALSE(out.tool_log[0].result.ok);
  CHECK(out.tool_log[0].result.content.rfind("NotAllowed", 0) == 0);
}

TEST_CASE("run_agent: gateway failures become model_failure") {
  crewfix::ToolWorld world;
  const auto agent = crewfix::standard_agents().at("product");
  llm::ProviderScript s;
  for (int i = 0; i < 5; ++i) s.entries.push_back(llm::rate_limit());
  auto provider = llm::make_scripted_provider(s);
  ManualClock clock;
  RunOptions opts;
  opts.retry.max_attempts = 3;
  const auto out =
      run_agent(agent, {"t1", "product", "x", {}, {}}, *provider, world.registry, clock, opts);
  CHECK(out.status == AgentStatus::kModelFailure);
  CHECK(out.error.rfind("RateLimited", 0) == 0);
  REQUIRE(out.calls.size() == 1);
  CHECK(out.calls[0].attempts == 3);

  // Image task on a text-only provider.
  auto text_only = llm::make_scripted_provider(script({"x"}));
  const auto img = run_agent(crewfix::standard_agents().at("multimodal"),
                             {"t1", "multimodal", "what is it", {}, {testimg::png()}}, *text_only,
                             world.registry, clock);
  CHECK(img.status == AgentStatus::kModelFailure);
  CHECK(img.error.rfind("CapabilityError", 0) == 0);
  CHECK(text_only->calls() == 0);
}

TEST_CASE("run_agent: prompts carry role, tools, instruction and context") {
  crewfix::ToolWorld world;
  const auto agent = crewfix::standard_agents().at("market");
  auto provider = llm::make_scripted_provider(script({"fine"}));
  ManualClock clock;
  run_agent(agent, {"t9", "market", "smartwatches", {"prior answer A", "prior answer B"}, {}},
            *provider, world.registry, clock);
  const auto req = provider->requests().at(0);
  const std::string sys = req.messages[0].joined_text();
  CHECK(sys.rfind("You analyze market trends.", 0) == 0);
  CHECK(sys.find("- web_search(k: int?, query: string)") != std::string::npos);
  CHECK(sys.find("ACTION: <tool name>") != std::string::npos);
  const std::string user = req.messages[1].joined_text();
  CHECK(user == "smartwatches\n\nContext from earlier agents:\n[1] prior answer A\n[2] prior answer B");
  REQUIRE(req.tool_specs);
  CHECK(req.tool_specs->size() == 2);
}

TEST_CASE("plan_tasks shapes") {
  const auto agents = crewfix::standard_agents();
  const auto img = plan_tasks({"", testimg::png(), "", {}}, agents);
  REQUIRE(img.stages.size() == 3);
  CHECK(img.stages[0].at(0).agent_id == "product");
  CHECK(img.stages[1].at(0).agent_id == "multimodal");
  CHECK(img.stages[1].at(0).attachments.size() == 1);
  CHECK(img.stages[2].at(0).agent_id == "market");
  for (const auto& s : img.stages) CHECK(s.size() == 1);

  const auto text = plan_tasks({"running shoes", {}, "", {}}, agents);
  REQUIRE(text.stages.size() == 1);
  REQUIRE(text.stages[0].size() == 2);
  CHECK(text.stages[0][0].agent_id == "product");
  CHECK(text.stages[0][1].agent_id == "market");
  CHECK(text.stages[0][0].task_id == "t1");
  CHECK(text.stages[0][1].task_id == "t2");

  CHECK_THROWS_AS(plan_tasks({"x", {}, "", {}}, AgentSet{}), Error);
}

TEST_CASE("aggregate examples") {
  auto out = [](const char* agent, AgentStatus st, std::string answer) {
    AgentOutput o;
    o.agent_id = agent;
    o.status = st;
    o.answer = std::move(answer);
    return o;
  };
  CHECK(aggregate(std::vector<AgentOutput>{}) == "");
  CHECK(aggregate(std::vector<AgentOutput>{out("product", AgentStatus::kOk, "A"),
                                           out("multimodal", AgentStatus::kOk, "B"),
                                           out("market", AgentStatus::kOk, "C")}) ==
        "## Recommendations\nA\n\n## Image Insights\nB\n\n## Market Trends\nC");
  CHECK(aggregate(std::vector<AgentOutput>{out("product", AgentStatus::kOk, "A"),
                                           out("multimodal", AgentStatus::kIterationLimit, ""),
                                           out("market", AgentStatus::kOk, "C")}) ==
        "## Recommendations\nA\n\n## Image Insights\n[unavailable: iteration_limit]\n\n"
        "## Market Trends\nC");
}

namespace {

ProviderMap image_providers() {
  ProviderMap p;
  p["product"] = llm::make_scripted_provider(
      script({search_call("best running shoes"), "1. Shoe 1 — light [https://shop.example/shoe1]"}));
  p["multimodal"] = llm::make_scripted_provider(
      script({"A red running shoe.\nFOLLOWUP: What is your budget?"}), true);
  p["market"] = llm::make_scripted_provider(
      script({search_call("smartwatch trends"), crewfix::scrape_call("https://news.example/watch"),
              "Wearables are growing."}));
  return p;
}

CrewOptions replay_options(CrewMode mode) {
  CrewOptions o;
  o.mode = mode;
  o.clock_factory = manual_clock_factory();
  return o;
}

}  // namespace

TEST_CASE("run_crew: context flows stage to stage in plan order") {
  crewfix::ToolWorld world;
  const auto agents = crewfix::standard_agents();
  const auto plan = plan_tasks({"", testimg::png(), "", {}}, agents);
  const auto result =
      run_crew(plan, agents, image_providers(), world.registry, replay_options(CrewMode::kSequential));
  REQUIRE(result.order == std::vector<std::string>{"t1", "t2", "t3"});
  for (const auto* o : result.ordered()) CHECK(o->status == AgentStatus::kOk);
  const auto& executed = result.trace["executed_tasks"];
  CHECK(executed[0][0]["context"].empty());
  CHECK(executed[1][0]["context"] ==
        nlohmann::json::array({"1. Shoe 1 — light [https://shop.example/shoe1]"}));
  CHECK(executed[2][0]["context"] ==
        nlohmann::json::array({"A red running shoe.\nFOLLOWUP: What is your budget?"}));
  CHECK(result.final_answer.find("## Market Trends\nWearables are growing.") != std::string::npos);
  CHECK(world.transport->calls == 0);
}

TEST_CASE("run_crew: only ok answers are carried forward") {
  crewfix::ToolWorld world;
  const auto agents = crewfix::standard_agents(2);
  TaskPlan plan;
  plan.stages = {{{"a", "product", "p", {}, {}}, {"b", "market", "m", {}, {}}},
                 {{"c", "multimodal", "q", {"seed"}, {}}}};
  ProviderMap p;
  p["product"] = llm::make_scripted_provider(script({"answer A"}));
  p["market"] = llm::make_scripted_provider(
      script({search_call("smartwatch trends"), search_call("smartwatch trends")}));
  p["multimodal"] = llm::make_scripted_provider(script({"done"}), true);
  const auto result = run_crew(plan, agents, p, world.registry, replay_options(CrewMode::kConcurrent));
  CHECK(result.outputs.at("b").status == AgentStatus::kIterationLimit);
  CHECK(result.trace["executed_tasks"][1][0]["context"] ==
        nlohmann::json::array({"seed", "answer A"}));
}

TEST_CASE("run_crew: sequential and concurrent traces are byte-identical") {
  crewfix::ToolWorld world;
  const auto agents = crewfix::standard_agents();
  for (const core::Query& goal :
       {core::Query{"", testimg::png(), "", {}}, core::Query{"running shoes", {}, "", {}}}) {
    const auto plan = plan_tasks(goal, agents);
    std::vector<std::string> dumps;
    for (int run = 0; run < 4; ++run) {
      auto providers = image_providers();
      const auto mode = run % 2 ? CrewMode::kConcurrent : CrewMode::kSequential;
      const auto r = run_crew(plan, agents, providers, world.registry, replay_options(mode));
      const auto path = write_trace(world.dir.path() / ("traces" + std::to_string(run)), r);
      CHECK(path.filename() == r.trace_id + ".json");
      dumps.push_back(read_all(path));
    }
    for (const auto& d : dumps) CHECK(d == dumps[0]);
  }
}

TEST_CASE("run_crew: fault isolation and empty plan") {
  crewfix::ToolWorld world;
  const auto agents = crewfix::standard_agents();
  const auto plan = plan_tasks({"running shoes", {}, "", {}}, agents);
  ProviderMap p;
  llm::ProviderScript limited;
  for (int i = 0; i < 5; ++i) limited.entries.push_back(llm::rate_limit());
  p["product"] = llm::make_scripted_provider(limited);
  p["market"] = llm::make_scripted_provider(script({"Trends are up."}));
  auto opts = replay_options(CrewMode::kConcurrent);
  opts.run.retry.max_attempts = 3;
  const auto r = run_crew(plan, agents, p, world.registry, opts);
  CHECK(r.outputs.at("t1").status == AgentStatus::kModelFailure);
  CHECK(r.outputs.at("t2").status == AgentStatus::kOk);
  CHECK(r.final_answer == "## Recommendations\n[unavailable: model_failure]\n\n## Market Trends\nTrends are up.");

  const auto empty = run_crew(TaskPlan{}, agents, {}, world.registry, opts);
  CHECK(empty.outputs.empty());
  CHECK(empty.final_answer.empty());

  // Missing provider is a per-task failure, not an exception.
  const auto none = run_crew(plan, agents, {}, world.registry, opts);
  CHECK(none.outputs.at("t1").status == AgentStatus::kModelFailure);
  CHECK(none.outputs.at("t1").model_calls == 0);

  TaskPlan dup;
  dup.stages = {{{"x", "product", "a", {}, {}}, {"x", "market", "b", {}, {}}}};
  CHECK_THROWS_AS(run_crew(dup, agents, p, world.registry, opts), Error);
}

TEST_CASE("trace ids depend on salt and plan") {
  crewfix::ToolWorld world;
  const auto agents = crewfix::standard_agents();
  const auto plan = plan_tasks({"running shoes", {}, "", {}}, agents);
  auto opts = replay_options(CrewMode::kSequential);
  const auto a = run_crew(plan, agents, {}, world.registry, opts);
  opts.trace_salt = "s1#0";
  const auto b = run_crew(plan, agents, {}, world.registry, opts);
  CHECK(a.trace_id != b.trace_id);
  CHECK(a.trace_id.size() == 16);
}
