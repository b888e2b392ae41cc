#include <doctest.h>

#include <random>

#include "agentrec/agents/pipeline.hpp"
#include "agentrec/error.hpp"
#include "support/crew_fixture.hpp"
#include "support/images.hpp"

using namespace agentrec;
using namespace agentrec::agents;
using crewfix::script;
using crewfix::search_call;
using crewfix::image_scenario;
using crewfix::text_scenario;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kInvalidArgument;
}

std::vector<std::string> names(const std::vector<core::Recommendation>& recs) {
  std::vector<std::string> out;
  for (const auto& r : recs) out.push_back(r.product.name);
  return out;
}

runtime::AgentOutput ok_output(std::string agent, std::string answer) {
  runtime::AgentOutput o;
  o.agent_id = std::move(agent);
  o.answer = std::move(answer);
  o.model_calls = 1;
  return o;
}

}  // namespace

TEST_CASE("parse_recommendations grammar") {
  auto p = parse_recommendations("1. Shoe X — light [u1]\n2. Shoe Y — cheap [u2]", "product");
  REQUIRE(p.items.size() == 2);
  CHECK(p.items[0].product.name == "Shoe X");
  CHECK(p.items[0].rationale == "light");
  CHECK(p.items[0].rank == 1);
  CHECK(p.items[1].rank == 2);
  CHECK_FALSE(p.items[0].product.url);  // placeholder, not a URL
  CHECK(p.items[0].agent_id == "product");

  p = parse_recommendations(
      "Here are my picks:\n"
      "3) **Pegasus 41** (Nike) - great cushioning at $129.99 [https://shop.example/peg]\n"
      "  7. Gel-Kayano – stable, $1,599 for a pair\n"
      "- not a numbered line\n"
      "4.no space so not an item\n"
      "8. Clifton 9",
      "product");
  REQUIRE(p.items.size() == 3);
  CHECK(p.items[0].product.name == "Pegasus 41");
  CHECK(p.items[0].product.brand == "Nike");
  CHECK(p.items[0].product.price == core::Price{"129.99", "USD"});
  CHECK(p.items[0].product.url == "https://shop.example/peg");
  CHECK(p.items[1].product.name == "Gel-Kayano");
  CHECK(p.items[1].product.price == core::Price{"1599", "USD"});
  CHECK(p.items[2].product.name == "Clifton 9");
  CHECK(p.items[2].rationale.empty());
  CHECK(p.items[2].rank == 3);
  CHECK(p.unparsed_remainder ==
        "Here are my picks:\n- not a numbered line\n4.no space so not an item");

  CHECK(parse_recommendations("I think the best product is X.", "product").items.empty());
}

TEST_CASE("parse_recommendations attributes sources from the tool log") {
  std::vector<runtime::ToolLogEntry> log;
  log.push_back({{"web_search", {}}, {"web_search", true, "", {"https://a.example", "https://b.example"}, {}}});
  log.push_back({{"scrape", {}}, {"scrape", true, "", {"https://b.example"}, {}}});
  log.push_back({{"scrape", {}}, {"scrape", false, "", {"https://c.example"}, {}}});
  const auto p = parse_recommendations(
      "1. A — x [https://a.example]\n2. B — y [https://b.example]\n3. C — z [https://c.example]\n4. D",
      "product", log);
  REQUIRE(p.items.size() == 4);
  CHECK(p.items[0].product.source == core::ProductSource::kWebSearch);
  CHECK(p.items[1].product.source == core::ProductSource::kScrape);
  CHECK(p.items[2].product.source == core::ProductSource::kModelKnowledge);
  CHECK(p.items[3].product.source == core::ProductSource::kModelKnowledge);
}

TEST_CASE("recommendations_from_output: dedupe, rerank, errors") {
  const auto recs = recommendations_from_output(
      ok_output("product", "1. Shoe X — light\n2. shoe  x — dup\n3. Shoe Z — other"), {"u"});
  CHECK(names(recs) == std::vector<std::string>{"Shoe X", "Shoe Z"});
  CHECK(recs[0].rank == 1);
  CHECK(recs[1].rank == 2);

  profile::UserProfile fan{"u", {"Acme"}};
  const auto reranked = recommendations_from_output(
      ok_output("product", "1. Plain — x\n2. Rocket (Acme) — y"), fan);
  CHECK(names(reranked) == std::vector<std::string>{"Rocket", "Plain"});

  CHECK(code_of([] { recommendations_from_output(ok_output("product", "no list here"), {"u"}); }) ==
        ErrorCode::kEmptyRecommendations);
  auto failed = ok_output("product", "");
  failed.status = runtime::AgentStatus::kIterationLimit;
  CHECK(code_of([&] { recommendations_from_output(failed, {"u"}); }) ==
        ErrorCode::kEmptyRecommendations);
}

TEST_CASE("rank contiguity over randomized list grammars") {
  std::mt19937_64 rng(99);
  const std::vector<std::string> seps = {" \xE2\x80\x94 ", " - ", " \xE2\x80\x93 ", ""};
  const std::vector<std::string> pool = {"Alpha", "Beta", "Gamma", "Delta", "alpha", "BETA "};
  for (int iter = 0; iter < 600; ++iter) {
    std::string text;
    bool any = false;
    const int n = static_cast<int>(rng() % 10);
    for (int i = 0; i < n; ++i) {
      switch (rng() % 4) {
        case 0: text += "some prose line\n"; break;
        default: {
          text += std::to_string(rng() % 20) + (rng() % 2 ? ". " : ") ");
          text += pool[rng() % pool.size()];
          if (rng() % 3 == 0) text += " (Brand" + std::to_string(rng() % 2) + ")";
          const auto& sep = seps[rng() % seps.size()];
          if (!sep.empty()) text += sep + "why $" + std::to_string(rng() % 300);
          if (rng() % 2) text += " [https://x.example/" + std::to_string(i) + "]";
          text += "\n";
          any = true;
        }
      }
    }
    profile::UserProfile p{"u", {"Brand1"}, 150.0};
    if (!any) {
      CHECK(code_of([&] { recommendations_from_output(ok_output("product", text), p); }) ==
            ErrorCode::kEmptyRecommendations);
      continue;
    }
    const auto recs = recommendations_from_output(ok_output("product", text), p);
    CHECK(core::ranks_contiguous(recs));
    CHECK(core::dedupe_recommendations(recs).size() == recs.size());
  }
}

TEST_CASE("parse_followups") {
  auto f = parse_followups("Looks like a trail shoe.\nFOLLOWUP: What is your budget?");
  CHECK(f.answer == "Looks like a trail shoe.");
  CHECK(f.questions == std::vector<std::string>{"What is your budget?"});

  f = parse_followups("Just an answer.");
  CHECK(f.answer == "Just an answer.");
  CHECK(f.questions.empty());

  f = parse_followups(
      "A.\nfollowup:\n- Size?\n- Colour?\n1. size?\nFOLLOWUP: Budget?\nFOLLOWUP: Brand?\n\ntrailing");
  CHECK(f.answer == "A.");
  CHECK(f.questions == std::vector<std::string>{"Size?", "Colour?", "Budget?"});
}

TEST_CASE("answer_image_query") {
  crewfix::ToolWorld world;
  const auto agents = crewfix::standard_agents();
  ManualClock clock;
  auto vision = llm::make_scripted_provider(
      script({"Brand A sneaker\nFOLLOWUP: What is your budget?"}), true);
  const auto a = answer_image_query(testimg::png(), "what brand is this?", {}, agents.at("multimodal"),
                                    *vision, world.registry, clock);
  CHECK(a.answer == "Brand A sneaker");
  CHECK(a.followups == std::vector<std::string>{"What is your budget?"});
  CHECK(vision->requests().at(0).has_image());

  auto plain = llm::make_scripted_provider(script({"Brand A sneaker"}), true);
  CHECK(answer_image_query(testimg::png(), "?", {}, agents.at("multimodal"), *plain, world.registry,
                           clock)
            .followups.empty());

  auto text_only = llm::make_scripted_provider(script({"x"}));
  CHECK(code_of([&] {
          answer_image_query(testimg::png(), "?", {}, agents.at("multimodal"), *text_only,
                             world.registry, clock);
        }) == ErrorCode::kCapabilityError);
}

TEST_CASE("analyze_market sources and errors") {
  crewfix::ToolWorld world;
  const auto agents = crewfix::standard_agents();
  ManualClock clock;
  auto provider = llm::make_scripted_provider(
      script({"ACTION: web_search\nARGS: {\"query\": \"smartwatch trends\", \"k\": 1}",
              "ACTION: web_search\nARGS: {\"query\": \"smartwatch trends\", \"k\": 2}",
              "Smartwatch shipments keep growing."}));
  const auto r = analyze_market("smartwatches", agents.at("market"), *provider, world.registry, clock);
  CHECK(r.summary == "Smartwatch shipments keep growing.");
  CHECK(r.sources == std::vector<std::string>{"https://news.example/watch", "https://data.example/wear"});
  CHECK(r.topic == "smartwatches");

  auto blank = llm::make_scripted_provider(script({"   "}));
  CHECK(code_of([&] { analyze_market("x", agents.at("market"), *blank, world.registry, clock); }) ==
        ErrorCode::kEmptySummary);

  auto prose = llm::make_scripted_provider(script({"Prices are falling."}));
  CHECK(analyze_market("x", agents.at("market"), *prose, world.registry, clock).sources.empty());
}

TEST_CASE("recommend_products end to end") {
  crewfix::ToolWorld world;
  const auto agents = crewfix::standard_agents();
  ManualClock clock;
  auto provider = llm::make_scripted_provider(
      script({search_call("best running shoes"),
              "1. Shoe 1 — light [https://shop.example/shoe1]\n2. Shoe 2 — cheap"}));
  const auto recs = recommend_products({"running shoes", {}, "", {}}, {"u"}, agents.at("product"),
                                       *provider, world.registry, clock);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].product.source == core::ProductSource::kWebSearch);

  auto prose = llm::make_scripted_provider(script({"I think the best product is X."}));
  CHECK(code_of([&] {
          recommend_products({"shoes", {}, "", {}}, {"u"}, agents.at("product"), *prose,
                             world.registry, clock);
        }) == ErrorCode::kEmptyRecommendations);
}

namespace {

struct Harness {
  crewfix::ToolWorld world;
  fakes::TempDir profiles_dir;
  profile::ProfileStore profiles{profiles_dir.path()};
  ScenarioLibrary library{std::vector<Scenario>{image_scenario(), text_scenario()}};
  ManualClock clock{Timestamp{Millis{1'700'000'000'000}}};
  Pipeline pipeline;

  Harness()
      : pipeline(PipelineConfig{crewfix::standard_agents(), {}, {}, std::nullopt}, world.registry,
                 library, &profiles, clock) {}
};

}  // namespace

TEST_CASE("pipeline: image turn fills all three sections") {
  Harness h;
  h.profiles.upsert({"u1", {"Acme"}});
  core::SessionState session{"s1", "u1", {}, {}};
  const auto turn = h.pipeline.run_turn(session, image_scenario().query);
  CHECK(turn.has_content());
  CHECK(names(turn.recommendations) == std::vector<std::string>{"Shoe 2", "Shoe 1"});  // Acme first
  CHECK(turn.image_answer == "A red running shoe.");
  REQUIRE(turn.market_report);
  CHECK(turn.market_report->sources.size() == 2);
  CHECK(session.turns.size() == 1);
  REQUIRE(session.pending_followups.size() == 2);
  CHECK(session.pending_followups[0].question_id == "t1q1");
  CHECK(session.pending_count() == 2);
  CHECK(h.profiles.require("u1").history.size() == 1);
  CHECK(h.world.transport->calls == 0);
}

TEST_CASE("pipeline: text turn has no image answer") {
  Harness h;
  core::SessionState session{"s1", "u1", {}, {}};
  const auto turn = h.pipeline.run_turn(session, text_scenario().query);
  CHECK(turn.recommendations.size() == 1);
  CHECK(turn.market_report);
  CHECK_FALSE(turn.image_answer);
  CHECK(session.pending_followups.empty());
}

TEST_CASE("pipeline: all agents failing leaves the session untouched") {
  Scenario bad = text_scenario();
  bad.scripts["product"] = script({"no list"});
  bad.scripts["market"] = script({"  "});
  crewfix::ToolWorld world;
  ScenarioLibrary lib{std::vector<Scenario>{bad}};
  ManualClock clock;
  Pipeline p(PipelineConfig{crewfix::standard_agents(), {}, {}, std::nullopt}, world.registry, lib,
             nullptr, clock);
  core::SessionState session{"s1", "u1", {}, {}};
  CHECK(code_of([&] { p.run_turn(session, bad.query); }) == ErrorCode::kAllAgentsFailed);
  CHECK(session.turns.empty());
  CHECK(code_of([&] { p.run_turn(session, {"unknown query", {}, "", {}}); }) == ErrorCode::kNoFixture);
  CHECK(code_of([&] { p.run_turn(session, {"   ", {}, "", {}}); }) == ErrorCode::kEmptyQuery);
}

TEST_CASE("pipeline: follow-up answers refine recommendations") {
  Harness h;
  h.profiles.ensure("u1");
  core::SessionState session{"s1", "u1", {}, {}};
  h.pipeline.run_turn(session, image_scenario().query);
  const auto before = session.turns;
  const auto pending = session.pending_count();

  const auto turn = h.pipeline.answer_followup(session, "t1q1", "$100");
  CHECK(names(turn.recommendations) == std::vector<std::string>{"Shoe 3"});
  CHECK(session.pending_count() == pending - 1);
  CHECK(session.pending_followups[0].answered);
  CHECK(session.pending_followups[0].answer == "$100");
  REQUIRE(session.turns.size() == 2);
  CHECK(session.turns[0] == before[0]);  // append only
  CHECK(session.turns[1].query.timestamp > session.turns[0].query.timestamp);

  // The refinement run saw the answer in its context.
  const auto* crew = h.pipeline.last_crew();
  REQUIRE(crew);
  const auto& ctx = crew->trace["executed_tasks"][0][0]["context"];
  CHECK(ctx.back() == "User answer: $100");
  CHECK(ctx[1] == "Follow-up question: What is your budget?");
  CHECK(ctx[0] == "A red running shoe.");

  CHECK(code_of([&] { h.pipeline.answer_followup(session, "t1q1", "$50"); }) ==
        ErrorCode::kUnknownFollowup);
  CHECK(code_of([&] { h.pipeline.answer_followup(session, "nope", "x"); }) ==
        ErrorCode::kUnknownFollowup);
  const auto history = h.profiles.require("u1").history;
  REQUIRE(history.size() == 2);
  CHECK(history[1].kind == profile::EventKind::kFollowupAnswer);
}

TEST_CASE("pipeline: traces written per turn") {
  Harness h;
  fakes::TempDir traces;
  Pipeline p(PipelineConfig{crewfix::standard_agents(), {}, {}, traces.path()}, h.world.registry,
             h.library, nullptr, h.clock);
  core::SessionState session{"s1", "u1", {}, {}};
  const auto t1 = p.run_turn(session, text_scenario().query);
  const auto t2 = p.run_turn(session, text_scenario().query);
  CHECK(t1.trace_id != t2.trace_id);
  CHECK(std::filesystem::exists(traces.path() / (t1.trace_id + ".json")));
  CHECK(std::filesystem::exists(traces.path() / (t2.trace_id + ".json")));
}
