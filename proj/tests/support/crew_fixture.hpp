#pragma once

#include <string>
#include <vector>

#include "agentrec/agents/pipeline.hpp"
#include "agentrec/llm/scripted.hpp"
#include "agentrec/runtime/crew.hpp"
#include "agentrec/tools/web.hpp"
#include "support/fakes.hpp"
#include "support/images.hpp"

namespace crewfix {

using agentrec::llm::ProviderScript;
using agentrec::llm::reply_text;

inline agentrec::runtime::AgentSet standard_agents(int max_iterations = 15) {
  using agentrec::runtime::AgentDef;
  agentrec::runtime::AgentSet s;
  s["product"] = AgentDef{"product", "You recommend products.", {"web_search", "scrape"}, "m-text",
                          max_iterations};
  s["multimodal"] = AgentDef{"multimodal", "You answer questions about product images.",
                             {"web_search"}, "m-vision", max_iterations};
  s["market"] = AgentDef{"market", "You analyze market trends.", {"web_search", "scrape"}, "m-text",
                         max_iterations};
  return s;
}

// Offline tool world: one search fixture and three pages.
struct ToolWorld {
  fakes::TempDir dir;
  std::shared_ptr<fakes::CountingTransport> transport = std::make_shared<fakes::CountingTransport>();
  agentrec::tools::ToolRegistry registry;

  ToolWorld() {
    agentrec::tools::FixtureStore store(dir.path());
    agentrec::tools::SearchResults r;
    r.query = "best running shoes";
    for (int i = 1; i <= 5; ++i) {
      r.entries.push_back({"Shoe " + std::to_string(i), "https://shop.example/shoe" + std::to_string(i),
                           "snippet " + std::to_string(i)});
    }
    store.record_search(r);
    agentrec::tools::SearchResults t;
    t.query = "smartwatch trends";
    t.entries = {{"Watch report", "https://news.example/watch", "wearables grow"},
                 {"Market data", "https://data.example/wear", "shipments up"}};
    store.record_search(t);
    store.record_page("https://shop.example/shoe1", {"text/html", "<p>Shoe 1 costs $90.</p>"});
    store.record_page("https://news.example/watch", {"text/html", "<p>Smartwatch sales up 10%.</p>"});
    registry = agentrec::tools::make_standard_registry(
        agentrec::tools::make_backends(agentrec::tools::ToolMode::kOffline, dir.path(), transport));
    registry.freeze();
  }
};

inline std::string search_call(const std::string& q) {
  return "ACTION: web_search\nARGS: {\"query\": \"" + q + "\", \"k\": 3}";
}

inline std::string scrape_call(const std::string& url) {
  return "ACTION: scrape\nARGS: {\"url\": \"" + url + "\"}";
}

inline ProviderScript script(const std::vector<std::string>& replies) {
  ProviderScript s;
  for (const auto& r : replies) s.entries.push_back(reply_text(r));
  return s;
}

// Image turn: all three agents answer, two follow-ups, one refinement.
inline agentrec::agents::Scenario image_scenario() {
  agentrec::agents::Scenario s;
  s.name = "img";
  s.query = {"what is this shoe?", testimg::png(), "", {}};
  s.scripts["product"] = script({"1. Shoe 1 — light\n2. Shoe 2 (Acme) — $80 bargain"});
  s.scripts["multimodal"] = script({"A red running shoe.\nFOLLOWUP: What is your budget?\nFOLLOWUP: Size?"});
  s.scripts["market"] = script({search_call("smartwatch trends"), "Running is trending."});
  s.followup_scripts["product"] = script({"1. Shoe 3 — under budget"});
  return s;
}

// Text turn: product and market only.
inline agentrec::agents::Scenario text_scenario() {
  agentrec::agents::Scenario s;
  s.name = "txt";
  s.query = {"running shoes", {}, "", {}};
  s.scripts["product"] = script({"1. Shoe 1 — light"});
  s.scripts["market"] = script({"Running is trending."});
  return s;
}

}  // namespace crewfix
