#include <doctest.h>

#include <random>

#include "agentrec/error.hpp"
#include "agentrec/tools/registry.hpp"
#include "agentrec/tools/web.hpp"
#include "agentrec/util/clock.hpp"
#include "support/fakes.hpp"

using namespace agentrec;
using namespace agentrec::tools;

namespace {

ToolRegistry echo_registry() {
  ToolRegistry r;
  register_tool(r, web_search_spec(), [](const ToolCall& c) {
    return ToolResult{"web_search", true, *c.string_arg("query"), {}, Millis{0}};
  });
  register_tool(r, scrape_spec(), [](const ToolCall& c) {
    return ToolResult{"scrape", true, *c.string_arg("url"), {*c.string_arg("url")}, Millis{0}};
  });
  return r;
}

SearchResults five_shoes() {
  SearchResults r;
  r.query = "best running shoes";
  for (int i = 1; i <= 5; ++i) {
    r.entries.push_back({"Shoe " + std::to_string(i), "https://shop.example/shoe" + std::to_string(i),
                         "snippet " + std::to_string(i)});
  }
  return r;
}

}  // namespace

TEST_CASE("registry register, resolve, duplicate, unknown") {
  ToolRegistry r;
  register_tool(r, web_search_spec(), [](const ToolCall&) { return ToolResult{}; });
  CHECK(r.resolve("web_search").spec.name == "web_search");
  try {
    register_tool(r, web_search_spec(), [](const ToolCall&) { return ToolResult{}; });
    FAIL("expected DuplicateTool");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDuplicateTool);
  }
  try {
    r.resolve("teleport");
    FAIL("expected NotFound");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotFound);
  }
  ToolSpec bad{"Bad-Name", "", {}};
  CHECK_THROWS_AS(r.add(bad, {}), Error);
  r.freeze();
  try {
    r.add(scrape_spec(), {});
    FAIL("expected RegistryFrozen");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kRegistryFrozen);
  }
}

TEST_CASE("parse_tool_call examples") {
  const auto r = echo_registry();
  const auto call =
      parse_tool_call("ACTION: web_search\nARGS: {\"query\":\"smartwatch trends\",\"k\":5}", r);
  REQUIRE(call);
  CHECK(call->tool_name == "web_search");
  CHECK(*call->string_arg("query") == "smartwatch trends");
  CHECK(call->int_arg("k") == 5);

  CHECK_FALSE(parse_tool_call("I think the best product is X.", r));

  try {
    parse_tool_call("ACTION: teleport\nARGS: {}", r);
    FAIL("expected UnknownTool");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnknownTool);
  }
}

TEST_CASE("parse_tool_call tolerates prose, multi-line args and skips broken blocks") {
  const auto r = echo_registry();
  auto call = parse_tool_call(
      "Thought: I should look this up.\n  ACTION: scrape\nARGS: {\n  \"url\": \"https://a.example/x\"\n}\n"
      "trailing text",
      r);
  REQUIRE(call);
  CHECK(call->tool_name == "scrape");

  // First block has invalid JSON, second is fine.
  call = parse_tool_call(
      "ACTION: web_search\nARGS: {query: oops}\nACTION: web_search\nARGS: {\"query\":\"q\"}", r);
  REQUIRE(call);
  CHECK(*call->string_arg("query") == "q");

  // Braces inside strings do not confuse the scanner.
  call = parse_tool_call("ACTION: web_search\nARGS: {\"query\":\"a } b {\"}", r);
  REQUIRE(call);
  CHECK(*call->string_arg("query") == "a } b {");

  // ARGS must follow directly.
  CHECK_FALSE(parse_tool_call("ACTION: web_search\n\nARGS: {\"query\":\"q\"}", r));
}

TEST_CASE("parse_tool_call schema violations") {
  const auto r = echo_registry();
  auto code_of = [&](const std::string& text) {
    try {
      parse_tool_call(text, r);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInvalidArgument;
  };
  CHECK(code_of("ACTION: web_search\nARGS: {}") == ErrorCode::kMalformedArgs);
  CHECK(code_of("ACTION: web_search\nARGS: {\"query\":\"q\",\"k\":\"5\"}") ==
        ErrorCode::kMalformedArgs);
  CHECK(code_of("ACTION: web_search\nARGS: {\"query\":\"q\",\"extra\":1}") ==
        ErrorCode::kMalformedArgs);
  CHECK(code_of("ACTION: web_search\nARGS: {\"query\":[1]}") == ErrorCode::kMalformedArgs);
  CHECK(code_of("ACTION: scrape\nARGS: {\"url\":\"not a url\"}") == ErrorCode::kMalformedArgs);
}

TEST_CASE("format_tool_call and parse_tool_call round trip") {
  const auto r = echo_registry();
  std::mt19937_64 rng(7);
  const std::string alphabet = "abc XYZ{}\"\\:\n\t$-_/.";
  for (int iter = 0; iter < 500; ++iter) {
    ToolCall call;
    std::string q;
    const int n = std::uniform_int_distribution<int>(1, 30)(rng);
    for (int i = 0; i < n; ++i) {
      q.push_back(alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)]);
    }
    if (iter % 2) {
      call = ToolCall{"web_search", {{"query", q}}};
      if (iter % 3 == 0) call.args["k"] = std::int64_t{std::uniform_int_distribution<int>(1, 20)(rng)};
    } else {
      call = ToolCall{"scrape", {{"url", "https://x.example/" + std::to_string(iter)}}};
    }
    const auto parsed = parse_tool_call(format_tool_call(call), r);
    REQUIRE(parsed);
    CHECK(*parsed == call);
  }
}

TEST_CASE("truncate_content bounds total length") {
  const std::string body(12000, 'a');
  const std::string out = truncate_content(body, kDefaultMaxContentChars);
  CHECK(out.size() == kDefaultMaxContentChars);
  CHECK(out.ends_with(kTruncationMarker));
  CHECK(truncate_content("short", 8000) == "short");
  // Never cuts a UTF-8 sequence.
  std::string euros;
  for (int i = 0; i < 100; ++i) euros += "\xE2\x82\xAC";
  const std::string t = truncate_content(euros, 50);
  CHECK(t.size() <= 50);
  const std::string head = t.substr(0, t.size() - kTruncationMarker.size());
  CHECK(head.size() % 3 == 0);
}

TEST_CASE("registry execute turns executor errors into failed results") {
  ToolRegistry r;
  register_tool(r, scrape_spec(), [](const ToolCall&) -> ToolResult {
    throw Error(ErrorCode::kNonHtmlContent, "pdf");
  });
  ManualClock clock;
  const auto res = r.execute({"scrape", {{"url", "https://x.example/a.pdf"}}}, clock);
  CHECK_FALSE(res.ok);
  CHECK(res.content == "NonHtmlContent: pdf");
  const auto missing = r.execute({"web_search", {{"query", "q"}}}, clock);
  CHECK_FALSE(missing.ok);
  CHECK(missing.content.rfind("NotFound", 0) == 0);
}

TEST_CASE("extract_visible_text") {
  CHECK(extract_visible_text("<html><body><p>Price: $99</p></body></html>") == "Price: $99");
  CHECK(extract_visible_text(
            "<!doctype html><html><head><title>Shop &amp; Co</title>"
            "<style>p{color:red}</style><script>var x = '<p>no</p>';</script></head>"
            "<body><div>nav junk</div><h1>Best <b>shoes</b></h1><!-- <p>hidden</p> -->"
            "<ul><li>One&nbsp;&#36;5</li><li>Two &lt;3&gt;</li></ul>"
            "<p class=\"a>b\">Last\n\n   line</p></body></html>") ==
        "Shop & Co Best shoes One $5 Two <3> Last line");
  CHECK(extract_visible_text("plain text without tags") == "");
  CHECK(extract_visible_text("<P>Upper</P><SCRIPT>x</SCRIPT>") == "Upper");
}

TEST_CASE("is_html") {
  CHECK(is_html({"text/html; charset=utf-8", "<p>x</p>"}));
  CHECK_FALSE(is_html({"application/pdf", "%PDF-1.7 ..."}));
  CHECK_FALSE(is_html({"text/html", "%PDF-1.4"}));
  CHECK_FALSE(is_html({"", std::string("\x89PNG\0\0", 6)}));
  CHECK(is_html({"", "<html></html>"}));
}

TEST_CASE("offline fixtures: search prefix, NoFixture, scrape examples") {
  fakes::TempDir dir;
  FixtureStore store(dir.path());
  store.record_search(five_shoes());
  store.record_page("https://shop.example/p", {"text/html", "<html><body><p>Price: $99</p></body></html>"});
  store.record_page("https://shop.example/doc.pdf", {"application/pdf", "%PDF-1.7 binary"});
  store.record_page("https://shop.example/long", {"text/html", "<p>" + std::string(12000, 'x') + "</p>"});

  auto transport = std::make_shared<fakes::CountingTransport>();
  const auto backends = make_backends(ToolMode::kOffline, dir.path(), transport);

  // Query normalization: case and whitespace do not matter.
  const auto r = web_search(*backends.search, "  Best   RUNNING shoes ", 3);
  REQUIRE(r.entries.size() == 3);
  CHECK(r.entries[0] == five_shoes().entries[0]);
  CHECK(r.entries[2] == five_shoes().entries[2]);

  try {
    web_search(*backends.search, "no such query", 3);
    FAIL("expected NoFixture");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNoFixture);
  }
  for (int bad_k : {0, -1, 21}) {
    try {
      web_search(*backends.search, "best running shoes", bad_k);
      FAIL("expected InvalidArgument");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kInvalidArgument);
    }
  }

  const auto page = scrape(*backends.pages, "https://shop.example/p");
  CHECK(page.ok);
  CHECK(page.content == "Price: $99");
  CHECK(page.source_urls == std::vector<std::string>{"https://shop.example/p"});

  try {
    scrape(*backends.pages, "https://shop.example/doc.pdf");
    FAIL("expected NonHtmlContent");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNonHtmlContent);
  }

  const auto long_page = scrape(*backends.pages, "https://shop.example/long");
  CHECK(long_page.content.size() == 8000);
  CHECK(long_page.content == std::string(8000 - kTruncationMarker.size(), 'x') +
                                 std::string(kTruncationMarker));

  try {
    scrape(*backends.pages, "https://shop.example/unrecorded");
    FAIL("expected NoFixture");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNoFixture);
  }

  CHECK(transport->calls == 0);

  const auto idx = store.index();
  CHECK(idx["search"][FixtureStore::search_digest("best running shoes")] == "best running shoes");
  CHECK(idx["pages"][FixtureStore::page_digest("https://shop.example/doc.pdf")]["content_type"] ==
        "application/pdf");
}

TEST_CASE("standard registry in offline mode performs zero network calls") {
  fakes::TempDir dir;
  FixtureStore store(dir.path());
  store.record_search(five_shoes());
  store.record_page("https://shop.example/shoe1", {"text/html", "<title>Shoe 1</title><p>Light.</p>"});
  auto transport = std::make_shared<fakes::CountingTransport>();
  auto registry = make_standard_registry(make_backends(ToolMode::kOffline, dir.path(), transport));
  registry.freeze();
  ManualClock clock;

  auto res = registry.execute({"web_search", {{"query", "best running shoes"}, {"k", std::int64_t{2}}}}, clock);
  CHECK(res.ok);
  CHECK(res.source_urls.size() == 2);
  CHECK(res.content.find("Shoe 2") != std::string::npos);
  CHECK(res.content.find("Shoe 3") == std::string::npos);

  res = registry.execute({"web_search", {{"query", "best running shoes"}}}, clock);
  CHECK(res.source_urls.size() == 5);

  res = registry.execute({"scrape", {{"url", "https://shop.example/shoe1"}}}, clock);
  CHECK(res.ok);
  CHECK(res.content == "Shoe 1 Light.");

  res = registry.execute({"web_search", {{"query", "unknown"}}}, clock);
  CHECK_FALSE(res.ok);
  CHECK(res.content.rfind("NoFixture", 0) == 0);

  CHECK(transport->calls == 0);
}

TEST_CASE("live search parses a SearXNG-style response") {
  struct FakeSearx final : net::HttpTransport {
    net::HttpResponse get(const std::string& url, const net::Headers&) override {
      last_url = url;
      return {200, "application/json",
              R"({"results":[{"title":"A","url":"https://a.example","content":"sa"},
                             {"title":"Rel","url":"/relative","content":"x"},
                             {"title":"B","url":"https://b.example","content":"sb"}]})",
              {}};
    }
    net::HttpResponse post(const std::string&, const std::string&, const std::string&,
                           const net::Headers&) override {
      return {};
    }
    std::string last_url;
  };
  auto t = std::make_shared<FakeSearx>();
  HttpSearch search("http://127.0.0.1:8888/search", t);
  const auto r = web_search(search, "smart watch", 5);
  CHECK(t->last_url == "http://127.0.0.1:8888/search?q=smart%20watch&format=json");
  REQUIRE(r.entries.size() == 2);
  CHECK(r.entries[1].url == "https://b.example");
}
