#include "agentrec/tools/web.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "agentrec/error.hpp"
#include "agentrec/util/digest.hpp"
#include "agentrec/util/fs.hpp"
#include "agentrec/util/text.hpp"

namespace agentrec::tools {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// HTML text extraction

namespace {

constexpr std::array kKeepTags = {"title", "h1", "h2", "h3", "h4", "h5", "h6", "p", "li"};
constexpr std::array kSkipTags = {"script", "style", "noscript", "template"};
constexpr std::array kBreakTags = {"br", "div", "ul", "ol", "tr", "td", "th", "table",
                                   "section", "article", "header", "footer", "hr", "body"};

template <std::size_t N>
bool one_of(const std::string& name, const std::array<const char*, N>& set) {
  return std::any_of(set.begin(), set.end(), [&](const char* s) { return name == s; });
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x110000) {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out.push_back(s[i]);
      continue;
    }
    const auto semi = s.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back('&');
      continue;
    }
    const std::string_view ent = s.substr(i + 1, semi - i - 1);
    bool matched = true;
    if (ent == "amp") {
      out.push_back('&');
    } else if (ent == "lt") {
      out.push_back('<');
    } else if (ent == "gt") {
      out.push_back('>');
    } else if (ent == "quot") {
      out.push_back('"');
    } else if (ent == "apos") {
      out.push_back('\'');
    } else if (ent == "nbsp") {
      out.push_back(' ');
    } else if (!ent.empty() && ent[0] == '#') {
      unsigned long cp = 0;
      const bool hex = ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X');
      const auto digits = ent.substr(hex ? 2 : 1);
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, hex ? 16 : 10);
      if (ec == std::errc{} && p == digits.data() + digits.size() && !digits.empty()) {
        append_utf8(out, cp == 0xA0 ? U' ' : static_cast<char32_t>(cp));
      } else {
        matched = false;
      }
    } else {
      matched = false;
    }
    if (matched) {
      i = semi;
    } else {
      out.push_back('&');
    }
  }
  return out;
}

std::size_t find_ci(std::string_view hay, std::string_view needle, std::size_t from) {
  for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
    if (util::starts_with_ci(hay.substr(i), needle)) return i;
  }
  return std::string_view::npos;
}

// Offset just past the '>' closing the tag opened at `lt`, honouring quotes.
std::size_t tag_end(std::string_view html, std::size_t lt) {
  char quote = 0;
  for (std::size_t i = lt + 1; i < html.size(); ++i) {
    const char c = html[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '>') {
      return i + 1;
    }
  }
  return html.size();
}

}  // namespace

std::string extract_visible_text(std::string_view html) {
  std::string out;
  std::string run;
  int keep_depth = 0;
  auto flush = [&] {
    if (!run.empty()) out += decode_entities(run);
    run.clear();
  };

  std::size_t i = 0;
  while (i < html.size()) {
    if (html[i] != '<') {
      if (keep_depth > 0) run.push_back(html[i]);
      ++i;
      continue;
    }
    if (html.substr(i, 4) == "<!--") {
      const auto end = html.find("-->", i + 4);
      i = end == std::string_view::npos ? html.size() : end + 3;
      continue;
    }
    const std::size_t end = tag_end(html, i);
    std::size_t p = i + 1;
    const bool closing = p < html.size() && html[p] == '/';
    if (closing) ++p;
    std::string name;
    while (p < html.size() && std::isalnum(static_cast<unsigned char>(html[p]))) {
      name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(html[p]))));
      ++p;
    }
    if (name.empty()) {
      // "<!doctype", "<?xml", or a stray '<' in text.
      if (p < html.size() && (html[p] == '!' || html[p] == '?')) {
        i = end;
      } else {
        if (keep_depth > 0) run.push_back('<');
        ++i;
      }
      continue;
    }
    const bool self_closing = end >= 2 && html[end - 2] == '/';
    i = end;

    if (!closing && one_of(name, kSkipTags)) {
      const auto close = find_ci(html, "</" + name, i);
      i = close == std::string_view::npos ? html.size() : tag_end(html, close);
      continue;
    }
    if (one_of(name, kKeepTags)) {
      flush();
      out.push_back(' ');
      if (closing) {
        keep_depth = std::max(0, keep_depth - 1);
      } else if (!self_closing) {
        ++keep_depth;
      }
    } else if (one_of(name, kBreakTags)) {
      flush();
      out.push_back(' ');
    }
  }
  flush();
  return util::collapse_whitespace(out);
}

bool is_html(const Page& page) {
  const std::string ct = util::to_lower_ascii(page.content_type);
  if (page.body.rfind("%PDF", 0) == 0) return false;
  if (page.body.find('\0') != std::string::npos) return false;
  if (!ct.empty()) return ct.find("html") != std::string::npos;
  const std::string head = util::to_lower_ascii(page.body.substr(0, 512));
  return head.find('<') != std::string::npos;
}

// ---------------------------------------------------------------------------
// Fixture store

namespace {

using util::read_file;

json search_to_json(const SearchResults& r) {
  json entries = json::array();
  for (const auto& e : r.entries) {
    entries.push_back(json{{"title", e.title}, {"url", e.url}, {"snippet", e.snippet}});
  }
  return json{{"query", r.query}, {"entries", entries}};
}

SearchResults search_from_json(const json& j) {
  SearchResults r;
  r.query = j.value("query", "");
  for (const auto& e : j.at("entries")) {
    r.entries.push_back(
        {e.value("title", ""), e.at("url").get<std::string>(), e.value("snippet", "")});
  }
  return r;
}

}  // namespace

FixtureStore::FixtureStore(fs::path root) : root_(std::move(root)) {}

std::string FixtureStore::search_key(std::string_view query) { return util::normalize_key(query); }

std::string FixtureStore::search_digest(std::string_view query) {
  return util::sha256_hex(search_key(query));
}

std::string FixtureStore::page_digest(std::string_view url) { return util::sha256_hex(url); }

std::optional<SearchResults> FixtureStore::find_search(std::string_view query) const {
  const auto text = read_file(root_ / "search" / (search_digest(query) + ".json"));
  if (!text) return std::nullopt;
  try {
    return search_from_json(json::parse(*text));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, "corrupt search fixture: " + std::string(e.what()));
  }
}

std::optional<Page> FixtureStore::find_page(std::string_view url) const {
  const std::string digest = page_digest(url);
  auto body = read_file(root_ / "pages" / (digest + ".html"));
  if (!body) return std::nullopt;
  Page page{"text/html", std::move(*body)};
  const json idx = index();
  if (idx.contains("pages") && idx["pages"].contains(digest)) {
    page.content_type = idx["pages"][digest].value("content_type", "text/html");
  }
  return page;
}

json FixtureStore::index() const {
  std::lock_guard lock(mu_);
  const auto text = read_file(root_ / "index.json");
  json idx = text ? json::parse(*text, nullptr, false) : json::object();
  if (idx.is_discarded() || !idx.is_object()) idx = json::object();
  if (!idx.contains("search")) idx["search"] = json::object();
  if (!idx.contains("pages")) idx["pages"] = json::object();
  return idx;
}

void FixtureStore::write_index(const json& idx) const {
  std::lock_guard lock(mu_);
  util::write_file_atomic(root_ / "index.json", idx.dump(2) + "\n");
}

void FixtureStore::record_search(const SearchResults& results) {
  const std::string digest = search_digest(results.query);
  SearchResults stored = results;
  stored.query = search_key(results.query);
  util::write_file_atomic(root_ / "search" / (digest + ".json"), search_to_json(stored).dump(2) + "\n");
  json idx = index();
  idx["search"][digest] = stored.query;
  write_index(idx);
}

void FixtureStore::record_page(std::string_view url, const Page& page) {
  const std::string digest = page_digest(url);
  util::write_file_atomic(root_ / "pages" / (digest + ".html"), page.body);
  json idx = index();
  idx["pages"][digest] = json{{"url", std::string(url)}, {"content_type", page.content_type}};
  write_index(idx);
}

// ---------------------------------------------------------------------------
// Backends

SearchResults FixtureSearch::search(const std::string& query, int k) {
  auto found = store_->find_search(query);
  if (!found) {
    throw Error(ErrorCode::kNoFixture, "no search fixture for query '" +
                                           FixtureStore::search_key(query) + "'");
  }
  if (found->entries.size() > static_cast<std::size_t>(k)) {
    found->entries.resize(static_cast<std::size_t>(k));
  }
  return *found;
}

Page FixturePages::fetch(const std::string& url) {
  auto found = store_->find_page(url);
  if (!found) throw Error(ErrorCode::kNoFixture, "no page fixture for " + url);
  return *found;
}

HttpSearch::HttpSearch(std::string endpoint, std::shared_ptr<net::HttpTransport> transport)
    : endpoint_(std::move(endpoint)), transport_(std::move(transport)) {
  net::parse_url(endpoint_);
}

SearchResults HttpSearch::search(const std::string& query, int k) {
  const char sep = endpoint_.find('?') == std::string::npos ? '?' : '&';
  const auto resp =
      transport_->get(endpoint_ + sep + "q=" + net::url_encode(query) + "&format=json", {});
  if (resp.status < 200 || resp.status >= 300) {
    throw Error(ErrorCode::kTransportError,
                "search endpoint returned HTTP " + std::to_string(resp.status));
  }
  const json body = json::parse(resp.body, nullptr, false);
  if (body.is_discarded() || !body.contains("results")) {
    throw Error(ErrorCode::kTransportError, "search endpoint returned malformed JSON");
  }
  SearchResults out;
  out.query = query;
  for (const auto& r : body["results"]) {
    if (out.entries.size() >= static_cast<std::size_t>(k)) break;
    out.entries.push_back({r.value("title", ""), r.value("url", ""), r.value("content", "")});
  }
  return out;
}

Page HttpPages::fetch(const std::string& url) {
  const auto resp = transport_->get(url, {{"User-Agent", "agentrec/1.0"}});
  if (resp.status < 200 || resp.status >= 300) {
    throw Error(ErrorCode::kTransportError,
                "GET " + url + " returned HTTP " + std::to_string(resp.status));
  }
  return Page{resp.content_type, resp.body};
}

// ---------------------------------------------------------------------------
// Operations

SearchResults web_search(SearchBackend& backend, const std::string& query, int k) {
  if (k < 1 || k > kMaxSearchK) {
    throw Error(ErrorCode::kInvalidArgument, "web_search k must lie in [1, 20]");
  }
  if (util::trim(query).empty()) throw Error(ErrorCode::kInvalidArgument, "empty search query");
  SearchResults r = backend.search(query, k);
  std::erase_if(r.entries, [](const SearchEntry& e) { return !net::is_absolute_http_url(e.url); });
  if (r.entries.size() > static_cast<std::size_t>(k)) r.entries.resize(static_cast<std::size_t>(k));
  return r;
}

ToolResult scrape(PageSource& source, const std::string& url, std::size_t max_chars) {
  if (!net::is_absolute_http_url(url)) {
    throw Error(ErrorCode::kInvalidArgument, "scrape needs an absolute http(s) URL: " + url);
  }
  const Page page = source.fetch(url);
  if (!is_html(page)) {
    throw Error(ErrorCode::kNonHtmlContent,
                url + " is not HTML (" +
                    (page.content_type.empty() ? std::string("binary") : page.content_type) + ")");
  }
  ToolResult result;
  result.tool_name = "scrape";
  result.ok = true;
  result.content = truncate_content(extract_visible_text(page.body), max_chars);
  result.source_urls = {url};
  return result;
}

std::string render_search_results(const SearchResults& results) {
  std::string out;
  for (std::size_t i = 0; i < results.entries.size(); ++i) {
    const auto& e = results.entries[i];
    out += std::to_string(i + 1) + ". " + e.title + "\n   " + e.url + "\n   " + e.snippet + "\n";
  }
  if (out.empty()) out = "(no results)\n";
  return out;
}

ToolBackends make_backends(ToolMode mode, const fs::path& fixtures_dir,
                           std::shared_ptr<net::HttpTransport> transport,
                           const std::string& search_endpoint) {
  if (mode == ToolMode::kOffline) {
    auto store = std::make_shared<const FixtureStore>(fixtures_dir);
    return {std::make_shared<FixtureSearch>(store), std::make_shared<FixturePages>(store)};
  }
  if (!transport) transport = net::make_live_transport();
  if (search_endpoint.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "live mode needs a search endpoint");
  }
  return {std::make_shared<HttpSearch>(search_endpoint, transport),
          std::make_shared<HttpPages>(transport)};
}

ToolSpec web_search_spec() {
  return {"web_search",
          "Search the web. Returns ranked results with title, url and snippet.",
          {{"query", {ArgType::kString, true}}, {"k", {ArgType::kInt, false}}}};
}

ToolSpec scrape_spec() {
  return {"scrape",
          "Fetch a web page and return its visible text (title, headings, paragraphs, lists).",
          {{"url", {ArgType::kUrl, true}}}};
}

ToolRegistry make_standard_registry(const ToolBackends& backends, std::size_t max_content_chars) {
  ToolRegistry registry;
  auto search = backends.search;
  register_tool(registry, web_search_spec(), [search](const ToolCall& call) {
    const int k = static_cast<int>(call.int_arg("k").value_or(5));
    const SearchResults r = web_search(*search, *call.string_arg("query"), k);
    ToolResult out{"web_search", true, render_search_results(r), {}, Millis{0}};
    for (const auto& e : r.entries) out.source_urls.push_back(e.url);
    return out;
  });
  auto pages = backends.pages;
  register_tool(registry, scrape_spec(), [pages, max_content_chars](const ToolCall& call) {
    return scrape(*pages, *call.string_arg("url"), max_content_chars);
  });
  return registry;
}

}  // namespace agentrec::tools
