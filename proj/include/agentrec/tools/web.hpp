#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "agentrec/tools/registry.hpp"
#include "agentrec/util/http.hpp"

namespace agentrec::tools {

struct SearchEntry {
  std::string title;
  std::string url;
  std::string snippet;
  bool operator==(const SearchEntry&) const = default;
};

struct SearchResults {
  std::vector<SearchEntry> entries;
  std::string query;
  bool operator==(const SearchResults&) const = default;
};

struct Page {
  std::string content_type;
  std::string body;
};

inline constexpr int kMaxSearchK = 20;

// Visible text of an HTML document: <title>, headings, paragraphs and list
// items; scripts and styles dropped; entities decoded; whitespace collapsed.
std::string extract_visible_text(std::string_view html);

// True when the payload should be treated as HTML for scraping.
bool is_html(const Page& page);

// Recorded search results and pages on disk:
//   <root>/search/<sha256(normalized query)>.json
//   <root>/pages/<sha256(url)>.html
//   <root>/index.json   digest -> human-readable key (+ page content type)
class FixtureStore {
 public:
  explicit FixtureStore(std::filesystem::path root);

  static std::string search_key(std::string_view query);  // normalized query
  static std::string search_digest(std::string_view query);
  static std::string page_digest(std::string_view url);

  std::optional<SearchResults> find_search(std::string_view query) const;
  std::optional<Page> find_page(std::string_view url) const;

  void record_search(const SearchResults& results);
  void record_page(std::string_view url, const Page& page);

  // {"search": {digest: query}, "pages": {digest: {"url", "content_type"}}}
  nlohmann::json index() const;
  const std::filesystem::path& root() const { return root_; }

 private:
  void write_index(const nlohmann::json& index) const;

  std::filesystem::path root_;
  mutable std::mutex mu_;
};

class SearchBackend {
 public:
  virtual ~SearchBackend() = default;
  // Up to k results, ranked as the source returned them.
  virtual SearchResults search(const std::string& query, int k) = 0;
};

class PageSource {
 public:
  virtual ~PageSource() = default;
  virtual Page fetch(const std::string& url) = 0;
};

// Offline: serves recorded fixtures only, throws kNoFixture otherwise.
class FixtureSearch final : public SearchBackend {
 public:
  explicit FixtureSearch(std::shared_ptr<const FixtureStore> store) : store_(std::move(store)) {}
  SearchResults search(const std::string& query, int k) override;

 private:
  std::shared_ptr<const FixtureStore> store_;
};

class FixturePages final : public PageSource {
 public:
  explicit FixturePages(std::shared_ptr<const FixtureStore> store) : store_(std::move(store)) {}
  Page fetch(const std::string& url) override;

 private:
  std::shared_ptr<const FixtureStore> store_;
};

// Live search against a SearXNG-style JSON endpoint:
//   GET <endpoint>?q=<query>&format=json -> {"results": [{"title","url","content"}]}
class HttpSearch final : public SearchBackend {
 public:
  HttpSearch(std::string endpoint, std::shared_ptr<net::HttpTransport> transport);
  SearchResults search(const std::string& query, int k) override;

 private:
  std::string endpoint_;
  std::shared_ptr<net::HttpTransport> transport_;
};

class HttpPages final : public PageSource {
 public:
  explicit HttpPages(std::shared_ptr<net::HttpTransport> transport)
      : transport_(std::move(transport)) {}
  Page fetch(const std::string& url) override;

 private:
  std::shared_ptr<net::HttpTransport> transport_;
};

// Throws kInvalidArgument unless k in [1, 20]. Drops non-absolute URLs.
SearchResults web_search(SearchBackend& backend, const std::string& query, int k);

// Throws kInvalidArgument for a non-http(s) URL, kNonHtmlContent for
// binary/non-HTML payloads, plus the source's own errors.
ToolResult scrape(PageSource& source, const std::string& url,
                  std::size_t max_chars = kDefaultMaxContentChars);

std::string render_search_results(const SearchResults& results);

enum class ToolMode { kOffline, kLive };

struct ToolBackends {
  std::shared_ptr<SearchBackend> search;
  std::shared_ptr<PageSource> pages;
};

// Offline mode never touches `transport`.
ToolBackends make_backends(ToolMode mode, const std::filesystem::path& fixtures_dir,
                           std::shared_ptr<net::HttpTransport> transport,
                           const std::string& search_endpoint = {});

ToolSpec web_search_spec();
ToolSpec scrape_spec();

// Registry holding web_search and scrape over the given backends.
ToolRegistry make_standard_registry(const ToolBackends& backends,
                                    std::size_t max_content_chars = kDefaultMaxContentChars);

}  // namespace agentrec::tools
