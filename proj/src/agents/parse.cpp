#include "agentrec/agents/parse.hpp"

#include <algorithm>
#include <cctype>

#include "agentrec/util/http.hpp"
#include "agentrec/util/text.hpp"

namespace agentrec::agents {

namespace {

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

// "12. rest" or "12) rest" -> rest; nullopt otherwise.
std::optional<std::string_view> strip_number(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && is_digit(line[i])) ++i;
  if (i == 0 || i > 3 || i >= line.size()) return std::nullopt;
  if (line[i] != '.' && line[i] != ')') return std::nullopt;
  ++i;
  if (i >= line.size() || (line[i] != ' ' && line[i] != '\t')) return std::nullopt;
  return line.substr(i);
}

// Em dash, en dash, then ASCII hyphen, each surrounded by spaces.
std::pair<std::string, std::string> split_name(std::string_view body) {
  for (std::string_view sep : {" \xE2\x80\x94 ", " \xE2\x80\x93 ", " - "}) {
    const auto pos = body.find(sep);
    if (pos != std::string_view::npos) {
      return {util::trim(body.substr(0, pos)), util::trim(body.substr(pos + sep.size()))};
    }
  }
  return {util::trim(body), ""};
}

std::string strip_emphasis(std::string s) {
  while (!s.empty() && (s.front() == '*' || s.front() == '_')) s.erase(s.begin());
  while (!s.empty() && (s.back() == '*' || s.back() == '_')) s.pop_back();
  return util::trim(s);
}

std::optional<core::Price> find_price(std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '$') continue;
    std::string amount;
    std::size_t j = i + 1;
    bool dot = false;
    while (j < text.size()) {
      const char c = text[j];
      if (is_digit(c)) {
        amount.push_back(c);
      } else if (c == ',' && !dot && j + 1 < text.size() && is_digit(text[j + 1])) {
        // thousands separator
      } else if (c == '.' && !dot && j + 1 < text.size() && is_digit(text[j + 1])) {
        dot = true;
        amount.push_back(c);
      } else {
        break;
      }
      ++j;
    }
    if (!amount.empty()) return core::Price{amount, "USD"};
  }
  return std::nullopt;
}

core::ProductSource attribute(const std::string& url,
                              const std::vector<runtime::ToolLogEntry>& tool_log) {
  // A page the agent scraped beats one it only saw in search results.
  bool searched = false;
  for (const auto& e : tool_log) {
    if (!e.result.ok) continue;
    if (std::find(e.result.source_urls.begin(), e.result.source_urls.end(), url) ==
        e.result.source_urls.end()) {
      continue;
    }
    if (e.call.tool_name == "scrape") return core::ProductSource::kScrape;
    searched = true;
  }
  return searched ? core::ProductSource::kWebSearch : core::ProductSource::kModelKnowledge;
}

}  // namespace

RecommendationParse parse_recommendations(std::string_view text, std::string_view agent_id,
                                          const std::vector<runtime::ToolLogEntry>& tool_log) {
  RecommendationParse out;
  std::vector<std::string> rest;
  for (const auto& raw : util::split_lines(text)) {
    const std::string line = util::trim(raw);
    const auto body_view = strip_number(line);
    if (!body_view) {
      if (!line.empty()) rest.push_back(line);
      continue;
    }
    std::string body = util::trim(*body_view);
    std::optional<std::string> url;
    if (!body.empty() && body.back() == ']') {
      const auto open = body.rfind('[');
      if (open != std::string::npos) {
        const std::string inside = util::trim(std::string_view(body).substr(open + 1, body.size() - open - 2));
        if (net::is_absolute_http_url(inside)) url = inside;
        body = util::trim(std::string_view(body).substr(0, open));
      }
    }
    auto [name, rationale] = split_name(body);
    name = strip_emphasis(name);
    std::optional<std::string> brand;
    if (!name.empty() && name.back() == ')') {
      const auto open = name.rfind(" (");
      if (open != std::string::npos) {
        const std::string b = util::trim(std::string_view(name).substr(open + 2, name.size() - open - 3));
        if (!b.empty()) {
          brand = b;
          name = strip_emphasis(name.substr(0, open));
        }
      }
    }
    if (name.empty()) {
      rest.push_back(line);
      continue;
    }
    core::Recommendation r;
    r.product.name = name;
    r.product.brand = brand;
    r.product.url = url;
    r.product.price = find_price(rationale);
    if (!r.product.price) r.product.price = find_price(name);
    r.product.source = url ? attribute(*url, tool_log) : core::ProductSource::kModelKnowledge;
    r.rationale = rationale;
    r.agent_id = std::string(agent_id);
    out.items.push_back(std::move(r));
  }
  core::renumber(out.items);
  for (std::size_t i = 0; i < rest.size(); ++i) {
    if (i) out.unparsed_remainder += '\n';
    out.unparsed_remainder += rest[i];
  }
  return out;
}

FollowupParse parse_followups(std::string_view text) {
  static constexpr std::string_view kPrefix = "FOLLOWUP:";
  FollowupParse out;
  const auto lines = util::split_lines(text);
  std::size_t start = lines.size();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (util::starts_with_ci(util::trim(lines[i]), kPrefix)) {
      start = i;
      break;
    }
  }
  std::string answer;
  for (std::size_t i = 0; i < start; ++i) {
    if (i) answer += '\n';
    answer += lines[i];
  }
  out.answer = util::trim(answer);

  std::vector<std::string> seen;
  auto add = [&](std::string q) {
    q = util::trim(q);
    const std::string key = util::normalize_key(q);
    if (q.empty() || std::find(seen.begin(), seen.end(), key) != seen.end()) return;
    seen.push_back(key);
    if (out.questions.size() < kMaxFollowups) out.questions.push_back(std::move(q));
  };
  for (std::size_t i = start; i < lines.size(); ++i) {
    const std::string line = util::trim(lines[i]);
    if (line.empty()) continue;
    if (util::starts_with_ci(line, kPrefix)) {
      add(line.substr(kPrefix.size()));
    } else if (line[0] == '-' || line[0] == '*') {
      add(line.substr(1));
    } else if (auto numbered = strip_number(line)) {
      add(std::string(*numbered));
    } else {
      break;
    }
  }
  return out;
}

}  // namespace agentrec::agents
