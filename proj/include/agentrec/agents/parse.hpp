#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "agentrec/core/domain.hpp"
#include "agentrec/runtime/agent.hpp"

namespace agentrec::agents {

struct RecommendationParse {
  std::vector<core::Recommendation> items;  // ranks 1..n in text order
  std::string unparsed_remainder;           // lines that are not list items
};

// Numbered list grammar, one item per line:
//   N. <name> <sep> <rationale> [url]
// where <sep> is an em dash (U+2014), en dash (U+2013) or " - ". "N)"
// numbering is accepted too. A trailing
// "(Brand)" on the name sets the brand; the first "$amount" in the line sets
// a USD price. URLs seen in the tool log mark the product as sourced from
// that tool, anything else counts as model knowledge.
RecommendationParse parse_recommendations(std::string_view text, std::string_view agent_id,
                                          const std::vector<runtime::ToolLogEntry>& tool_log = {});

inline constexpr std::size_t kMaxFollowups = 3;

struct FollowupParse {
  std::string answer;                  // text before the FOLLOWUP block
  std::vector<std::string> questions;  // at most kMaxFollowups, deduplicated
};

// Splits "answer ... FOLLOWUP: question" output. The block starts at the
// first line beginning with "FOLLOWUP:"; later lines may repeat the prefix
// or be bullets ("- q", "1. q").
FollowupParse parse_followups(std::string_view text);

}  // namespace agentrec::agents
