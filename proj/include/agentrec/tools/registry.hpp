#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agentrec/tools/tool_spec.hpp"
#include "agentrec/util/clock.hpp"

namespace agentrec::tools {

struct ToolCall {
  std::string tool_name;
  std::map<std::string, ArgValue> args;

  const std::string* string_arg(const std::string& name) const;
  std::optional<std::int64_t> int_arg(const std::string& name) const;
  bool operator==(const ToolCall&) const = default;
};

struct ToolResult {
  std::string tool_name;
  bool ok = false;
  std::string content;
  std::vector<std::string> source_urls;
  Millis elapsed{0};

  bool operator==(const ToolResult&) const = default;
};

inline constexpr std::size_t kDefaultMaxContentChars = 8000;
inline constexpr std::string_view kTruncationMarker = "\n[...truncated]";

// Bounds `text` to max_chars bytes in total, marker included, without
// splitting a UTF-8 sequence.
std::string truncate_content(std::string_view text, std::size_t max_chars);

// Executors may throw agentrec::Error; the registry converts that into an
// ok=false ToolResult.
using ToolExecutor = std::function<ToolResult(const ToolCall&)>;

class ToolRegistry {
 public:
  struct Entry {
    ToolSpec spec;
    ToolExecutor executor;
  };

  // Throws kDuplicateTool, kInvalidArgument (bad name), kRegistryFrozen.
  void add(ToolSpec spec, ToolExecutor executor);
  // Throws kNotFound.
  const Entry& resolve(std::string_view name) const;
  const Entry* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  std::vector<std::string> names() const;
  std::vector<ToolSpec> specs(const std::vector<std::string>& allowed) const;

  // Runs the executor with content bounded to max_content_chars. Executor
  // failures come back as ok=false with the error text as content.
  ToolResult execute(const ToolCall& call, Clock& clock,
                     std::size_t max_content_chars = kDefaultMaxContentChars) const;

 private:
  std::map<std::string, Entry, std::less<>> entries_;
  bool frozen_ = false;
};

ToolRegistry& register_tool(ToolRegistry& registry, ToolSpec spec, ToolExecutor executor);

// Throws kMalformedArgs.
void validate_args(const ToolSpec& spec, const std::map<std::string, ArgValue>& args);

// Finds the first well-formed block
//   ACTION: <tool_name>
//   ARGS: <json object>
// nullopt when there is none (prose answer). Throws kUnknownTool for an
// unregistered name and kMalformedArgs when args break the schema.
std::optional<ToolCall> parse_tool_call(std::string_view model_text, const ToolRegistry& registry);
std::string format_tool_call(const ToolCall& call);

}  // namespace agentrec::tools
