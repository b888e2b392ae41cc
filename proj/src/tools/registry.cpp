#include "agentrec/tools/registry.hpp"

#include <json.hpp>

#include "agentrec/error.hpp"
#include "agentrec/util/http.hpp"
#include "agentrec/util/text.hpp"

namespace agentrec::tools {

using nlohmann::json;

const std::string* ToolCall::string_arg(const std::string& name) const {
  auto it = args.find(name);
  if (it == args.end()) return nullptr;
  return std::get_if<std::string>(&it->second);
}

std::optional<std::int64_t> ToolCall::int_arg(const std::string& name) const {
  auto it = args.find(name);
  if (it == args.end()) return std::nullopt;
  if (const auto* v = std::get_if<std::int64_t>(&it->second)) return *v;
  return std::nullopt;
}

std::string truncate_content(std::string_view text, std::size_t max_chars) {
  if (text.size() <= max_chars) return std::string(text);
  if (max_chars <= kTruncationMarker.size()) {
    return std::string(util::utf8_prefix(kTruncationMarker, max_chars));
  }
  std::string out(util::utf8_prefix(text, max_chars - kTruncationMarker.size()));
  out += kTruncationMarker;
  return out;
}

void ToolRegistry::add(ToolSpec spec, ToolExecutor executor) {
  if (frozen_) throw Error(ErrorCode::kRegistryFrozen, "tool registry is frozen");
  if (!is_valid_tool_name(spec.name)) {
    throw Error(ErrorCode::kInvalidArgument, "tool name must match [a-z_]+: " + spec.name);
  }
  if (entries_.count(spec.name)) {
    throw Error(ErrorCode::kDuplicateTool, "tool already registered: " + spec.name);
  }
  const std::string name = spec.name;
  entries_.emplace(name, Entry{std::move(spec), std::move(executor)});
}

const ToolRegistry::Entry* ToolRegistry::find(std::string_view name) const {
  auto it = entries_.find(name);
  return it == entries_.end() ? nullptr : &it->second;
}

const ToolRegistry::Entry& ToolRegistry::resolve(std::string_view name) const {
  if (const auto* e = find(name)) return *e;
  throw Error(ErrorCode::kNotFound, "no such tool: " + std::string(name));
}

std::vector<std::string> ToolRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, e] : entries_) out.push_back(name);
  return out;
}

std::vector<ToolSpec> ToolRegistry::specs(const std::vector<std::string>& allowed) const {
  std::vector<ToolSpec> out;
  for (const auto& name : allowed) out.push_back(resolve(name).spec);
  return out;
}

ToolResult ToolRegistry::execute(const ToolCall& call, Clock& clock,
                                 std::size_t max_content_chars) const {
  const Timestamp start = clock.now();
  ToolResult result;
  try {
    const Entry& entry = resolve(call.tool_name);
    validate_args(entry.spec, call.args);
    result = entry.executor(call);
  } catch (const Error& e) {
    result = ToolResult{call.tool_name, false,
                        std::string(to_string(e.code())) + ": " + e.what(), {}, Millis{0}};
  }
  result.tool_name = call.tool_name;
  result.content = truncate_content(result.content, max_content_chars);
  result.elapsed = std::chrono::duration_cast<Millis>(clock.now() - start);
  return result;
}

ToolRegistry& register_tool(ToolRegistry& registry, ToolSpec spec, ToolExecutor executor) {
  registry.add(std::move(spec), std::move(executor));
  return registry;
}

void validate_args(const ToolSpec& spec, const std::map<std::string, ArgValue>& args) {
  for (const auto& [name, value] : args) {
    auto it = spec.arg_schema.find(name);
    if (it == spec.arg_schema.end()) {
      throw Error(ErrorCode::kMalformedArgs, spec.name + ": unexpected argument '" + name + "'");
    }
    const ArgType type = it->second.type;
    const bool is_int = std::holds_alternative<std::int64_t>(value);
    if (type == ArgType::kInt && !is_int) {
      throw Error(ErrorCode::kMalformedArgs, spec.name + ": argument '" + name + "' must be int");
    }
    if (type != ArgType::kInt && is_int) {
      throw Error(ErrorCode::kMalformedArgs,
                  spec.name + ": argument '" + name + "' must be a string");
    }
    if (type == ArgType::kUrl && !net::is_absolute_http_url(std::get<std::string>(value))) {
      throw Error(ErrorCode::kMalformedArgs,
                  spec.name + ": argument '" + name + "' must be an absolute http(s) URL");
    }
  }
  for (const auto& [name, arg] : spec.arg_schema) {
    if (arg.required && !args.count(name)) {
      throw Error(ErrorCode::kMalformedArgs, spec.name + ": missing argument '" + name + "'");
    }
  }
}

namespace {

// End offset (exclusive) of the JSON object starting at text[start] == '{',
// honouring string literals; npos when unbalanced.
std::size_t object_end(std::string_view text, std::size_t start) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

std::optional<json> parse_args_object(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\r' || text[i] == '\n')) ++i;
  if (i >= text.size() || text[i] != '{') return std::nullopt;
  const std::size_t end = object_end(text, i);
  if (end == std::string_view::npos) return std::nullopt;
  json j = json::parse(text.substr(i, end - i), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  return j;
}

std::map<std::string, ArgValue> to_args(const std::string& tool, const json& obj) {
  std::map<std::string, ArgValue> args;
  for (const auto& [key, value] : obj.items()) {
    if (value.is_number_integer()) {
      args[key] = value.get<std::int64_t>();
    } else if (value.is_string()) {
      args[key] = value.get<std::string>();
    } else {
      throw Error(ErrorCode::kMalformedArgs,
                  tool + ": argument '" + key + "' must be a string or integer");
    }
  }
  return args;
}

}  // namespace

std::optional<ToolCall> parse_tool_call(std::string_view model_text, const ToolRegistry& registry) {
  static constexpr std::string_view kAction = "ACTION:";
  static constexpr std::string_view kArgs = "ARGS:";

  std::size_t line_start = 0;
  while (line_start < model_text.size()) {
    std::size_t line_end = model_text.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = model_text.size();
    const std::string line = util::trim(model_text.substr(line_start, line_end - line_start));
    const std::size_t next = line_end + 1;

    if (line.rfind(kAction, 0) == 0) {
      const std::string name = util::trim(std::string_view(line).substr(kAction.size()));
      // ARGS must be on the following line; the object may span lines.
      std::size_t args_start = next;
      while (args_start < model_text.size() &&
             (model_text[args_start] == ' ' || model_text[args_start] == '\t')) {
        ++args_start;
      }
      if (!name.empty() && name.find(' ') == std::string::npos &&
          args_start < model_text.size() &&
          model_text.substr(args_start, kArgs.size()) == kArgs) {
        const auto obj = parse_args_object(model_text.substr(args_start + kArgs.size()));
        if (obj) {
          const auto* entry = registry.find(name);
          if (!entry) throw Error(ErrorCode::kUnknownTool, "unknown tool: " + name);
          ToolCall call{name, to_args(name, *obj)};
          validate_args(entry->spec, call.args);
          return call;
        }
      }
    }
    line_start = next;
  }
  return std::nullopt;
}

std::string format_tool_call(const ToolCall& call) {
  json args = json::object();
  for (const auto& [k, v] : call.args) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) {
      args[k] = *i;
    } else {
      args[k] = std::get<std::string>(v);
    }
  }
  return "ACTION: " + call.tool_name + "\nARGS: " + args.dump();
}

}  // namespace agentrec::tools
