#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>

namespace agentrec::tools {

enum class ArgType { kString, kInt, kUrl };

std::string_view to_string(ArgType t);

struct ArgSpec {
  ArgType type = ArgType::kString;
  bool required = true;

  bool operator==(const ArgSpec&) const = default;
};

struct ToolSpec {
  std::string name;  // [a-z_]+
  std::string description;
  std::map<std::string, ArgSpec> arg_schema;

  bool operator==(const ToolSpec&) const = default;
};

bool is_valid_tool_name(std::string_view name);

using ArgValue = std::variant<std::int64_t, std::string>;

}  // namespace agentrec::tools
