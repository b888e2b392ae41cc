#include "agentrec/tools/tool_spec.hpp"

#include <algorithm>

namespace agentrec::tools {

std::string_view to_string(ArgType t) {
  switch (t) {
    case ArgType::kString: return "string";
    case ArgType::kInt: return "int";
    case ArgType::kUrl: return "url";
  }
  return "string";
}

bool is_valid_tool_name(std::string_view name) {
  return !name.empty() &&
         std::all_of(name.begin(), name.end(), [](char c) { return (c >= 'a' && c <= 'z') || c == '_'; });
}

}  // namespace agentrec::tools
