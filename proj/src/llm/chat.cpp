#include "agentrec/llm/chat.hpp"

#include <algorithm>
#include <cmath>

#include "agentrec/core/json.hpp"
#include "agentrec/error.hpp"
#include "agentrec/util/digest.hpp"

namespace agentrec::llm {

using nlohmann::json;

std::string_view to_string(Role r) {
  switch (r) {
    case Role::kSystem: return "system";
    case Role::kUser: return "user";
    case Role::kAssistant: return "assistant";
    case Role::kTool: return "tool";
  }
  return "user";
}

Role parse_role(std::string_view s) {
  if (s == "system") return Role::kSystem;
  if (s == "user") return Role::kUser;
  if (s == "assistant") return Role::kAssistant;
  if (s == "tool") return Role::kTool;
  throw Error(ErrorCode::kInvalidArgument, "unknown role: " + std::string(s));
}

Message Message::text(Role role, std::string body) {
  return Message{role, {TextPart{std::move(body)}}};
}

std::string Message::joined_text() const {
  std::string out;
  for (const auto& p : parts) {
    if (const auto* t = std::get_if<TextPart>(&p)) {
      if (!out.empty()) out.push_back('\n');
      out += t->text;
    }
  }
  return out;
}

bool Message::has_image() const {
  return std::any_of(parts.begin(), parts.end(),
                     [](const Part& p) { return std::holds_alternative<ImagePart>(p); });
}

bool ChatRequest::has_image() const {
  return std::any_of(messages.begin(), messages.end(),
                     [](const Message& m) { return m.has_image(); });
}

void validate(const ChatRequest& r) {
  if (r.messages.empty()) throw Error(ErrorCode::kInvalidArgument, "request has no messages");
  const Role first = r.messages.front().role;
  if (first != Role::kSystem && first != Role::kUser) {
    throw Error(ErrorCode::kInvalidArgument, "first message must be system or user");
  }
  if (!std::isfinite(r.temperature) || r.temperature < 0.0 || r.temperature > 2.0) {
    throw Error(ErrorCode::kInvalidArgument, "temperature must lie in [0,2]");
  }
  if (r.max_tokens < 1) throw Error(ErrorCode::kInvalidArgument, "max_tokens must be positive");
  for (const auto& m : r.messages) {
    if (m.parts.empty()) throw Error(ErrorCode::kInvalidArgument, "message has no parts");
    if (m.has_image() && m.role != Role::kUser) {
      throw Error(ErrorCode::kInvalidArgument, "image parts are only allowed in user messages");
    }
  }
}

std::string_view to_string(FinishReason f) {
  switch (f) {
    case FinishReason::kStop: return "stop";
    case FinishReason::kLength: return "length";
    case FinishReason::kToolCall: return "tool_call";
    case FinishReason::kError: return "error";
  }
  return "stop";
}

FinishReason parse_finish_reason(std::string_view s) {
  if (s == "stop") return FinishReason::kStop;
  if (s == "length") return FinishReason::kLength;
  if (s == "tool_call") return FinishReason::kToolCall;
  if (s == "error") return FinishReason::kError;
  throw Error(ErrorCode::kInvalidArgument, "unknown finish_reason: " + std::string(s));
}

namespace {

json part_to_json(const Part& p) {
  if (const auto* t = std::get_if<TextPart>(&p)) return json{{"text", t->text}};
  return json{{"image", std::get<ImagePart>(p).image}};
}

json spec_to_json(const tools::ToolSpec& s) {
  json args = json::object();
  for (const auto& [name, a] : s.arg_schema) {
    args[name] = json{{"type", tools::to_string(a.type)}, {"required", a.required}};
  }
  return json{{"name", s.name}, {"description", s.description}, {"arg_schema", args}};
}

tools::ArgType parse_arg_type(const std::string& s) {
  if (s == "string") return tools::ArgType::kString;
  if (s == "int") return tools::ArgType::kInt;
  if (s == "url") return tools::ArgType::kUrl;
  throw Error(ErrorCode::kInvalidArgument, "unknown arg type: " + s);
}

}  // namespace

json to_json(const ChatRequest& r) {
  json messages = json::array();
  for (const auto& m : r.messages) {
    json parts = json::array();
    for (const auto& p : m.parts) parts.push_back(part_to_json(p));
    messages.push_back(json{{"role", to_string(m.role)}, {"parts", parts}});
  }
  json j{{"model_id", r.model_id},
         {"messages", messages},
         {"temperature", r.temperature},
         {"max_tokens", r.max_tokens}};
  if (r.tool_specs) {
    json specs = json::array();
    for (const auto& s : *r.tool_specs) specs.push_back(spec_to_json(s));
    j["tool_specs"] = specs;
  } else {
    j["tool_specs"] = nullptr;
  }
  return j;
}

ChatRequest request_from_json(const json& j) {
  ChatRequest r;
  r.model_id = j.at("model_id").get<std::string>();
  for (const auto& m : j.at("messages")) {
    Message msg;
    msg.role = parse_role(m.at("role").get<std::string>());
    for (const auto& p : m.at("parts")) {
      if (p.contains("image")) {
        msg.parts.emplace_back(ImagePart{p.at("image").get<core::ImageAttachment>()});
      } else {
        msg.parts.emplace_back(TextPart{p.at("text").get<std::string>()});
      }
    }
    r.messages.push_back(std::move(msg));
  }
  r.temperature = j.value("temperature", kDefaultTemperature);
  r.max_tokens = j.value("max_tokens", kDefaultMaxTokens);
  if (j.contains("tool_specs") && !j.at("tool_specs").is_null()) {
    std::vector<tools::ToolSpec> specs;
    for (const auto& s : j.at("tool_specs")) {
      tools::ToolSpec spec{s.at("name").get<std::string>(), s.value("description", ""), {}};
      for (const auto& [name, a] : s.at("arg_schema").items()) {
        spec.arg_schema[name] = {parse_arg_type(a.at("type").get<std::string>()),
                                 a.value("required", true)};
      }
      specs.push_back(std::move(spec));
    }
    r.tool_specs = std::move(specs);
  }
  return r;
}

std::string request_digest(const ChatRequest& request) {
  return util::sha256_hex(to_json(request).dump());
}

json to_json(const ChatResponse& r) {
  return json{{"text", r.text},
              {"finish_reason", to_string(r.finish_reason)},
              {"usage",
               {{"prompt_tokens", r.usage.prompt_tokens},
                {"completion_tokens", r.usage.completion_tokens}}},
              {"latency_ms", r.latency.count()}};
}

ChatResponse response_from_json(const json& j) {
  ChatResponse r;
  r.text = j.value("text", "");
  r.finish_reason = parse_finish_reason(j.value("finish_reason", "stop"));
  if (j.contains("usage")) {
    r.usage.prompt_tokens = j.at("usage").value("prompt_tokens", 0);
    r.usage.completion_tokens = j.at("usage").value("completion_tokens", 0);
  }
  if (r.usage.prompt_tokens < 0 || r.usage.completion_tokens < 0) {
    throw Error(ErrorCode::kInvalidArgument, "usage counts must be >= 0");
  }
  r.latency = Millis{j.value("latency_ms", 0)};
  return r;
}

}  // namespace agentrec::llm
