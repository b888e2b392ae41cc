#include "agentrec/llm/scripted.hpp"

#include <fstream>

namespace agentrec::llm {

using nlohmann::json;

ScriptedProvider::ScriptedProvider(ProviderScript script, bool multimodal, std::string name)
    : script_(std::move(script)), multimodal_(multimodal), name_(std::move(name)) {}

ProviderReply ScriptedProvider::send(const ChatRequest& request) {
  std::lock_guard lock(mu_);
  seen_.push_back(request);
  if (cursor_ >= script_.entries.size()) {
    throw Error(ErrorCode::kScriptExhausted,
                name_ + ": script exhausted after " + std::to_string(cursor_) + " call(s)");
  }
  const ScriptEntry& entry = script_.entries[cursor_++];
  if (entry.expected_request_digest) {
    const std::string actual = request_digest(request);
    if (actual != *entry.expected_request_digest) {
      throw Error(ErrorCode::kScriptMismatch, name_ + ": request digest " + actual +
                                                  " does not match scripted " +
                                                  *entry.expected_request_digest);
    }
  }
  if (const auto* r = std::get_if<ChatResponse>(&entry.reply)) return *r;
  if (const auto* s = std::get_if<RateLimitSignal>(&entry.reply)) return *s;
  const auto& f = std::get<ScriptedFailure>(entry.reply);
  throw Error(f.code, name_ + ": scripted failure (status " + std::to_string(f.status) + ") " +
                          f.body);
}

std::size_t ScriptedProvider::calls() const {
  std::lock_guard lock(mu_);
  return seen_.size();
}

std::size_t ScriptedProvider::remaining() const {
  std::lock_guard lock(mu_);
  return script_.entries.size() - cursor_;
}

std::vector<ChatRequest> ScriptedProvider::requests() const {
  std::lock_guard lock(mu_);
  return seen_;
}

std::shared_ptr<ScriptedProvider> make_scripted_provider(ProviderScript script, bool multimodal,
                                                         std::string name) {
  return std::make_shared<ScriptedProvider>(std::move(script), multimodal, std::move(name));
}

ProviderScript script_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::kInvalidArgument, "script must be a JSON array");
  ProviderScript script;
  for (const auto& e : j) {
    ScriptEntry entry;
    if (e.contains("expected_request_digest") && !e.at("expected_request_digest").is_null()) {
      entry.expected_request_digest = e.at("expected_request_digest").get<std::string>();
    }
    if (e.contains("response")) {
      entry.reply = response_from_json(e.at("response"));
    } else if (e.contains("rate_limit")) {
      RateLimitSignal s;
      const auto& rl = e.at("rate_limit");
      if (rl.is_object()) {
        if (rl.contains("retry_after_ms")) s.retry_after = Millis{rl.at("retry_after_ms").get<long>()};
        s.detail = rl.value("detail", "");
      }
      entry.reply = s;
    } else if (e.contains("error")) {
      const auto& err = e.at("error");
      ScriptedFailure f;
      const std::string kind = err.value("kind", "transport");
      if (kind == "transport") {
        f.code = ErrorCode::kTransportError;
      } else if (kind == "provider") {
        f.code = ErrorCode::kProviderError;
      } else {
        throw Error(ErrorCode::kInvalidArgument, "unknown scripted error kind: " + kind);
      }
      f.status = err.value("status", 0);
      f.body = err.value("body", "");
      entry.reply = f;
    } else {
      throw Error(ErrorCode::kInvalidArgument,
                  "script entry needs one of response / rate_limit / error");
    }
    script.entries.push_back(std::move(entry));
  }
  return script;
}

json to_json(const ProviderScript& script) {
  json arr = json::array();
  for (const auto& e : script.entries) {
    json j = json::object();
    if (e.expected_request_digest) j["expected_request_digest"] = *e.expected_request_digest;
    if (const auto* r = std::get_if<ChatResponse>(&e.reply)) {
      j["response"] = to_json(*r);
    } else if (const auto* s = std::get_if<RateLimitSignal>(&e.reply)) {
      json rl = json::object();
      if (s->retry_after) rl["retry_after_ms"] = s->retry_after->count();
      if (!s->detail.empty()) rl["detail"] = s->detail;
      j["rate_limit"] = rl;
    } else {
      const auto& f = std::get<ScriptedFailure>(e.reply);
      j["error"] = json{{"kind", f.code == ErrorCode::kProviderError ? "provider" : "transport"},
                        {"status", f.status},
                        {"body", f.body}};
    }
    arr.push_back(j);
  }
  return arr;
}

ProviderScript load_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open script " + path.string());
  try {
    return script_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, "bad script " + path.string() + ": " + e.what());
  }
}

ScriptEntry reply_text(std::string text) {
  ChatResponse r;
  r.text = std::move(text);
  return ScriptEntry{std::nullopt, r};
}

ScriptEntry rate_limit() { return ScriptEntry{std::nullopt, RateLimitSignal{}}; }

}  // namespace agentrec::llm
