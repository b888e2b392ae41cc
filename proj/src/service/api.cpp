#include "agentrec/service/api.hpp"

#include <cstdlib>
#include <random>

#include "agentrec/core/json.hpp"
#include "agentrec/error.hpp"
#include "agentrec/eval/report.hpp"
#include "agentrec/util/digest.hpp"
#include "agentrec/util/fs.hpp"
#include "agentrec/util/text.hpp"

namespace agentrec::service {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(ApiErrorCode code) {
  switch (code) {
    case ApiErrorCode::kInvalidBody: return "invalid_body";
    case ApiErrorCode::kInvalidQuery: return "invalid_query";
    case ApiErrorCode::kUnsupportedMedia: return "unsupported_media";
    case ApiErrorCode::kImageTooLarge: return "image_too_large";
    case ApiErrorCode::kUnknownSession: return "unknown_session";
    case ApiErrorCode::kUnknownFollowup: return "unknown_followup";
    case ApiErrorCode::kAlreadyAnswered: return "already_answered";
    case ApiErrorCode::kAllAgentsFailed: return "all_agents_failed";
    case ApiErrorCode::kNoFixture: return "no_fixture";
    case ApiErrorCode::kNoReport: return "no_report";
    case ApiErrorCode::kUnknownTrace: return "unknown_trace";
    case ApiErrorCode::kNotFound: return "not_found";
    case ApiErrorCode::kMethodNotAllowed: return "method_not_allowed";
    case ApiErrorCode::kInternal: return "internal";
  }
  return "internal";
}

int http_status(ApiErrorCode code) {
  switch (code) {
    case ApiErrorCode::kInvalidBody: return 400;
    case ApiErrorCode::kInvalidQuery:
    case ApiErrorCode::kUnsupportedMedia:
    case ApiErrorCode::kImageTooLarge:
    case ApiErrorCode::kNoFixture: return 422;
    case ApiErrorCode::kUnknownSession:
    case ApiErrorCode::kUnknownFollowup:
    case ApiErrorCode::kNoReport:
    case ApiErrorCode::kUnknownTrace:
    case ApiErrorCode::kNotFound: return 404;
    case ApiErrorCode::kAlreadyAnswered: return 409;
    case ApiErrorCode::kMethodNotAllowed: return 405;
    case ApiErrorCode::kAllAgentsFailed: return 502;
    case ApiErrorCode::kInternal: return 500;
  }
  return 500;
}

json ApiError::to_json() const {
  return {{"error", {{"code", to_string(code)}, {"message", message}, {"status", status()}}}};
}

ApiError api_error_from(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kEmptyQuery:
    case ErrorCode::kInvalidArgument: return {ApiErrorCode::kInvalidQuery, e.what()};
    case ErrorCode::kUnsupportedMedia: return {ApiErrorCode::kUnsupportedMedia, e.what()};
    case ErrorCode::kUnknownFollowup: return {ApiErrorCode::kUnknownFollowup, e.what()};
    case ErrorCode::kAllAgentsFailed: return {ApiErrorCode::kAllAgentsFailed, e.what()};
    case ErrorCode::kNoFixture: return {ApiErrorCode::kNoFixture, e.what()};
    default: return {ApiErrorCode::kInternal, std::string(agentrec::to_string(e.code())) + ": " + e.what()};
  }
}

namespace {

struct ApiFailure {
  ApiError error;
};

[[noreturn]] void fail(ApiErrorCode code, std::string message) {
  throw ApiFailure{{code, std::move(message)}};
}

ApiResponse error_response(const ApiError& e) { return {e.status(), e.to_json()}; }

std::vector<std::string> path_segments(std::string_view path) {
  if (const auto q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i <= path.size()) {
    const auto j = path.find('/', i);
    const auto seg = path.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i);
    if (!seg.empty()) out.emplace_back(seg);
    if (j == std::string_view::npos) break;
    i = j + 1;
  }
  return out;
}

json parse_body(std::string_view body) {
  if (util::trim(body).empty()) return json::object();
  try {
    json j = json::parse(body);
    if (!j.is_object()) fail(ApiErrorCode::kInvalidBody, "request body must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    fail(ApiErrorCode::kInvalidBody, std::string("malformed JSON: ") + e.what());
  }
}

std::string string_field(const json& body, const char* key, bool required) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) {
    if (required) fail(ApiErrorCode::kInvalidBody, std::string("'") + key + "' is required");
    return "";
  }
  if (!it->is_string()) fail(ApiErrorCode::kInvalidBody, std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

std::optional<core::ImageAttachment> image_field(const json& body) {
  auto it = body.find("image");
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_object()) fail(ApiErrorCode::kInvalidBody, "'image' must be an object");
  const std::string data = string_field(*it, "data", true);
  const std::string media = string_field(*it, "media_type", true);
  // Base64 expands 3 bytes to 4 characters.
  if (data.size() / 4 * 3 > kMaxImageBytes + 3) {
    fail(ApiErrorCode::kImageTooLarge, "image exceeds " + std::to_string(kMaxImageBytes) + " bytes");
  }
  core::ImageAttachment img;
  try {
    img.media_type = core::parse_media_type(media);
    img.bytes = util::base64_decode(data);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kUnsupportedMedia) fail(ApiErrorCode::kUnsupportedMedia, e.what());
    fail(ApiErrorCode::kInvalidBody, std::string("image data: ") + e.what());
  }
  if (img.bytes.size() > kMaxImageBytes) {
    fail(ApiErrorCode::kImageTooLarge, "image exceeds " + std::to_string(kMaxImageBytes) + " bytes");
  }
  if (it->contains("caption")) img.caption = string_field(*it, "caption", false);
  return img;
}

bool is_hex_id(std::string_view s) {
  if (s.empty() || s.size() > 64) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
  });
}

}  // namespace

json turn_response(const core::SessionTurn& turn, const core::SessionState& session) {
  json j = turn;
  json pending = json::array();
  for (const auto& q : session.pending_followups) {
    if (!q.answered) pending.push_back(q);
  }
  j["pending_followups"] = pending;
  j["session_id"] = session.session_id;
  return j;
}

Api::Api(ApiDeps deps) : deps_(std::move(deps)), id_state_(std::random_device{}()) {
  if (!deps_.registry || !deps_.providers || !deps_.clock) {
    throw Error(ErrorCode::kInvalidArgument, "Api needs a registry, provider source and clock");
  }
  id_state_ = (id_state_ << 32) ^ std::random_device{}();
}

std::size_t Api::session_count() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

std::shared_ptr<Api::Session> Api::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) fail(ApiErrorCode::kUnknownSession, "no session '" + id + "'");
  return it->second;
}

std::string Api::new_session_id() {
  // Caller holds mu_. splitmix64 over a random seed.
  std::uint64_t z = (id_state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  static const char* kHex = "0123456789abcdef";
  std::string id = "s";
  for (int i = 15; i >= 0; --i) id += kHex[(z >> (i * 4)) & 0xF];
  return id;
}

agents::Pipeline Api::pipeline() {
  auto cfg = deps_.pipeline;
  if (deps_.trace_dir) cfg.trace_dir = deps_.trace_dir;
  return agents::Pipeline(std::move(cfg), *deps_.registry, *deps_.providers, deps_.profiles, *deps_.clock);
}

ApiResponse Api::handle(std::string_view method, std::string_view path, std::string_view body) {
  try {
    const auto seg = path_segments(path);
    auto route = [&](std::string_view m, std::size_t n) { return seg.size() == n && method == m; };
    auto known = [&](std::size_t n) { return seg.size() == n; };

    if (!seg.empty() && seg[0] == "sessions") {
      if (route("POST", 1)) return create_session(parse_body(body));
      if (route("GET", 2)) return get_session(seg[1]);
      if (route("POST", 3) && seg[2] == "query") return post_query(seg[1], parse_body(body));
      if (route("POST", 4) && seg[2] == "followups") return post_followup(seg[1], seg[3], parse_body(body));
      if (known(1) || known(2) || (known(3) && seg[2] == "query") || (known(4) && seg[2] == "followups")) {
        fail(ApiErrorCode::kMethodNotAllowed, std::string(method) + " not allowed on " + std::string(path));
      }
    } else if (seg.size() == 1 && seg[0] == "reports") {
      if (method == "GET") return get_report();
      fail(ApiErrorCode::kMethodNotAllowed, std::string(method) + " not allowed on /reports");
    } else if (seg.size() == 2 && seg[0] == "traces") {
      if (method == "GET") return get_trace(seg[1]);
      fail(ApiErrorCode::kMethodNotAllowed, std::string(method) + " not allowed on /traces");
    } else if (seg.size() == 1 && seg[0] == "health") {
      return {200, {{"status", "ok"}}};
    }
    fail(ApiErrorCode::kNotFound, "no route for " + std::string(method) + " " + std::string(path));
  } catch (const ApiFailure& f) {
    return error_response(f.error);
  } catch (const Error& e) {
    return error_response(api_error_from(e));
  } catch (const std::exception& e) {
    return error_response({ApiErrorCode::kInternal, e.what()});
  }
}

ApiResponse Api::create_session(const json& body) {
  const std::string user_id = util::trim(string_field(body, "user_id", true));
  if (user_id.empty()) fail(ApiErrorCode::kInvalidBody, "'user_id' must be non-empty");
  if (!profile::is_valid_user_id(user_id)) {
    fail(ApiErrorCode::kInvalidBody, "'user_id' may only contain letters, digits, '_', '.', '-'");
  }
  if (deps_.profiles) deps_.profiles->ensure(user_id);
  auto s = std::make_shared<Session>();
  s->state.user_id = user_id;
  {
    std::lock_guard lock(mu_);
    std::string id;
    do {
      id = new_session_id();
    } while (sessions_.count(id));
    s->state.session_id = id;
    sessions_[id] = s;
  }
  return {201, {{"session_id", s->state.session_id}, {"user_id", user_id}}};
}

ApiResponse Api::get_session(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  return {200, json(s->state)};
}

ApiResponse Api::post_query(const std::string& id, const json& body) {
  auto s = find(id);
  core::Query q;
  q.text = string_field(body, "text", false);
  q.image = image_field(body);
  std::lock_guard lock(s->mu);
  // Work on a copy so a failed turn leaves the session untouched.
  core::SessionState next = s->state;
  auto p = pipeline();
  const auto turn = p.run_turn(next, std::move(q));
  s->state = std::move(next);
  return {200, turn_response(turn, s->state)};
}

ApiResponse Api::post_followup(const std::string& id, const std::string& qid, const json& body) {
  auto s = find(id);
  const std::string answer = string_field(body, "answer", true);
  std::lock_guard lock(s->mu);
  const auto& pending = s->state.pending_followups;
  auto it = std::find_if(pending.begin(), pending.end(),
                         [&](const core::FollowupQuestion& f) { return f.question_id == qid; });
  if (it == pending.end()) fail(ApiErrorCode::kUnknownFollowup, "no follow-up '" + qid + "'");
  if (it->answered) fail(ApiErrorCode::kAlreadyAnswered, "follow-up '" + qid + "' was already answered");
  core::SessionState next = s->state;
  auto p = pipeline();
  const auto turn = p.answer_followup(next, qid, answer);
  s->state = std::move(next);
  return {200, turn_response(turn, s->state)};
}

ApiResponse Api::get_report() {
  if (deps_.report_path.empty()) fail(ApiErrorCode::kNoReport, "no evaluation report has been produced");
  try {
    return {200, eval::read_report(deps_.report_path)};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNotFound) fail(ApiErrorCode::kNoReport, "no evaluation report has been produced");
    throw;
  }
}

ApiResponse Api::get_trace(const std::string& id) {
  if (!deps_.trace_dir || !is_hex_id(id)) fail(ApiErrorCode::kUnknownTrace, "no trace '" + id + "'");
  const auto text = util::read_file(*deps_.trace_dir / (id + ".json"));
  if (!text) fail(ApiErrorCode::kUnknownTrace, "no trace '" + id + "'");
  return {200, json::parse(*text)};
}

}  // namespace agentrec::service
