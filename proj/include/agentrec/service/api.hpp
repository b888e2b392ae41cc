#pragma once

// HTTP boundary: sessions, queries with inline images, follow-up answers,
// evaluation reports and crew traces. Api::handle is transport-free; HttpServer
// binds it to an httplib server.

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "agentrec/agents/pipeline.hpp"

namespace agentrec::service {

inline constexpr std::size_t kMaxImageBytes = 5 * 1024 * 1024;

// Closed set of machine-readable error codes.
enum class ApiErrorCode {
  kInvalidBody,
  kInvalidQuery,
  kUnsupportedMedia,
  kImageTooLarge,
  kUnknownSession,
  kUnknownFollowup,
  kAlreadyAnswered,
  kAllAgentsFailed,
  kNoFixture,
  kNoReport,
  kUnknownTrace,
  kNotFound,
  kMethodNotAllowed,
  kInternal,
};

std::string_view to_string(ApiErrorCode code);
int http_status(ApiErrorCode code);

struct ApiError {
  ApiErrorCode code = ApiErrorCode::kInternal;
  std::string message;
  int status() const { return http_status(code); }
  nlohmann::json to_json() const;
};

// Maps library errors raised while serving a request.
ApiError api_error_from(const Error& e);

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

struct ApiDeps {
  agents::PipelineConfig pipeline;
  const tools::ToolRegistry* registry = nullptr;
  agents::ProviderSource* providers = nullptr;
  profile::ProfileStore* profiles = nullptr;
  Clock* clock = nullptr;
  std::filesystem::path report_path;  // latest eval report
  std::optional<std::filesystem::path> trace_dir;
};

class Api {
 public:
  explicit Api(ApiDeps deps);

  // Routes:
  //   POST /sessions                          {user_id}            -> 201 {session_id, user_id}
  //   GET  /sessions/{id}                                          -> SessionState
  //   POST /sessions/{id}/query               {text, image?}       -> turn + pending_followups
  //   POST /sessions/{id}/followups/{qid}     {answer}             -> turn + pending_followups
  //   GET  /reports                                                -> latest report
  //   GET  /traces/{id}                                            -> crew trace
  //   GET  /health                                                 -> {"status": "ok"}
  // `image` is {"data": base64, "media_type": "image/png"|"image/jpeg"|"image/webp"}.
  ApiResponse handle(std::string_view method, std::string_view path, std::string_view body);

  std::size_t session_count() const;

 private:
  struct Session {
    std::mutex mu;
    core::SessionState state;
  };

  ApiResponse create_session(const nlohmann::json& body);
  ApiResponse get_session(const std::string& id);
  ApiResponse post_query(const std::string& id, const nlohmann::json& body);
  ApiResponse post_followup(const std::string& id, const std::string& qid, const nlohmann::json& body);
  ApiResponse get_report();
  ApiResponse get_trace(const std::string& id);

  std::shared_ptr<Session> find(const std::string& id) const;
  std::string new_session_id();
  agents::Pipeline pipeline();

  ApiDeps deps_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t id_state_;
};

// Response body for a turn: the SessionTurn fields plus the session's
// unanswered follow-up questions.
nlohmann::json turn_response(const core::SessionTurn& turn, const core::SessionState& session);

// Environment: AGENTREC_ADDR ("host:port", default 127.0.0.1:8080),
// AGENTREC_OFFLINE=1 for fixture replay, AGENTREC_CONFIG for the provider
// config file, AGENTREC_SEARCH_ENDPOINT for live search.
struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  bool offline = false;
  std::optional<std::filesystem::path> config_path;
  std::string search_endpoint;
  std::filesystem::path root = ".";  // prompts/, fixtures/, data/, reports/, var/
  int max_iterations = 15;

  static ServerOptions from_env(ServerOptions base);
};

// "host:port" or ":port". Throws kInvalidArgument.
std::pair<std::string, int> parse_addr(std::string_view addr);

// Owns everything a server needs: registry, providers, profile store.
class ServiceHost {
 public:
  explicit ServiceHost(const ServerOptions& options);
  ~ServiceHost();
  Api& api() { return *api_; }

 private:
  struct State;
  std::unique_ptr<State> state_;
  std::unique_ptr<Api> api_;
};

// httplib front end: every request goes through Api::handle.
class HttpServer {
 public:
  explicit HttpServer(Api& api);
  ~HttpServer();
  // port 0 binds an ephemeral port. Returns the bound port; throws
  // kInvalidArgument when binding fails.
  int bind(const std::string& host, int port);
  void listen();  // blocks until stop()
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace agentrec::service
