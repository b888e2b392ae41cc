#include <httplib.h>

#include <charconv>
#include <cstdlib>

#include "agentrec/error.hpp"
#include "agentrec/service/api.hpp"
#include "agentrec/tools/web.hpp"

namespace agentrec::service {

namespace fs = std::filesystem;

std::pair<std::string, int> parse_addr(std::string_view addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorCode::kInvalidArgument, "address must be host:port, got '" + std::string(addr) + "'");
  }
  std::string host(addr.substr(0, colon));
  if (host.empty()) host = "127.0.0.1";
  const auto port_s = addr.substr(colon + 1);
  int port = -1;
  const auto [p, ec] = std::from_chars(port_s.data(), port_s.data() + port_s.size(), port);
  if (ec != std::errc() || p != port_s.data() + port_s.size() || port < 0 || port > 65535) {
    throw Error(ErrorCode::kInvalidArgument, "bad port in '" + std::string(addr) + "'");
  }
  return {host, port};
}

ServerOptions ServerOptions::from_env(ServerOptions base) {
  if (const char* a = std::getenv("AGENTREC_ADDR"); a && *a) {
    std::tie(base.host, base.port) = parse_addr(a);
  }
  if (const char* o = std::getenv("AGENTREC_OFFLINE"); o && std::string_view(o) == "1") base.offline = true;
  if (const char* c = std::getenv("AGENTREC_CONFIG"); c && *c) base.config_path = fs::path(c);
  if (const char* s = std::getenv("AGENTREC_SEARCH_ENDPOINT"); s && *s) base.search_endpoint = s;
  return base;
}

struct ServiceHost::State {
  std::shared_ptr<net::HttpTransport> transport;
  tools::ToolRegistry registry;
  std::unique_ptr<agents::ProviderSource> providers;
  std::unique_ptr<profile::ProfileStore> profiles;
  SystemClock clock;
};

ServiceHost::ServiceHost(const ServerOptions& options) : state_(std::make_unique<State>()) {
  const fs::path root = options.root;
  std::optional<llm::GatewayConfig> gateway;
  if (options.config_path) gateway = llm::load_gateway_config(*options.config_path);
  if (!options.offline) {
    if (!gateway) throw Error(ErrorCode::kInvalidArgument, "live mode needs AGENTREC_CONFIG");
    state_->transport = net::make_live_transport();
  }
  const auto mode = options.offline ? tools::ToolMode::kOffline : tools::ToolMode::kLive;
  state_->registry = tools::make_standard_registry(
      tools::make_backends(mode, root / "fixtures" / "web", state_->transport, options.search_endpoint));
  state_->registry.freeze();
  if (options.offline) {
    state_->providers = std::make_unique<agents::ScenarioLibrary>(root / "fixtures" / "scenarios");
  } else {
    state_->providers =
        std::make_unique<agents::FixedProviders>(agents::make_live_providers(*gateway, state_->transport));
  }
  state_->profiles = std::make_unique<profile::ProfileStore>(root / "var" / "profiles");

  ApiDeps deps;
  deps.pipeline.agents = agents::load_agents(root / "prompts", gateway ? &*gateway : nullptr,
                                             options.max_iterations);
  deps.pipeline.crew.mode = runtime::CrewMode::kConcurrent;
  if (options.offline) deps.pipeline.crew.clock_factory = runtime::manual_clock_factory();
  deps.registry = &state_->registry;
  deps.providers = state_->providers.get();
  deps.profiles = state_->profiles.get();
  deps.clock = &state_->clock;
  deps.report_path = root / "reports" / "latest.json";
  deps.trace_dir = root / "var" / "traces";
  api_ = std::make_unique<Api>(std::move(deps));
}

ServiceHost::~ServiceHost() = default;

struct HttpServer::Impl {
  Api& api;
  httplib::Server server;
  explicit Impl(Api& a) : api(a) {}
};

HttpServer::HttpServer(Api& api) : impl_(std::make_unique<Impl>(api)) {
  auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
    const auto r = impl_->api.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  const std::string any = R"(/.*)";
  impl_->server.Get(any, dispatch);
  impl_->server.Post(any, dispatch);
  impl_->server.Put(any, dispatch);
  impl_->server.Delete(any, dispatch);
  impl_->server.Patch(any, dispatch);
  // Allow the browser console to call the API from another origin.
  impl_->server.set_post_routing_handler([](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
  });
  impl_->server.Options(any, [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  // Inline base64 images of up to 5 MB plus JSON overhead.
  impl_->server.set_payload_max_length(kMaxImageBytes * 2);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : 
                    (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "cannot bind " + host + ":" + std::to_string(port));
  }
  return bound;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace agentrec::service
