#include "agentrec/util/http.hpp"

#include <httplib.h>

#include <cctype>
#include <charconv>

#include "agentrec/error.hpp"
#include "agentrec/util/text.hpp"

namespace agentrec::net {

std::string Url::origin() const {
  return scheme + "://" + host + ":" + std::to_string(port);
}

Url parse_url(std::string_view text) {
  Url u;
  const auto sep = text.find("://");
  if (sep == std::string_view::npos) {
    throw Error(ErrorCode::kInvalidArgument, "not an absolute URL: " + std::string(text));
  }
  u.scheme = util::to_lower_ascii(text.substr(0, sep));
  if (u.scheme != "http" && u.scheme != "https") {
    throw Error(ErrorCode::kInvalidArgument, "not an http(s) URL: " + std::string(text));
  }
  std::string_view rest = text.substr(sep + 3);
  const auto slash = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, slash);
  u.path_and_query = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
  if (!u.path_and_query.empty() && u.path_and_query.front() != '/') {
    u.path_and_query.insert(u.path_and_query.begin(), '/');
  }
  if (const auto hash = u.path_and_query.find('#'); hash != std::string::npos) {
    u.path_and_query.resize(hash);
  }
  if (const auto at = authority.rfind('@'); at != std::string_view::npos) {
    authority = authority.substr(at + 1);
  }
  u.port = u.scheme == "https" ? 443 : 80;
  const auto colon = authority.rfind(':');
  if (colon != std::string_view::npos && authority.find(']') == std::string_view::npos) {
    const auto port_text = authority.substr(colon + 1);
    int port = 0;
    auto [p, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
    if (ec != std::errc{} || p != port_text.data() + port_text.size() || port <= 0 ||
        port > 65535) {
      throw Error(ErrorCode::kInvalidArgument, "bad port in URL: " + std::string(text));
    }
    u.port = port;
    authority = authority.substr(0, colon);
  }
  if (authority.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "URL has no host: " + std::string(text));
  }
  u.host = std::string(authority);
  return u;
}

bool is_absolute_http_url(std::string_view text) {
  try {
    parse_url(text);
    return true;
  } catch (const Error&) {
    return false;
  }
}

std::string url_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0x0F]);
    }
  }
  return out;
}

namespace {

class LiveTransport final : public HttpTransport {
 public:
  explicit LiveTransport(int timeout_ms) : timeout_ms_(timeout_ms) {}

  HttpResponse get(const std::string& url, const Headers& headers) override {
    const Url u = parse_url(url);
    auto client = make_client(u);
    auto res = client.Get(u.path_and_query, to_httplib(headers));
    return convert(res, url);
  }

  HttpResponse post(const std::string& url, const std::string& body,
                    const std::string& content_type, const Headers& headers) override {
    const Url u = parse_url(url);
    auto client = make_client(u);
    auto res = client.Post(u.path_and_query, to_httplib(headers), body, content_type);
    return convert(res, url);
  }

 private:
  httplib::Client make_client(const Url& u) const {
    httplib::Client client(u.origin());
    const auto sec = timeout_ms_ / 1000;
    const auto usec = (timeout_ms_ % 1000) * 1000;
    client.set_connection_timeout(sec, usec);
    client.set_read_timeout(sec, usec);
    client.set_write_timeout(sec, usec);
    client.set_follow_location(true);
    return client;
  }

  static httplib::Headers to_httplib(const Headers& headers) {
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    return h;
  }

  static HttpResponse convert(const httplib::Result& res, const std::string& url) {
    if (!res) {
      throw Error(ErrorCode::kTransportError,
                  "request to " + url + " failed: " + httplib::to_string(res.error()));
    }
    HttpResponse out;
    out.status = res->status;
    out.body = res->body;
    out.content_type = res->get_header_value("Content-Type");
    for (const auto& [k, v] : res->headers) out.headers[util::to_lower_ascii(k)] = v;
    return out;
  }

  int timeout_ms_;
};

}  // namespace

std::shared_ptr<HttpTransport> make_live_transport(int timeout_ms) {
  return std::make_shared<LiveTransport>(timeout_ms);
}

}  // namespace agentrec::net
