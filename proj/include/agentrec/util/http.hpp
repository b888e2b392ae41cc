#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>

namespace agentrec::net {

struct HttpResponse {
  int status = 0;
  std::string content_type;
  std::string body;
  std::map<std::string, std::string> headers;
};

using Headers = std::map<std::string, std::string>;

struct Url {
  std::string scheme;  // "http" | "https"
  std::string host;
  int port = 0;
  std::string path_and_query;  // always starts with '/'

  std::string origin() const;
};

// Throws Error(kInvalidArgument) unless `text` is an absolute http(s) URL.
Url parse_url(std::string_view text);
bool is_absolute_http_url(std::string_view text);
std::string url_encode(std::string_view s);

// Blocking HTTP client boundary. Every network operation in the library goes
// through one of these so tests can count or fake traffic.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  // Throws Error(kTransportError) when no HTTP response was obtained.
  virtual HttpResponse get(const std::string& url, const Headers& headers) = 0;
  virtual HttpResponse post(const std::string& url, const std::string& body,
                            const std::string& content_type, const Headers& headers) = 0;
};

std::shared_ptr<HttpTransport> make_live_transport(int timeout_ms = 30000);

}  // namespace agentrec::net
