#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace mfd {

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Transport seam for the remote providers; tests substitute scripted transports.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  // Throws std::runtime_error on connection-level failure.
  virtual HttpResponse post_json(const std::string& url, const std::string& body,
                                 const HttpHeaders& headers) = 0;
};

class HttplibTransport : public HttpTransport {
 public:
  explicit HttplibTransport(double timeout_s = 60.0) : timeout_s_(timeout_s) {}
  HttpResponse post_json(const std::string& url, const std::string& body,
                         const HttpHeaders& headers) override;

 private:
  double timeout_s_;
};

struct RetryPolicy {
  int max_attempts = 3;
  double base_backoff_ms = 250.0;
  double factor = 2.0;
  // Called with the backoff before each retry; defaults to a real sleep.
  std::function<void(double)> sleep;
};

// Outcome of a retried call: the response body on success, or the failure trail.
struct RetryOutcome {
  bool ok = false;
  std::string body;
  int attempts = 0;
  double last_backoff_ms = 0.0;
  std::string last_error;
};

// POSTs until a 2xx response or the attempts run out. 4xx responses other than
// 408/429 are not retried.
RetryOutcome post_with_retries(HttpTransport& transport, const RetryPolicy& policy,
                               const std::string& url, const std::string& body,
                               const HttpHeaders& headers);

// Reads an API key from the named environment variable; empty if unset.
std::string env_or_empty(const std::string& name);

}  // namespace mfd
