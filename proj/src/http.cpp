#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "mfd/http.hpp"

#include <chrono>
#include <cstdlib>
#include <stdexcept>
#include <thread>

#include <httplib.h>

namespace mfd {

namespace {

struct UrlParts {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

UrlParts split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw std::runtime_error("URL lacks a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpResponse HttplibTransport::post_json(const std::string& url, const std::string& body,
                                         const HttpHeaders& headers) {
  const auto parts = split_url(url);
  httplib::Client client(parts.origin);
  const auto timeout = std::chrono::duration<double>(timeout_s_);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  auto res = client.Post(parts.path, h, body, "application/json");
  if (!res) throw std::runtime_error("HTTP request failed: " + httplib::to_string(res.error()));
  return {res->status, res->body};
}

RetryOutcome post_with_retries(HttpTransport& transport, const RetryPolicy& policy,
                               const std::string& url, const std::string& body,
                               const HttpHeaders& headers) {
  RetryOutcome out;
  double backoff = policy.base_backoff_ms;
  for (int attempt = 1; attempt <= policy.max_attempts; ++attempt) {
    if (attempt > 1) {
      out.last_backoff_ms = backoff;
      if (policy.sleep) {
        policy.sleep(backoff);
      } else {
        std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(backoff));
      }
      backoff *= policy.factor;
    }
    out.attempts = attempt;
    try {
      const auto res = transport.post_json(url, body, headers);
      if (res.status >= 200 && res.status < 300) {
        out.ok = true;
        out.body = res.body;
        return out;
      }
      out.last_error = "HTTP status " + std::to_string(res.status);
      const bool retryable = res.status >= 500 || res.status == 408 || res.status == 429;
      if (!retryable) return out;
    } catch (const std::exception& e) {
      out.last_error = e.what();
    }
  }
  return out;
}

std::string env_or_empty(const std::string& name) {
  if (name.empty()) return {};
  const char* v = std::getenv(name.c_str());
  return v ? std::string(v) : std::string();
}

}  // namespace mfd
