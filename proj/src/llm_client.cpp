// SPDX-License-Identifier: Apache-2.0
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "svabench/llm_client.hpp"

#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "svabench/errors.hpp"

namespace svabench {

namespace {

using json = nlohmann::json;

constexpr std::string_view kMockScheme = "mock://";

std::optional<std::string> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class HttplibTransport final : public HttpTransport {
 public:
  explicit HttplibTransport(std::chrono::seconds timeout) : timeout_(timeout) {}

  HttpResponse post(const std::string& url, const std::map<std::string, std::string>& headers,
                    const std::string& body) override {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw TransportError("malformed endpoint URL: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    std::string origin = url.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);
    httplib::Headers hs;
    for (const auto& [k, v] : headers) hs.emplace(k, v);
    auto res = client.Post(path, hs, body, "application/json");
    if (!res) throw TransportError("request to " + origin + " failed: " + httplib::to_string(res.error()), true);
    return {res->status, res->body};
  }

 private:
  std::chrono::seconds timeout_;
};

}  // namespace

ChatResponse MockChatClient::complete(const ChatRequest& request) {
  ++calls_;
  const std::string file = request.tag + ".txt";
  if (!request.params.model_id.empty()) {
    if (auto text = read_file(dir_ / request.params.model_id / file)) return {std::move(*text), std::nullopt};
  }
  if (auto text = read_file(dir_ / file)) return {std::move(*text), std::nullopt};
  throw TransportError("mock: no canned response for '" + request.tag + "' under " + dir_.string());
}

std::unique_ptr<HttpTransport> make_http_transport(std::chrono::seconds timeout) {
  return std::make_unique<HttplibTransport>(timeout);
}

RateLimiter::RateLimiter(int requests_per_minute, Sleeper sleep)
    : interval_(requests_per_minute > 0
                    ? std::chrono::duration_cast<Clock::duration>(std::chrono::minutes(1)) / requests_per_minute
                    : Clock::duration::zero()),
      sleep_(sleep ? std::move(sleep) : Sleeper([](Clock::duration d) { std::this_thread::sleep_for(d); })) {}

void RateLimiter::acquire() {
  if (interval_ == Clock::duration::zero()) return;
  Clock::duration wait{};
  {
    // Reserve the next slot under the lock, sleep outside it.
    std::lock_guard lock(mutex_);
    auto now = Clock::now();
    auto slot = next_slot_ && *next_slot_ > now ? *next_slot_ : now;
    wait = slot - now;
    next_slot_ = slot + interval_;
  }
  if (wait > Clock::duration::zero()) sleep_(wait);
}

OpenAiChatClient::OpenAiChatClient(std::string api_key, std::unique_ptr<HttpTransport> transport,
                                   std::shared_ptr<RateLimiter> limiter)
    : api_key_(std::move(api_key)), transport_(std::move(transport)), limiter_(std::move(limiter)) {}

std::string chat_request_body(const ChatRequest& request) {
  nlohmann::ordered_json body;
  body["model"] = request.params.model_id;
  body["messages"] = nlohmann::ordered_json::array({{{"role", "user"}, {"content", request.prompt}}});
  body["max_tokens"] = request.params.max_output_tokens;
  body["temperature"] = request.params.temperature;
  body["top_p"] = request.params.top_p;
  body["seed"] = request.params.random_seed;
  return body.dump();
}

ChatResponse parse_chat_response(std::string_view body) {
  json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw TransportError("endpoint returned malformed JSON");
  ChatResponse out;
  const auto choices = doc.find("choices");
  if (choices == doc.end() || !choices->is_array() || choices->empty()) {
    throw TransportError("endpoint response has no choices");
  }
  const auto& message = (*choices)[0].value("message", json::object());
  if (auto content = message.find("content"); content != message.end() && content->is_string()) {
    out.text = content->get<std::string>();
  }
  if (auto usage = doc.find("usage"); usage != doc.end() && usage->is_object()) {
    out.usage = TokenUsage{usage->value("prompt_tokens", 0), usage->value("completion_tokens", 0)};
  }
  return out;
}

ChatResponse OpenAiChatClient::complete(const ChatRequest& request) {
  if (limiter_) limiter_->acquire();
  std::map<std::string, std::string> headers{{"Accept", "application/json"}};
  if (!api_key_.empty()) headers["Authorization"] = "Bearer " + api_key_;
  HttpResponse res = transport_->post(request.params.endpoint, headers, chat_request_body(request));
  if (res.status == 401 || res.status == 403) {
    throw AuthError("endpoint rejected credentials (HTTP " + std::to_string(res.status) + ")");
  }
  if (res.status == 408 || res.status == 429 || res.status >= 500) {
    throw TransportError("endpoint returned HTTP " + std::to_string(res.status), true, res.status);
  }
  if (res.status < 200 || res.status >= 300) {
    throw TransportError("endpoint returned HTTP " + std::to_string(res.status) + ": " + res.body.substr(0, 200),
                         false, res.status);
  }
  return parse_chat_response(res.body);
}

bool is_mock_endpoint(std::string_view endpoint) { return endpoint.substr(0, kMockScheme.size()) == kMockScheme; }

std::unique_ptr<ChatClient> make_client(const std::string& endpoint, const std::string& api_key,
                                        std::shared_ptr<RateLimiter> limiter) {
  if (is_mock_endpoint(endpoint)) {
    return std::make_unique<MockChatClient>(endpoint.substr(kMockScheme.size()));
  }
  return std::make_unique<OpenAiChatClient>(api_key, make_http_transport(), std::move(limiter));
}

}  // namespace svabench
