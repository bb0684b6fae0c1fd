// SPDX-License-Identifier: Apache-2.0
//
// Chat-completion clients: an HTTP client for OpenAI-style endpoints and a
// directory-backed replay client for offline runs.
#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace svabench {

inline constexpr std::string_view kDefaultEndpoint = "https://api.openai.com/v1/chat/completions";

/// Decoding parameters sent with every request.
struct GenParams {
  int max_output_tokens = 1024;
  double temperature = 1.0;
  double top_p = 0.95;
  std::uint64_t random_seed = 50;
  std::string model_id;
  std::string endpoint{kDefaultEndpoint};

  bool operator==(const GenParams&) const = default;
};

struct ChatRequest {
  /// Stable identifier of the call site, e.g. `gen/arbiter/k1` or
  /// `fix/arbiter/k1/3`. The replay client uses it as a file name.
  std::string tag;
  std::string prompt;
  GenParams params;
};

struct TokenUsage {
  int prompt_tokens = 0;
  int completion_tokens = 0;
};

struct ChatResponse {
  std::string text;
  std::optional<TokenUsage> usage;
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  /// Throws TransportError (retryable or not), AuthError.
  virtual ChatResponse complete(const ChatRequest& request) = 0;
};

/// Replays `<dir>/<model>/<tag>.txt`, falling back to `<dir>/<tag>.txt`.
/// A missing file is a non-retryable TransportError.
class MockChatClient final : public ChatClient {
 public:
  explicit MockChatClient(std::filesystem::path dir) : dir_(std::move(dir)) {}

  ChatResponse complete(const ChatRequest& request) override;

  std::size_t calls() const { return calls_.load(); }
  const std::filesystem::path& directory() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::atomic<std::size_t> calls_{0};
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// One POST round trip. Connection failures throw TransportError.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post(const std::string& url, const std::map<std::string, std::string>& headers,
                            const std::string& body) = 0;
};

/// cpp-httplib backed transport (TLS via OpenSSL).
std::unique_ptr<HttpTransport> make_http_transport(std::chrono::seconds timeout = std::chrono::seconds(120));

/// Minimum spacing between consecutive requests, shared by all threads
/// using the same limiter.
class RateLimiter {
 public:
  using Clock = std::chrono::steady_clock;
  using Sleeper = std::function<void(Clock::duration)>;

  explicit RateLimiter(int requests_per_minute, Sleeper sleep = {});
  void acquire();

 private:
  Clock::duration interval_;
  Sleeper sleep_;
  std::mutex mutex_;
  std::optional<Clock::time_point> next_slot_;
};

/// OpenAI-compatible `/chat/completions` client.
/// 401/403 -> AuthError; 408/429/5xx -> retryable TransportError.
class OpenAiChatClient final : public ChatClient {
 public:
  OpenAiChatClient(std::string api_key, std::unique_ptr<HttpTransport> transport,
                   std::shared_ptr<RateLimiter> limiter = nullptr);

  ChatResponse complete(const ChatRequest& request) override;

 private:
  std::string api_key_;
  std::unique_ptr<HttpTransport> transport_;
  std::shared_ptr<RateLimiter> limiter_;
};

/// JSON body sent for a request.
std::string chat_request_body(const ChatRequest& request);
/// Extracts the completion text and usage from a response body.
ChatResponse parse_chat_response(std::string_view body);

/// `mock://<dir>` gives a MockChatClient; anything else an OpenAiChatClient.
std::unique_ptr<ChatClient> make_client(const std::string& endpoint, const std::string& api_key,
                                        std::shared_ptr<RateLimiter> limiter = nullptr);

bool is_mock_endpoint(std::string_view endpoint);

}  // namespace svabench
