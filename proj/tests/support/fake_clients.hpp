// SPDX-License-Identifier: Apache-2.0
//
// In-memory test doubles for the chat and HTTP layers.
#pragma once

#include <deque>
#include <initializer_list>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "svabench/errors.hpp"
#include "svabench/llm_client.hpp"

namespace svabench::testing {

/// Answers by request tag; unknown tags are a non-retryable TransportError.
class ScriptedClient final : public ChatClient {
 public:
  ScriptedClient() = default;
  ScriptedClient(std::initializer_list<std::pair<const std::string, std::string>> replies) : replies_(replies) {}

  void reply(const std::string& tag, std::string text) { replies_[tag] = std::move(text); }

  ChatResponse complete(const ChatRequest& request) override {
    std::lock_guard lock(mutex_);
    requests_.push_back(request);
    auto it = replies_.find(request.tag);
    if (it == replies_.end()) throw TransportError("no scripted reply for " + request.tag);
    return {it->second, TokenUsage{10, 5}};
  }

  const std::vector<ChatRequest>& requests() const { return requests_; }

 private:
  std::mutex mutex_;
  std::map<std::string, std::string> replies_;
  std::vector<ChatRequest> requests_;
};

/// Plays back a queue of HTTP outcomes. A status of -1 simulates a
/// connection failure.
class QueuedTransport final : public HttpTransport {
 public:
  struct Step {
    int status;
    std::string body;
  };

  explicit QueuedTransport(std::deque<Step> steps) : steps_(std::move(steps)) {}

  HttpResponse post(const std::string& url, const std::map<std::string, std::string>& headers,
                    const std::string& body) override {
    ++calls;
    last_url = url;
    last_headers = headers;
    last_body = body;
    if (steps_.empty()) throw TransportError("connection refused", true);
    Step s = steps_.front();
    if (steps_.size() > 1) steps_.pop_front();
    if (s.status < 0) throw TransportError("connection refused", true);
    return {s.status, s.body};
  }

  int calls = 0;
  std::string last_url;
  std::map<std::string, std::string> last_headers;
  std::string last_body;

 private:
  std::deque<Step> steps_;
};

inline std::string chat_body(const std::string& content) {
  return R"({"id":"x","choices":[{"index":0,"message":{"role":"assistant","content":)" + nlohmann::json(content).dump() +
         R"(}}],"usage":{"prompt_tokens":12,"completion_tokens":7}})";
}

}  // namespace svabench::testing
