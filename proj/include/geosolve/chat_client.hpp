#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace geosolve {

struct ChatMessage {
    std::string role;
    std::string content;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    int n = 1;
    double temperature = 0.7;
};

struct RetryPolicy {
    int max_retries = 2;
    int backoff_ms = 250;  // doubled on every retry
};

// Abstract chat-completion service: one request yields n completion texts.
// Transport problems surface as ChatTransportError.
class ChatCompletionClient {
  public:
    virtual ~ChatCompletionClient() = default;
    virtual std::vector<std::string> complete(const ChatRequest& request) = 0;
};

struct ChatTransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// HTTP client speaking the chat-completion wire contract:
//   POST <endpoint>
//     {"model": ..., "messages": [{"role", "content"}...], "n": 3, "temperature": 0.7}
//   -> {"choices": [{"text": ...}, ...]}
// Bearer token read from the GEO_LLM_API_KEY environment variable. Failed
// requests are retried per the policy with doubling backoff.
class HttpChatClient : public ChatCompletionClient {
  public:
    HttpChatClient(std::string endpoint, RetryPolicy retry = {}, int timeout_seconds = 120);

    std::vector<std::string> complete(const ChatRequest& request) override;

  private:
    std::string endpoint_;
    RetryPolicy retry_;
    int timeout_seconds_;
};

}  // namespace geosolve
