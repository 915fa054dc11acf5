#include "geosolve/chat_client.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace geosolve {

using nlohmann::json;

HttpChatClient::HttpChatClient(std::string endpoint, RetryPolicy retry, int timeout_seconds)
    : endpoint_(std::move(endpoint)), retry_(retry), timeout_seconds_(timeout_seconds) {
    if (endpoint_.empty()) throw std::invalid_argument("chat client needs an endpoint");
}

std::vector<std::string> HttpChatClient::complete(const ChatRequest& request) {
    auto slash = endpoint_.find('/', endpoint_.find("//") + 2);
    std::string base = slash == std::string::npos ? endpoint_ : endpoint_.substr(0, slash);
    std::string path = slash == std::string::npos ? "/" : endpoint_.substr(slash);

    json body;
    body["model"] = request.model;
    json messages = json::array();
    for (const auto& m : request.messages)
        messages.push_back(json{{"role", m.role}, {"content", m.content}});
    body["messages"] = std::move(messages);
    body["n"] = request.n;
    body["temperature"] = request.temperature;
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (const char* key = std::getenv("GEO_LLM_API_KEY"))
        headers.emplace("Authorization", std::string("Bearer ") + key);

    std::string last_error;
    int backoff = retry_.backoff_ms;
    for (int attempt = 0; attempt <= retry_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
            backoff *= 2;
        }
        httplib::Client client(base);
        client.set_read_timeout(timeout_seconds_, 0);
        client.set_connection_timeout(timeout_seconds_, 0);
        auto res = client.Post(path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "status " + std::to_string(res->status);
            continue;
        }
        try {
            json doc = json::parse(res->body);
            std::vector<std::string> out;
            for (const auto& choice : doc.at("choices"))
                out.push_back(choice.at("text").get<std::string>());
            return out;
        } catch (const json::exception& e) {
            last_error = std::string("bad response: ") + e.what();
        }
    }
    throw ChatTransportError("chat completion failed after " +
                             std::to_string(retry_.max_retries + 1) + " attempt(s): " + last_error);
}

}  // namespace geosolve
