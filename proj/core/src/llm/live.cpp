// Copyright 2026 The Mindroom Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mindroom/llm/live.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "mindroom/errors.hpp"

namespace mindroom::llm {
namespace {

struct SemaphoreGuard {
    explicit SemaphoreGuard(std::counting_semaphore<256>& s) : sem(s) { sem.acquire(); }
    ~SemaphoreGuard() { sem.release(); }
    std::counting_semaphore<256>& sem;
};

}  // namespace

std::string build_completion_body(const ChatRequest& request, const std::string& model) {
    nlohmann::json messages = nlohmann::json::array();
    if (!request.system_prompt.empty()) {
        messages.push_back({{"role", "system"}, {"content", request.system_prompt}});
    }
    for (const auto& m : request.messages) {
        const bool assistant = m.speaker_tag == "assistant";
        messages.push_back({{"role", assistant ? "assistant" : "user"}, {"content", m.text}});
    }
    nlohmann::json body{{"model", model}, {"messages", std::move(messages)}, {"temperature", request.temperature}};
    return body.dump();
}

std::string parse_completion_body(const std::string& body) {
    try {
        const auto j = nlohmann::json::parse(body);
        const auto& content = j.at("choices").at(0).at("message").at("content");
        if (content.is_null()) return {};
        return content.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(std::string("unexpected completion body: ") + e.what());
    }
}

LiveBackend::LiveBackend(LiveConfig config) : config_(std::move(config)) {
    if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
    auto url = config_.base_url;
    while (!url.empty() && url.back() == '/') url.pop_back();
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ValidationError("backend base URL needs a scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    scheme_host_port_ = url.substr(0, path_start);
    path_ = (path_start == std::string::npos ? std::string{} : url.substr(path_start)) + "/chat/completions";
    if (config_.max_in_flight < 1 || config_.max_in_flight > 256) {
        throw ValidationError("max_in_flight must be within [1, 256]");
    }
    in_flight_ = std::make_unique<std::counting_semaphore<256>>(config_.max_in_flight);
}

LiveBackend::~LiveBackend() = default;

std::string LiveBackend::post_once(const std::string& body, int& status) const {
    httplib::Client client(scheme_host_port_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout).count();
    client.set_connection_timeout(secs > 0 ? secs : 1);
    client.set_read_timeout(secs > 0 ? secs : 1);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    auto result = client.Post(path_, headers, body, "application/json");
    if (!result) {
        status = 0;
        throw TransportError("POST " + scheme_host_port_ + path_ + " failed: " + httplib::to_string(result.error()));
    }
    status = result->status;
    return result->body;
}

ChatResponse LiveBackend::complete(const ChatRequest& request) {
    SemaphoreGuard guard(*in_flight_);
    const auto body = build_completion_body(request, config_.model);
    const auto started = std::chrono::steady_clock::now();
    auto backoff = config_.initial_backoff;
    for (int attempt = 0;; ++attempt) {
        int status = 0;
        try {
            auto text = post_once(body, status);
            if (status == 200) {
                auto raw = parse_completion_body(text);
                const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started);
                return ChatResponse{raw, Fields::parse(raw), name(), elapsed.count()};
            }
            if (status == 429) throw RateLimited("provider rate limited the request (HTTP 429)");
            if (status >= 500) throw TransportError("provider error HTTP " + std::to_string(status));
            throw BackendError("provider rejected the request with HTTP " + std::to_string(status) + ": " +
                               text.substr(0, 200));
        } catch (const TransportError& e) {
            if (attempt >= config_.max_retries) throw;
            spdlog::warn("{} (attempt {}), retrying", e.what(), attempt + 1);
        } catch (const RateLimited& e) {
            if (attempt >= config_.max_retries) throw;
            spdlog::warn("{} (attempt {}), backing off {} ms", e.what(), attempt + 1, backoff.count());
        }
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
    }
}

}  // namespace mindroom::llm
