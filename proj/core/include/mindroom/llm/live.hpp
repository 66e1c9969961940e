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

#pragma once

#include <chrono>
#include <memory>
#include <semaphore>
#include <string>

#include "mindroom/llm/chat.hpp"

namespace mindroom::llm {

struct LiveConfig {
    // e.g. "https://api.openai.com/v1"; requests go to <base_url>/chat/completions.
    std::string base_url = "https://api.openai.com/v1";
    std::string model = "gpt-4o-mini";
    std::string api_key_env = "MINDROOM_API_KEY";
    std::chrono::milliseconds timeout{60'000};
    int max_retries = 3;
    std::chrono::milliseconds initial_backoff{500};
    int max_in_flight = 4;
};

/// Client for OpenAI-compatible chat completion endpoints.
///
/// Transport failures and 5xx responses are retried, HTTP 429 is retried with exponential
/// backoff; both give up after `max_retries` retries. At most `max_in_flight` requests run at once.
class LiveBackend final : public ChatBackend {
public:
    explicit LiveBackend(LiveConfig config);
    ~LiveBackend() override;

    ChatResponse complete(const ChatRequest& request) override;
    std::string name() const override { return "live:" + config_.model; }

    const LiveConfig& config() const { return config_; }

private:
    std::string post_once(const std::string& body, int& status) const;

    LiveConfig config_;
    std::string api_key_;
    std::string scheme_host_port_;
    std::string path_;
    std::unique_ptr<std::counting_semaphore<256>> in_flight_;
};

// Request body sent to the provider for `request` (exposed for tests).
std::string build_completion_body(const ChatRequest& request, const std::string& model);
// Extracts choices[0].message.content; throws BackendError on a malformed body.
std::string parse_completion_body(const std::string& body);

}  // namespace mindroom::llm
