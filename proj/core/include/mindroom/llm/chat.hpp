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

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mindroom::llm {

struct ChatMessage {
    std::string speaker_tag;
    std::string text;

    bool operator==(const ChatMessage&) const = default;
};

/// Parsed key/value lines of a structured reply ("key: value" per line; lines without a
/// colon continue the previous value). Keys are lower-cased and trimmed.
class Fields {
public:
    static Fields parse(std::string_view text);

    const std::string* find(std::string_view key) const;
    std::vector<std::string> all(std::string_view key) const;
    const std::vector<std::pair<std::string, std::string>>& items() const { return items_; }
    bool empty() const { return items_.empty(); }

private:
    std::vector<std::pair<std::string, std::string>> items_;
};

struct ChatRequest {
    std::string system_prompt;
    std::vector<ChatMessage> messages;
    std::string schema_tag;
    double temperature = 0.7;
    // Request annotations (calling agent, stage, structured hints). Never sent to a provider and
    // not part of the request key; every value must also appear in the prompt text.
    std::map<std::string, std::string> meta;

    // Stable 64-bit FNV-1a digest of (system_prompt, messages, schema_tag), as 16 hex digits.
    std::string request_key() const;
    std::string meta_or(const std::string& key, std::string fallback = {}) const;
};

struct ChatResponse {
    std::string raw_text;
    Fields parsed;
    std::string backend_name;
    double latency_ms = 0.0;
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    // Must be safe to call concurrently.
    virtual ChatResponse complete(const ChatRequest& request) = 0;
    virtual std::string name() const = 0;
};

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace mindroom::llm
