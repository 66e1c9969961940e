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

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "mindroom/llm/chat.hpp"

namespace mindroom::llm {

struct CassetteEntry {
    std::string request_key;
    std::string schema_tag;
    std::string raw_text;

    bool operator==(const CassetteEntry&) const = default;
};

/// Recorded map from request keys to raw model output.
///
/// File format: UTF-8, one JSON object per line with fields `request_key`, `schema_tag` and
/// `raw_text`, sorted by request_key. The first entry recorded for a key wins.
class Cassette {
public:
    static Cassette load(const std::filesystem::path& path);
    static Cassette parse(std::string_view text);

    // Returns false (and keeps the existing entry) when the key is already present.
    bool add(CassetteEntry entry);
    const CassetteEntry* find(const std::string& request_key) const;
    // Entry of the same schema whose key is numerically closest to request_key.
    const CassetteEntry* nearest(const std::string& request_key, const std::string& schema_tag) const;

    std::size_t size() const { return entries_.size(); }
    std::vector<CassetteEntry> entries() const;
    std::string dump() const;
    void save(const std::filesystem::path& path) const;

private:
    std::map<std::string, CassetteEntry> entries_;
};

enum class ReplayMode { Strict, Lenient };

// Pure offline backend: answers from a cassette, never touches the network.
class ScriptedBackend final : public ChatBackend {
public:
    explicit ScriptedBackend(Cassette cassette, ReplayMode mode = ReplayMode::Strict);

    ChatResponse complete(const ChatRequest& request) override;
    std::string name() const override { return "scripted"; }

    const Cassette& cassette() const { return cassette_; }
    std::size_t misses() const;

private:
    Cassette cassette_;
    ReplayMode mode_;
    mutable std::mutex mutex_;
    std::size_t misses_ = 0;
};

// Answers every request through a function. Used for hand-scripted tests.
class CallbackBackend final : public ChatBackend {
public:
    using Responder = std::function<std::string(const ChatRequest&)>;

    CallbackBackend(std::string name, Responder responder);

    ChatResponse complete(const ChatRequest& request) override;
    std::string name() const override { return name_; }

private:
    std::string name_;
    Responder responder_;
    std::mutex mutex_;
};

// Forwards to another backend and appends every (request_key, schema_tag, raw_text) to a cassette.
class RecordingBackend final : public ChatBackend {
public:
    RecordingBackend(std::shared_ptr<ChatBackend> inner, std::filesystem::path cassette_path);
    ~RecordingBackend() override;

    ChatResponse complete(const ChatRequest& request) override;
    std::string name() const override { return inner_->name(); }

    void flush() const;
    Cassette snapshot() const;

private:
    std::shared_ptr<ChatBackend> inner_;
    std::filesystem::path path_;
    mutable std::mutex mutex_;
    Cassette recorded_;
};

struct RecordedCall {
    ChatRequest request;
    std::string raw_text;
    bool failed = false;
};

// Forwards to another backend and keeps every request in call order.
class CallLog final : public ChatBackend {
public:
    explicit CallLog(std::shared_ptr<ChatBackend> inner);

    ChatResponse complete(const ChatRequest& request) override;
    std::string name() const override { return inner_->name(); }

    std::vector<RecordedCall> calls() const;
    std::vector<std::string> schema_sequence() const;
    void clear();

private:
    std::shared_ptr<ChatBackend> inner_;
    mutable std::mutex mutex_;
    std::vector<RecordedCall> calls_;
};

}  // namespace mindroom::llm
