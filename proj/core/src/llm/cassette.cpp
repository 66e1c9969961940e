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

#include "mindroom/llm/cassette.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "mindroom/errors.hpp"

namespace mindroom::llm {
namespace {

std::uint64_t key_value(const std::string& key) {
    try {
        return std::stoull(key, nullptr, 16);
    } catch (const std::exception&) {
        return 0;
    }
}

}  // namespace

Cassette Cassette::parse(std::string_view text) {
    Cassette out;
    std::size_t start = 0;
    std::size_t line_no = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const auto line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            out.add({j.at("request_key").get<std::string>(), j.at("schema_tag").get<std::string>(),
                     j.at("raw_text").get<std::string>()});
        } catch (const nlohmann::json::exception& e) {
            throw IoError("malformed cassette line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

Cassette Cassette::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open cassette " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

bool Cassette::add(CassetteEntry entry) {
    auto key = entry.request_key;
    return entries_.emplace(std::move(key), std::move(entry)).second;
}

const CassetteEntry* Cassette::find(const std::string& request_key) const {
    auto it = entries_.find(request_key);
    return it == entries_.end() ? nullptr : &it->second;
}

const CassetteEntry* Cassette::nearest(const std::string& request_key, const std::string& schema_tag) const {
    const auto target = key_value(request_key);
    const CassetteEntry* best = nullptr;
    std::uint64_t best_distance = 0;
    for (const auto& [key, entry] : entries_) {
        if (entry.schema_tag != schema_tag) continue;
        const auto v = key_value(key);
        const auto distance = v > target ? v - target : target - v;
        if (!best || distance < best_distance) {
            best = &entry;
            best_distance = distance;
        }
    }
    return best;
}

std::vector<CassetteEntry> Cassette::entries() const {
    std::vector<CassetteEntry> out;
    out.reserve(entries_.size());
    for (const auto& [_, e] : entries_) out.push_back(e);
    return out;
}

std::string Cassette::dump() const {
    std::string out;
    for (const auto& [_, e] : entries_) {
        nlohmann::ordered_json j;
        j["request_key"] = e.request_key;
        j["schema_tag"] = e.schema_tag;
        j["raw_text"] = e.raw_text;
        out += j.dump();
        out += '\n';
    }
    return out;
}

void Cassette::save(const std::filesystem::path& path) const {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write cassette " + path.string());
    out << dump();
    if (!out) throw IoError("failed writing cassette " + path.string());
}

ScriptedBackend::ScriptedBackend(Cassette cassette, ReplayMode mode) : cassette_(std::move(cassette)), mode_(mode) {}

ChatResponse ScriptedBackend::complete(const ChatRequest& request) {
    const auto key = request.request_key();
    const CassetteEntry* entry = cassette_.find(key);
    if (!entry) {
        {
            std::lock_guard lock(mutex_);
            ++misses_;
        }
        if (mode_ == ReplayMode::Strict) throw CassetteMiss(key);
        entry = cassette_.nearest(key, request.schema_tag);
        if (!entry) throw CassetteMiss(key);
        spdlog::warn("cassette miss for {} ({}); replaying nearest key {}", key, request.schema_tag,
                     entry->request_key);
    }
    return ChatResponse{entry->raw_text, Fields::parse(entry->raw_text), name(), 0.0};
}

std::size_t ScriptedBackend::misses() const {
    std::lock_guard lock(mutex_);
    return misses_;
}

CallbackBackend::CallbackBackend(std::string name, Responder responder)
    : name_(std::move(name)), responder_(std::move(responder)) {}

ChatResponse CallbackBackend::complete(const ChatRequest& request) {
    std::string raw;
    {
        // Responders are usually stateful scripts; serialize them.
        std::lock_guard lock(mutex_);
        raw = responder_(request);
    }
    return ChatResponse{raw, Fields::parse(raw), name_, 0.0};
}

RecordingBackend::RecordingBackend(std::shared_ptr<ChatBackend> inner, std::filesystem::path cassette_path)
    : inner_(std::move(inner)), path_(std::move(cassette_path)) {}

RecordingBackend::~RecordingBackend() {
    try {
        flush();
    } catch (const std::exception& e) {
        spdlog::error("failed to flush cassette {}: {}", path_.string(), e.what());
    }
}

ChatResponse RecordingBackend::complete(const ChatRequest& request) {
    auto response = inner_->complete(request);
    std::lock_guard lock(mutex_);
    const auto key = request.request_key();
    if (!recorded_.add({key, request.schema_tag, response.raw_text})) {
        if (recorded_.find(key)->raw_text != response.raw_text) {
            spdlog::warn("request {} answered differently on repeat; cassette keeps the first answer", key);
        }
    }
    return response;
}

void RecordingBackend::flush() const {
    std::lock_guard lock(mutex_);
    recorded_.save(path_);
}

Cassette RecordingBackend::snapshot() const {
    std::lock_guard lock(mutex_);
    return recorded_;
}

CallLog::CallLog(std::shared_ptr<ChatBackend> inner) : inner_(std::move(inner)) {}

ChatResponse CallLog::complete(const ChatRequest& request) {
    try {
        auto response = inner_->complete(request);
        std::lock_guard lock(mutex_);
        calls_.push_back({request, response.raw_text, false});
        return response;
    } catch (...) {
        std::lock_guard lock(mutex_);
        calls_.push_back({request, {}, true});
        throw;
    }
}

std::vector<RecordedCall> CallLog::calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

std::vector<std::string> CallLog::schema_sequence() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    out.reserve(calls_.size());
    for (const auto& c : calls_) out.push_back(c.request.schema_tag);
    return out;
}

void CallLog::clear() {
    std::lock_guard lock(mutex_);
    calls_.clear();
}

}  // namespace mindroom::llm
