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

#include "mindroom/llm/chat.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

namespace mindroom::llm {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Keys are short identifiers such as "label 2" or "refers_to"; anything longer is prose.
bool plausible_key(std::string_view key) {
    if (key.empty() || key.size() > 32) return false;
    return std::all_of(key.begin(), key.end(), [](unsigned char c) {
        return std::isalnum(c) || c == ' ' || c == '_' || c == '-';
    });
}

}  // namespace

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Fields Fields::parse(std::string_view text) {
    Fields out;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = trim(text.substr(start, end - start));
        start = end + 1;
        if (line.empty()) continue;
        // Tolerate list bullets in front of keys.
        if (line.starts_with("- ") || line.starts_with("* ")) line = trim(line.substr(2));
        const auto colon = line.find(':');
        if (colon != std::string_view::npos && plausible_key(trim(line.substr(0, colon)))) {
            out.items_.emplace_back(lower(trim(line.substr(0, colon))), std::string(trim(line.substr(colon + 1))));
        } else if (!out.items_.empty()) {
            auto& value = out.items_.back().second;
            if (!value.empty()) value += '\n';
            value += line;
        }
    }
    return out;
}

const std::string* Fields::find(std::string_view key) const {
    const auto k = lower(key);
    for (const auto& [name, value] : items_) {
        if (name == k) return &value;
    }
    return nullptr;
}

std::vector<std::string> Fields::all(std::string_view key) const {
    const auto k = lower(key);
    std::vector<std::string> out;
    for (const auto& [name, value] : items_) {
        if (name == k) out.push_back(value);
    }
    return out;
}

std::string ChatRequest::request_key() const {
    std::string canonical;
    auto put = [&canonical](std::string_view field) {
        canonical += std::to_string(field.size());
        canonical += ':';
        canonical += field;
        canonical += ';';
    };
    put(system_prompt);
    put(std::to_string(messages.size()));
    for (const auto& m : messages) {
        put(m.speaker_tag);
        put(m.text);
    }
    put(schema_tag);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical)));
    return buf;
}

std::string ChatRequest::meta_or(const std::string& key, std::string fallback) const {
    auto it = meta.find(key);
    return it == meta.end() ? std::move(fallback) : it->second;
}

}  // namespace mindroom::llm
