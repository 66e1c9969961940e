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

#include "mindroom/prompts.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "mindroom/errors.hpp"

namespace mindroom {
namespace detail {
const std::map<std::string, std::string>& embedded_prompts();
const char* embedded_prompt_version();
}  // namespace detail

namespace {

constexpr std::string_view kSystemMarker = "### system\n";
constexpr std::string_view kUserMarker = "### user\n";

std::string strip_trailing_newlines(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
}

}  // namespace

std::string render_template(std::string_view text, const PromptVars& vars) {
    std::string out;
    out.reserve(text.size() + 256);
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto open = text.find("{{", pos);
        if (open == std::string_view::npos) {
            out.append(text.substr(pos));
            break;
        }
        const auto close = text.find("}}", open + 2);
        if (close == std::string_view::npos) throw ValidationError("unterminated placeholder in prompt template");
        out.append(text.substr(pos, open - pos));
        const auto name = text.substr(open + 2, close - open - 2);
        auto it = vars.find(name);
        if (it == vars.end()) throw ValidationError("prompt placeholder '" + std::string(name) + "' has no value");
        out.append(it->second);
        pos = close + 2;
    }
    return out;
}

PromptCatalog::Template PromptCatalog::split(std::string_view name, std::string_view text) {
    const auto sys = text.find(kSystemMarker);
    const auto usr = text.find(kUserMarker);
    if (sys == std::string_view::npos || usr == std::string_view::npos || usr < sys) {
        throw ValidationError("prompt template '" + std::string(name) + "' needs '### system' then '### user'");
    }
    Template t;
    t.system = strip_trailing_newlines(std::string(text.substr(sys + kSystemMarker.size(), usr - sys - kSystemMarker.size())));
    t.user = strip_trailing_newlines(std::string(text.substr(usr + kUserMarker.size())));
    return t;
}

const PromptCatalog& PromptCatalog::builtin() {
    static const PromptCatalog catalog = [] {
        PromptCatalog c;
        c.version_ = detail::embedded_prompt_version();
        for (const auto& [name, text] : detail::embedded_prompts()) c.templates_.emplace(name, split(name, text));
        return c;
    }();
    return catalog;
}

PromptCatalog PromptCatalog::load(const std::filesystem::path& dir, std::string version) {
    PromptCatalog c;
    c.version_ = std::move(version);
    if (!std::filesystem::is_directory(dir)) throw IoError("prompt directory not found: " + dir.string());
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".txt") continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        const auto name = entry.path().stem().string();
        c.templates_.emplace(name, split(name, buf.str()));
    }
    // A partial directory overrides only what it provides.
    for (const auto& [name, t] : builtin().templates_) c.templates_.try_emplace(name, t);
    return c;
}

const PromptCatalog::Template& PromptCatalog::get(std::string_view name) const {
    auto it = templates_.find(name);
    if (it == templates_.end()) throw ValidationError("no prompt template named '" + std::string(name) + "'");
    return it->second;
}

llm::ChatRequest PromptCatalog::request(std::string_view name, const PromptVars& vars, double temperature) const {
    const auto& t = get(name);
    llm::ChatRequest req;
    req.system_prompt = render_template(t.system, vars);
    req.messages.push_back({"user", render_template(t.user, vars)});
    req.schema_tag = std::string(name);
    req.temperature = temperature;
    return req;
}

std::vector<std::string> PromptCatalog::names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : templates_) out.push_back(name);
    return out;
}

std::vector<std::string> PromptCatalog::placeholders(std::string_view name) const {
    const auto& t = get(name);
    std::set<std::string> found;
    for (const auto* text : {&t.system, &t.user}) {
        std::size_t pos = 0;
        while ((pos = text->find("{{", pos)) != std::string::npos) {
            const auto close = text->find("}}", pos);
            if (close == std::string::npos) break;
            found.insert(text->substr(pos + 2, close - pos - 2));
            pos = close + 2;
        }
    }
    return {found.begin(), found.end()};
}

llm::ChatRequest with_reask(const llm::ChatRequest& original, const std::string& previous_reply,
                            const std::string& problem) {
    auto req = original;
    req.messages.push_back({"assistant", previous_reply});
    req.messages.push_back({"user", "Your previous reply could not be used (" + problem +
                                        "). Answer again using exactly the requested line format."});
    req.meta["reask"] = "1";
    return req;
}

}  // namespace mindroom
