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

#include "test_support.hpp"

#include <atomic>
#include <fstream>
#include <sstream>

#include "mindroom/persona.hpp"

namespace mindroom::testing {

std::filesystem::path source_dir() { return MINDROOM_SOURCE_DIR; }

std::filesystem::path temp_dir(const std::string& tag) {
    static std::atomic<int> counter{0};
    auto dir = std::filesystem::temp_directory_path() /
               ("mindroom-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

ScriptedChat::ScriptedChat(llm::SyntheticProfile fallback) : fallback_(fallback) {}

ScriptedChat& ScriptedChat::queue(const std::string& tag, std::vector<std::string> replies) {
    std::lock_guard lock(mu_);
    auto& q = queues_[tag];
    for (auto& r : replies) q.push_back(std::move(r));
    return *this;
}

ScriptedChat& ScriptedChat::on(const std::string& tag, Fn fn) {
    std::lock_guard lock(mu_);
    fns_[tag] = std::move(fn);
    return *this;
}

ScriptedChat& ScriptedChat::fail(const std::string& tag, int times, std::function<void()> thrower) {
    std::lock_guard lock(mu_);
    failures_[tag] = {times, std::move(thrower)};
    return *this;
}

llm::ChatResponse ScriptedChat::complete(const llm::ChatRequest& request) {
    std::optional<std::string> scripted;
    std::function<void()> thrower;
    Fn fn;
    {
        std::lock_guard lock(mu_);
        log_.push_back(request);
        if (auto f = failures_.find(request.schema_tag); f != failures_.end() && f->second.first > 0) {
            --f->second.first;
            thrower = f->second.second;
        } else if (auto q = queues_.find(request.schema_tag); q != queues_.end() && !q->second.empty()) {
            scripted = std::move(q->second.front());
            q->second.pop_front();
        } else if (auto it = fns_.find(request.schema_tag); it != fns_.end()) {
            fn = it->second;
        }
    }
    if (thrower) thrower();
    if (fn) scripted = fn(request);
    if (!scripted) return fallback_.complete(request);
    llm::ChatResponse r;
    r.raw_text = *scripted;
    r.parsed = llm::Fields::parse(r.raw_text);
    r.backend_name = name();
    return r;
}

std::vector<llm::ChatRequest> ScriptedChat::requests() const {
    std::lock_guard lock(mu_);
    return log_;
}

std::vector<std::string> ScriptedChat::tags() const {
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    for (const auto& r : log_) out.push_back(r.schema_tag);
    return out;
}

int ScriptedChat::count(const std::string& tag) const {
    std::lock_guard lock(mu_);
    int n = 0;
    for (const auto& r : log_) n += r.schema_tag == tag ? 1 : 0;
    return n;
}

void ScriptedChat::clear_log() {
    std::lock_guard lock(mu_);
    log_.clear();
}

bool oracle_visible(const ContextEntry& e, const AgentId& agent, const std::set<std::string>& groups,
                    std::uint64_t upto) {
    if (e.timestamp > upto) return false;
    if (std::holds_alternative<ClassroomScope>(e.range)) return true;
    if (const auto* a = std::get_if<AgentScope>(&e.range)) return a->agent == agent;
    const auto& g = std::get<GroupScope>(e.range);
    // A group entry is visible to members of the group the caller belongs to.
    return groups.count(g.key) > 0 && std::find(g.members.begin(), g.members.end(), agent) != g.members.end();
}

FuzzWorld make_world(Rng& rng, int agents, int groups) {
    FuzzWorld w;
    for (int i = 0; i < agents; ++i) w.agents.push_back("a" + std::to_string(i));
    for (int g = 0; g < groups; ++g) {
        std::vector<AgentId> members;
        for (const auto& a : w.agents) {
            if (uniform_index(rng, 3) == 0) members.push_back(a);
        }
        if (members.empty()) members.push_back(w.agents[uniform_index(rng, w.agents.size())]);
        w.groups["g" + std::to_string(g)] = members;
    }
    return w;
}

void fuzz_fill(ContextStore& store, const FuzzWorld& world, Rng& rng, int n) {
    static const EntryType kTypes[] = {EntryType::Dialogue, EntryType::Memory, EntryType::Inference, EntryType::Action};
    std::vector<std::string> keys;
    for (const auto& [k, m] : world.groups) keys.push_back(k);
    for (int i = 0; i < n; ++i) {
        VisibilityRange range;
        switch (uniform_index(rng, 3)) {
            case 0: range = classroom_scope(); break;
            case 1: range = agent_scope(world.agents[uniform_index(rng, world.agents.size())]); break;
            default: {
                const auto& key = keys[uniform_index(rng, keys.size())];
                const auto& members = world.groups.at(key);
                range = group_scope(key, {members.begin(), members.end()});
            }
        }
        store.append("entry " + std::to_string(i), range, std::nullopt, kTypes[uniform_index(rng, 4)]);
    }
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace mindroom::testing
