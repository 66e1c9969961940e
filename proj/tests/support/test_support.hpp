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

#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "mindroom/context_store.hpp"
#include "mindroom/llm/chat.hpp"
#include "mindroom/llm/synthetic.hpp"
#include "mindroom/random.hpp"

namespace mindroom::testing {

std::filesystem::path source_dir();
// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& tag);

/// Backend for tests: replies per schema tag come from a queue or a function; tags without a
/// script fall through to the synthetic backend. Every request is logged.
class ScriptedChat final : public llm::ChatBackend {
public:
    using Fn = std::function<std::string(const llm::ChatRequest&)>;

    explicit ScriptedChat(llm::SyntheticProfile fallback = llm::SyntheticProfile::Default);

    // Replies consumed in order; once exhausted the tag falls through again.
    ScriptedChat& queue(const std::string& tag, std::vector<std::string> replies);
    ScriptedChat& on(const std::string& tag, Fn fn);
    // Throws `error` for the next `times` calls with this tag.
    ScriptedChat& fail(const std::string& tag, int times, std::function<void()> thrower);

    llm::ChatResponse complete(const llm::ChatRequest& request) override;
    std::string name() const override { return "test-script"; }

    std::vector<llm::ChatRequest> requests() const;
    std::vector<std::string> tags() const;
    int count(const std::string& tag) const;
    void clear_log();

private:
    mutable std::mutex mu_;
    llm::SyntheticBackend fallback_;
    std::map<std::string, std::deque<std::string>> queues_;
    std::map<std::string, Fn> fns_;
    std::map<std::string, std::pair<int, std::function<void()>>> failures_;
    std::vector<llm::ChatRequest> log_;
};

// Independent statement of the visibility rule, used as the oracle in property tests.
bool oracle_visible(const ContextEntry& e, const AgentId& agent, const std::set<std::string>& groups,
                    std::uint64_t upto);

struct FuzzWorld {
    std::vector<AgentId> agents;
    std::map<std::string, std::vector<AgentId>> groups;  // key -> members
};

FuzzWorld make_world(Rng& rng, int agents, int groups);
// Appends `n` entries with random ranges and types (never RoleSetting) to `store`.
void fuzz_fill(ContextStore& store, const FuzzWorld& world, Rng& rng, int n);

std::string read_file(const std::filesystem::path& p);

}  // namespace mindroom::testing
