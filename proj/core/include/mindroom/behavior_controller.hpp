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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mindroom/context_store.hpp"
#include "mindroom/llm/chat.hpp"
#include "mindroom/persona.hpp"
#include "mindroom/prompts.hpp"
#include "mindroom/random.hpp"

namespace mindroom {

struct IntentionScore {
    AgentId agent_id;
    int score = 0;  // [0, 10]

    bool operator==(const IntentionScore&) const = default;
};

// One agent together with the context it is allowed to see.
struct AgentView {
    Persona persona;
    std::vector<ContextEntry> context;
};

struct ControllerConfig {
    int top_n = 3;
    double temperature = 0.0;
    // Elicit intentions for different agents concurrently.
    bool parallel = false;
};

// Parses an intention reply ("intention: 7", "7", "7.5 out of 10"). Non-integers round half-up,
// the result is clamped to [0, 10]. Returns nullopt when no number is present.
std::optional<int> parse_intention(const std::string& raw);

/// Picks the next speaker. A referral wins outright; otherwise one agent is drawn uniformly
/// from the top min(n, |scores|) by score, ties ranked by position in `scores` (registration order).
/// Throws UnknownReferral if the referral is not among the scored agents.
AgentId select_speaker(std::span<const IntentionScore> scores, int n, Rng& rng,
                       const std::optional<AgentId>& referral = std::nullopt);

/// Turn-taking: asks every agent how much it wants to speak, picks the speaker and lets
/// the speaker pick an action from its persona's action list.
class BehaviorController {
public:
    BehaviorController(llm::ChatBackend& backend, ControllerConfig config = {},
                       const PromptCatalog& prompts = PromptCatalog::builtin());

    // One backend call per agent (plus at most one re-ask). Failures score 0.
    std::vector<IntentionScore> elicit_intentions(const std::vector<AgentView>& agents) const;
    IntentionScore elicit_one(const AgentView& view) const;

    // `peers` are the agents the action may refer to; a refers_to outside it is dropped.
    ActionKind choose_action(const Persona& actor, const std::string& hypothesis_summary,
                             const std::vector<ContextEntry>& context, const std::vector<AgentId>& peers) const;

    const ControllerConfig& config() const { return config_; }

private:
    llm::ChatBackend& backend_;
    ControllerConfig config_;
    const PromptCatalog& prompts_;
};

}  // namespace mindroom
