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
#include <string>
#include <utility>
#include <vector>

#include "mindroom/context_store.hpp"
#include "mindroom/llm/chat.hpp"
#include "mindroom/prompts.hpp"
#include "mindroom/random.hpp"

namespace mindroom {

/// Content and personality seeds for simulated students.
///
/// Seed pool file: `{"content_seeds": [...], "personality_seeds": [...]}`, both non-empty.
struct SeedPools {
    std::vector<std::string> content_seeds;
    std::vector<std::string> personality_seeds;

    void validate() const;
    static SeedPools defaults();
    static SeedPools load(const std::filesystem::path& path);
    static SeedPools parse(std::string_view text);
    std::string dump() const;
};

struct StudentPersona {
    std::string student_id;
    std::string background;
    std::string personality;
    std::string learning_content;
    std::string challenges;
    std::string goals_expectations;
};

struct StudentState {
    std::string belief;
    std::string desire;
    std::string intention;
    std::string emotion_text;
    std::string thought;
    int emotion_score = 50;   // [0, 100], multiple of 5
    int cognitive_level = 1;  // [1, 6]
    bool terminated = false;
    std::string last_verdict;
};

struct EvalConfig {
    int initial_emotion = 50;
    int termination_threshold = 20;
    int max_emotion_step = 10;
    double temperature = 0.7;
    double scoring_temperature = 0.0;

    void validate() const;
};

// Snaps a reported change to the 5-point grid and to [-max_step, max_step].
int normalize_emotion_delta(double reported, int max_step);
int apply_emotion_delta(int score, int delta);

/// Simulated student: seeded persona, evolving mental state and an emotion score that drops
/// when the companions miss the student's needs. The session ends once the emotion score
/// falls below the termination threshold.
class EvaluationAgent {
public:
    EvaluationAgent(llm::ChatBackend& backend, EvalConfig config = {},
                    const PromptCatalog& prompts = PromptCatalog::builtin());

    std::pair<StudentPersona, StudentState> build_persona(const SeedPools& pools, Rng& rng,
                                                          const std::string& student_id) const;
    // Throws PreconditionViolation on a terminated state, MalformedOutput on an empty utterance.
    std::string student_turn(const StudentState& state, const StudentPersona& persona,
                             const std::vector<ContextEntry>& dialogue, int round, int turns) const;
    // Malformed replies leave the state unchanged (with a warning).
    StudentState update_state(const StudentState& state, const StudentPersona& persona, const std::string& utterance,
                              const std::vector<std::string>& companion_responses) const;
    // Separate judge prompt; falls back to level 1 when the reply stays unusable.
    int assess_cognition(const std::string& utterance) const;

    const EvalConfig& config() const { return config_; }

private:
    PromptVars persona_vars(const StudentPersona& persona) const;

    llm::ChatBackend& backend_;
    EvalConfig config_;
    const PromptCatalog& prompts_;
};

std::string render_state(const StudentState& state);

}  // namespace mindroom
