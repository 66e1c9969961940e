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
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mindroom/behavior_controller.hpp"
#include "mindroom/context_store.hpp"
#include "mindroom/eval_agent.hpp"
#include "mindroom/llm/chat.hpp"
#include "mindroom/persona.hpp"
#include "mindroom/tom_pipeline.hpp"

namespace mindroom {

enum class SessionMode { Simulated, Live };

inline constexpr const char* kStudentId = "student";

struct SessionConfig {
    std::string session_id = "session-001";
    int turns = 5;
    std::vector<Persona> agent_personas = default_personas();
    int top_n = 3;
    PipelineConfig pipeline;
    EvalConfig eval;
    SeedPools seed_pools = SeedPools::defaults();
    std::uint64_t seed = 7;
    SessionMode mode = SessionMode::Simulated;
    bool parallel_elicitation = false;

    // Throws ValidationError when any invariant fails.
    void validate() const;
};

enum class Termination { Completed, EmotionBelowThreshold, BackendFailure, Ended };

std::string_view to_string(Termination t);
std::optional<Termination> parse_termination(std::string_view text);

struct TurnRecord {
    int turn = 1;
    std::string student_utterance;
    std::vector<IntentionScore> intentions;
    AgentId speaker;  // empty when every selected agent stayed silent
    ActionKind action;
    std::string response;
    std::optional<int> cognitive_score;
    std::optional<int> emotion_score;
    bool terminated = false;
    std::string note;

    bool operator==(const TurnRecord&) const = default;
};

struct SessionTranscript {
    std::string session_id;
    std::string learning_content;
    std::string personality;
    std::vector<AgentId> agents;
    std::vector<TurnRecord> turns;
    Termination termination = Termination::Completed;
    bool failed = false;
    std::string error;

    bool operator==(const SessionTranscript&) const = default;
};

struct RunSummary {
    std::vector<double> mean_cognitive_per_turn;  // index 0 = turn 1
    std::vector<int> sessions_per_turn;
    double final_mean_emotion = 0.0;
    std::vector<int> max_cognitive_per_session;
    int session_count = 0;
    int failed_count = 0;

    bool operator==(const RunSummary&) const = default;
};

// What happened in one companion round.
struct CompanionReply {
    std::vector<IntentionScore> intentions;
    AgentId speaker;
    ActionKind action;
    std::string response;
    std::optional<PipelineTrace> trace;
    std::vector<AgentId> silent;  // agents that chose RemainSilent this round
    std::string note;
};

/// One classroom: context store, companion personas, turn-taking and per-agent ToM pipelines.
///
/// Each round the student's utterance is recorded, every companion rates its intention to speak,
/// one speaker is selected (a pending referral overrides the ranking), its pipeline runs and
/// picks an action, and the reply, action, inference and memory are written back with their
/// visibility ranges. A speaker that remains silent gets one replacement drawn from the others.
class Classroom {
public:
    Classroom(llm::ChatBackend& backend, const SessionConfig& config);

    // A failed pipeline (backend or parse error) leaves the round without a reply (see `note`);
    // only a cassette miss propagates.
    CompanionReply run_round(int turn, const std::string& student_utterance);

    ContextStore& store() { return store_; }
    const ContextStore& store() const { return store_; }
    const std::vector<Persona>& companions() const { return personas_; }
    const std::optional<AgentId>& pending_referral() const { return referral_; }

private:
    std::vector<ContextEntry> context_for(const AgentId& agent, std::uint64_t upto) const;

    llm::ChatBackend& backend_;
    SessionConfig config_;
    ContextStore store_;
    std::vector<Persona> personas_;
    BehaviorController controller_;
    TomPipeline pipeline_;
    Rng rng_;
    std::optional<AgentId> referral_;
};

// Observer invoked after each completed turn (used for tracing and tests).
using TurnObserver = std::function<void(const TurnRecord&, const Classroom&)>;

/// Runs one simulated session: the evaluation agent opens every round, the classroom replies,
/// the student's utterance is scored on Bloom's scale and its state is updated from the replies.
SessionTranscript run_session(const SessionConfig& config, llm::ChatBackend& backend,
                              const TurnObserver& observer = {});

// Session i (0-based) of a batch: id "session-<i+1, 3 digits>", seed derived from the base seed.
SessionConfig batch_session_config(const SessionConfig& base, int index);

struct BatchResult {
    std::vector<SessionTranscript> transcripts;
    RunSummary summary;
};

BatchResult run_batch(const std::vector<SessionConfig>& configs, llm::ChatBackend& backend, int jobs = 1);
RunSummary summarize(const std::vector<SessionTranscript>& transcripts);

struct RoundRow {
    int turn = 1;
    double mean_cog = 0.0;
};

struct AgentRow {
    int agents = 1;
    double mean_max_cog = 0.0;
};

std::vector<RoundRow> round_table(const RunSummary& summary);
std::vector<RoundRow> sweep_rounds(const SessionConfig& base, int max_turns, int sessions_per_point,
                                   llm::ChatBackend& backend, int jobs = 1);
// Personas for each count are drawn cyclically from `catalog`.
std::vector<AgentRow> sweep_agents(const SessionConfig& base, const std::vector<int>& agent_counts,
                                   int sessions_per_point, const std::vector<Persona>& catalog,
                                   llm::ChatBackend& backend, int jobs = 1);
AgentRow agent_row(int agents, const RunSummary& summary);

}  // namespace mindroom
