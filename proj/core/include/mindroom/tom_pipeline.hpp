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

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mindroom/context_store.hpp"
#include "mindroom/llm/chat.hpp"
#include "mindroom/persona.hpp"
#include "mindroom/prompts.hpp"

namespace mindroom {

enum class TomLabel { Belief, Desire, Intention, Emotion, Thought };

inline constexpr TomLabel kAllTomLabels[] = {TomLabel::Belief, TomLabel::Desire, TomLabel::Intention,
                                             TomLabel::Emotion, TomLabel::Thought};

std::string_view to_string(TomLabel label);
std::optional<TomLabel> parse_tom_label(std::string_view text);

// Bloom tiers, 1 = Remember ... 6 = Create.
inline constexpr int kMinBloomLevel = 1;
inline constexpr int kMaxBloomLevel = 6;
std::string_view bloom_name(int level);
std::optional<int> parse_bloom_name(std::string_view text);

// A Bloom-tier reply: "level: Analyze", "level: 4" or a bare tier name.
struct BloomReply {
    std::optional<int> level;
    std::optional<double> out_of_range;  // a number outside [1, 6]
    std::string rationale;
};

BloomReply parse_bloom_reply(const std::string& raw);
std::string bloom_reask_problem(const BloomReply& reply);
// After a re-ask: the second reply if usable, otherwise an out-of-range number from either reply
// clamped to [1, 6] (with a warning). Level stays empty when neither reply had a number.
BloomReply resolve_bloom_retry(const BloomReply& first, const BloomReply& second);

struct ToMHypothesis {
    int index = 1;
    std::string explanation;
    TomLabel label = TomLabel::Thought;

    bool operator==(const ToMHypothesis&) const = default;
};

struct CognitiveAssessment {
    int level = 1;
    std::string level_name = "Remember";
    std::string rationale;
};

struct RefinedHypothesis {
    int source_index = 1;
    std::string revised_text;
    double plausibility = 0.0;  // [0, 1]
    TomLabel label = TomLabel::Thought;
};

enum class ConstraintKind { PersonaConsistency, ClassroomNorm, TopicRelevance, Custom };

std::string_view to_string(ConstraintKind kind);
std::optional<ConstraintKind> parse_constraint_kind(std::string_view text);

struct ConstraintRule {
    ConstraintKind kind = ConstraintKind::Custom;
    std::string text;

    bool operator==(const ConstraintRule&) const = default;
};

// Persona consistency, classroom-topic relevance, no out-of-character meta talk.
std::vector<ConstraintRule> default_constraint_rules();

struct ResponseDraft {
    std::string text;
    double utility = 0.0;  // [0, 1]
    int attempt = 1;
};

struct PipelineConfig {
    int k = 5;
    double utility_threshold = 0.6;
    int max_retries = 2;
    std::vector<ConstraintRule> constraint_rules = default_constraint_rules();
    double roleplay_temperature = 0.7;
    double scoring_temperature = 0.0;

    // Throws ValidationError on k < 1, a threshold outside [0, 1], negative retries or an empty rule.
    void validate() const;
};

// Everything response generation needs besides the selected hypothesis.
struct GenerationInput {
    std::string utterance;
    std::vector<ContextEntry> context;
    CognitiveAssessment assessment;
};

struct GenerationResult {
    ResponseDraft final_draft;
    std::vector<ResponseDraft> drafts;  // every attempt, in order
};

struct TurnInput {
    std::string utterance;
    std::vector<ContextEntry> context;  // strictly before the utterance
    std::vector<MemoryRecord> memory;
    Persona role;
};

// Intermediate results of one pipeline run, kept for debugging views.
struct PipelineTrace {
    std::vector<std::string> proposed;
    std::vector<std::string> filtered;
    std::vector<ToMHypothesis> labeled;
    CognitiveAssessment assessment;
    std::vector<RefinedHypothesis> refined;
    RefinedHypothesis selected;
    ActionKind action;
    GenerationResult generation;
};

/// Three-stage reasoning of a companion agent for one student utterance:
///   1. hypothesis generation: propose, filter against memory, label, infer Bloom level;
///   2. refinement: revise each hypothesis under persona and classroom constraints, score its
///      plausibility, keep the best;
///   3. response generation with self-rated utility and bounded regeneration.
///
/// Every structured reply gets one re-ask on a parse failure before the documented fallback.
class TomPipeline {
public:
    // Returns the action for the agent given the selected hypothesis summary.
    using ActionChooser = std::function<ActionKind(const std::string& hypothesis_summary)>;

    TomPipeline(llm::ChatBackend& backend, PipelineConfig config,
                const PromptCatalog& prompts = PromptCatalog::builtin());

    std::vector<std::string> propose_initial(const std::string& utterance,
                                             const std::vector<ContextEntry>& context) const;
    std::vector<std::string> filter_by_memory(const std::vector<std::string>& raw,
                                              const std::vector<MemoryRecord>& memory) const;
    std::vector<ToMHypothesis> label_hypotheses(const std::vector<std::string>& filtered) const;
    CognitiveAssessment infer_cognitive_level(const std::string& utterance) const;
    std::vector<RefinedHypothesis> refine(const std::vector<ToMHypothesis>& hypotheses, const Persona& role,
                                          const std::vector<ConstraintRule>& rules,
                                          const std::vector<ContextEntry>& context,
                                          const std::vector<MemoryRecord>& memory) const;
    // Max plausibility; ties go to the lowest source_index.
    static const RefinedHypothesis& select_best(const std::vector<RefinedHypothesis>& refined);
    GenerationResult generate_and_validate(const RefinedHypothesis& selected, const std::vector<MemoryRecord>& memory,
                                           const Persona& role, const ActionKind& action,
                                           const GenerationInput& input) const;
    static MemoryRecord update_memory(std::vector<MemoryRecord>& memory, const AgentId& owner,
                                      const RefinedHypothesis& selected, const CognitiveAssessment& assessment,
                                      int turn);

    // Runs all stages in order; `choose_action` is called between selection and generation.
    // A RemainSilent action ends the run before generation.
    PipelineTrace run(const TurnInput& input, const ActionChooser& choose_action) const;

    const PipelineConfig& config() const { return config_; }

private:
    double score_unit(llm::ChatRequest request, std::string_view field) const;

    llm::ChatBackend& backend_;
    PipelineConfig config_;
    const PromptCatalog& prompts_;
};

std::string render_memory(const std::vector<MemoryRecord>& memory);
std::string hypothesis_summary(const RefinedHypothesis& h);

}  // namespace mindroom
