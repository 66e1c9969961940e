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

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "mindroom/errors.hpp"
#include "mindroom/tom_pipeline.hpp"
#include "test_support.hpp"

namespace mindroom {
namespace {

using testing::ScriptedChat;

Persona teacher() { return default_personas()[0]; }
Persona classmate() { return default_personas()[1]; }

std::string full_text(const llm::ChatRequest& r) {
    std::string all = r.system_prompt;
    for (const auto& m : r.messages) all += "\n" + m.text;
    return all;
}

PipelineConfig cfg(double threshold = 0.5, int retries = 2) {
    PipelineConfig c;
    c.utility_threshold = threshold;
    c.max_retries = retries;
    return c;
}

std::vector<std::string> utility_replies(std::initializer_list<double> values) {
    std::vector<std::string> out;
    for (double v : values) out.push_back("utility: " + std::to_string(v));
    return out;
}

TEST(ProposeInitial, ReturnsExactlyKScriptedTexts) {
    ScriptedChat chat;
    chat.queue("hypotheses", {"hypothesis: a\nhypothesis: b\nhypothesis: c\nhypothesis: d\nhypothesis: e"});
    TomPipeline p(chat, cfg());
    EXPECT_EQ(p.propose_initial("What is attention?", {}), (std::vector<std::string>{"a", "b", "c", "d", "e"}));
}

TEST(ProposeInitial, ExtraHypothesesTruncatedToK) {
    ScriptedChat chat;
    chat.queue("hypotheses", {"hypothesis 1: a\nhypothesis 2: b\nhypothesis 3: c"});
    auto c = cfg();
    c.k = 2;
    TomPipeline p(chat, c);
    EXPECT_EQ(p.propose_initial("x?", {}).size(), 2u);
}

TEST(ProposeInitial, StrugglingReadingSurvivesParsing) {
    ScriptedChat chat;
    chat.queue("hypotheses", {"hypothesis: The student is struggling with understanding Transformer concepts.\n"
                              "hypothesis: The student wants a worked example."});
    TomPipeline p(chat, cfg());
    const auto out = p.propose_initial("Why is multi-head attention used in Transformers?", {});
    ASSERT_FALSE(out.empty());
    EXPECT_TRUE(std::any_of(out.begin(), out.end(), [](const std::string& h) {
        return h.find("struggling with understanding Transformer concepts") != std::string::npos;
    }));
}

TEST(ProposeInitial, NoHypothesesAfterReaskIsMalformed) {
    ScriptedChat chat;
    chat.queue("hypotheses", {"I am not sure", "still nothing"});
    TomPipeline p(chat, cfg());
    EXPECT_THROW(p.propose_initial("x?", {}), MalformedOutput);
    EXPECT_EQ(chat.count("hypotheses"), 2);
}

TEST(ProposeInitial, PromptCarriesContextButNoMemory) {
    ScriptedChat chat;
    TomPipeline p(chat, cfg());
    ContextEntry e;
    e.ctx = "Teacher: attention weights tokens";
    p.propose_initial("Why heads?", {e});
    const auto r = chat.requests().front();
    EXPECT_NE(full_text(r).find("attention weights tokens"), std::string::npos);
    EXPECT_NE(full_text(r).find("Why heads?"), std::string::npos);
    EXPECT_EQ(full_text(r).find("remember"), std::string::npos);
}

TEST(ProposeInitial, EmptyUtteranceRejected) {
    ScriptedChat chat;
    TomPipeline p(chat, cfg());
    EXPECT_THROW(p.propose_initial("   ", {}), PreconditionViolation);
}

TEST(FilterByMemory, EmptyMemoryIsIdentityWithoutCalls) {
    ScriptedChat chat;
    TomPipeline p(chat, cfg());
    const std::vector<std::string> raw{"x", "y"};
    EXPECT_EQ(p.filter_by_memory(raw, {}), raw);
    EXPECT_TRUE(chat.requests().empty());
}

TEST(FilterByMemory, ContradictedHypothesisDropped) {
    ScriptedChat chat;
    // Verdict table: drop whichever item contradicts the remembered mastery.
    chat.on("memory-filter", [](const llm::ChatRequest& r) {
        std::string out;
        int i = 1;
        std::string items = r.meta_or("items");
        std::size_t pos = 0;
        while (pos < items.size()) {
            auto end = items.find('\n', pos);
            if (end == std::string::npos) end = items.size();
            const auto line = items.substr(pos, end - pos);
            const bool contradicts = line.find("does not know what attention is") != std::string::npos &&
                                     r.meta_or("memory").find("already mastered attention basics") != std::string::npos;
            out += "verdict " + std::to_string(i++) + ": " + (contradicts ? "drop" : "keep") + "\n";
            pos = end + 1;
        }
        return out;
    });
    TomPipeline p(chat, cfg());
    const std::vector<MemoryRecord> mem{{"teacher", "student already mastered attention basics", 1}};
    const auto kept = p.filter_by_memory({"wants a deeper example", "does not know what attention is", "feels rushed"}, mem);
    EXPECT_EQ(kept, (std::vector<std::string>{"wants a deeper example", "feels rushed"}));
}

TEST(FilterByMemory, RejectingAllKeepsFirstRanked) {
    ScriptedChat chat;
    chat.queue("memory-filter", {"verdict 1: drop\nverdict 2: drop\nverdict 3: drop\nverdict 4: drop\nverdict 5: drop"});
    TomPipeline p(chat, cfg());
    const std::vector<MemoryRecord> mem{{"teacher", "m", 1}};
    EXPECT_EQ(p.filter_by_memory({"a", "b", "c", "d", "e"}, mem), (std::vector<std::string>{"a"}));
}

TEST(FilterByMemory, BackendErrorIsIdentity) {
    ScriptedChat chat;
    chat.fail("memory-filter", 1, [] { throw TransportError("gone"); });
    TomPipeline p(chat, cfg());
    const std::vector<std::string> raw{"a", "b"};
    EXPECT_EQ(p.filter_by_memory(raw, {{"teacher", "m", 1}}), raw);
}

TEST(FilterByMemory, EmptyInputRejected) {
    ScriptedChat chat;
    TomPipeline p(chat, cfg());
    EXPECT_THROW(p.filter_by_memory({}, {}), PreconditionViolation);
}

TEST(LabelHypotheses, ScriptedLabelTable) {
    ScriptedChat chat;
    chat.queue("tom-labels", {"label 1: Desire\nlabel 2: Belief\nlabel 3: Emotion"});
    TomPipeline p(chat, cfg());
    const auto out = p.label_hypotheses({"wants a concrete example", "thinks heads are redundant", "feels lost"});
    ASSERT_EQ(out.size(), 3u);
    EXPECT_EQ(out[0], (ToMHypothesis{1, "wants a concrete example", TomLabel::Desire}));
    EXPECT_EQ(out[1].index, 2);
    EXPECT_EQ(out[2].index, 3);
    EXPECT_EQ(out[2].label, TomLabel::Emotion);
    EXPECT_EQ(chat.count("tom-labels"), 1);
}

TEST(LabelHypotheses, OffVocabularyReaskedThenThought) {
    ScriptedChat chat;
    chat.queue("tom-labels", {"label 1: Curiosity", "label 1: Curiosity"});
    TomPipeline p(chat, cfg());
    const auto out = p.label_hypotheses({"asks many questions"});
    EXPECT_EQ(out[0].label, TomLabel::Thought);
    EXPECT_EQ(chat.count("tom-labels"), 2);
}

TEST(LabelHypotheses, ReaskFillsOnlyMissingLabels) {
    ScriptedChat chat;
    chat.queue("tom-labels", {"label 1: Belief\nlabel 2: Curiosity", "label 1: Emotion\nlabel 2: Intention"});
    TomPipeline p(chat, cfg());
    const auto out = p.label_hypotheses({"a", "b"});
    EXPECT_EQ(out[0].label, TomLabel::Belief);
    EXPECT_EQ(out[1].label, TomLabel::Intention);
}

TEST(InferCognitiveLevel, TierNamesMapToOrdinals) {
    const std::vector<std::pair<std::string, int>> table{{"Remember", 1}, {"Understand", 2}, {"Apply", 3},
                                                         {"Analyze", 4},  {"Evaluate", 5},   {"Create", 6}};
    for (const auto& [name, level] : table) {
        ScriptedChat chat;
        chat.queue("cognitive-level", {"level: " + name + "\nrationale: r"});
        TomPipeline p(chat, cfg());
        const auto a = p.infer_cognitive_level("something");
        EXPECT_EQ(a.level, level);
        EXPECT_EQ(a.level_name, name);
        EXPECT_EQ(a.rationale, "r");
    }
}

TEST(InferCognitiveLevel, OutOfRangeReaskedThenClamped) {
    ScriptedChat chat;
    chat.queue("cognitive-level", {"level: 9", "level: 9"});
    TomPipeline p(chat, cfg());
    const auto a = p.infer_cognitive_level("x");
    EXPECT_EQ(a.level, 6);
    EXPECT_EQ(a.level_name, "Create");
    EXPECT_EQ(chat.count("cognitive-level"), 2);
}

TEST(InferCognitiveLevel, ReaskMayRecover) {
    ScriptedChat chat;
    chat.queue("cognitive-level", {"level: 0", "level: Apply"});
    TomPipeline p(chat, cfg());
    EXPECT_EQ(p.infer_cognitive_level("x").level, 3);
}

TEST(InferCognitiveLevel, GarbageTwiceIsMalformed) {
    ScriptedChat chat;
    chat.queue("cognitive-level", {"hmm", "dunno"});
    TomPipeline p(chat, cfg());
    EXPECT_THROW(p.infer_cognitive_level("x"), MalformedOutput);
}

TEST(InferCognitiveLevel, PromptSeesOnlyTheUtterance) {
    ScriptedChat chat;
    TomPipeline p(chat, cfg());
    p.infer_cognitive_level("compare heads with channels");
    const auto r = chat.requests().front();
    EXPECT_EQ(r.meta.size(), 1u);
    EXPECT_NE(full_text(r).find("compare heads with channels"), std::string::npos);
}


std::string refine_by_role(const llm::ChatRequest& r) {
    const auto frame = r.meta_or("role_kind") == "Teacher" ? "as an application scenario" : "as a playful remark";
    return "revised: treat the wish to play a game " + std::string(frame);
}

TEST(Refine, TeacherAndStudentLensesDiffer) {
    ScriptedChat chat;
    chat.on("refine", refine_by_role);
    TomPipeline p(chat, cfg());
    const std::vector<ToMHypothesis> hs{{1, "student wants to play a game", TomLabel::Desire}};
    const auto t = p.refine(hs, teacher(), default_constraint_rules(), {}, {});
    const auto s = p.refine(hs, classmate(), default_constraint_rules(), {}, {});
    EXPECT_NE(t[0].revised_text.find("as an application scenario"), std::string::npos);
    EXPECT_NE(s[0].revised_text.find("as a playful remark"), std::string::npos);
}

TEST(Refine, ArityIndicesAndScoresInRange) {
    ScriptedChat chat;
    TomPipeline p(chat, cfg());
    std::vector<ToMHypothesis> hs;
    for (int i = 1; i <= 4; ++i) hs.push_back({i, "The student wants example " + std::to_string(i), TomLabel::Desire});
    const auto out = p.refine(hs, teacher(), default_constraint_rules(), {}, {{"teacher", "remembered", 1}});
    ASSERT_EQ(out.size(), 4u);
    for (int i = 0; i < 4; ++i) {
        EXPECT_EQ(out[static_cast<std::size_t>(i)].source_index, i + 1);
        EXPECT_GE(out[static_cast<std::size_t>(i)].plausibility, 0.0);
        EXPECT_LE(out[static_cast<std::size_t>(i)].plausibility, 1.0);
        EXPECT_EQ(out[static_cast<std::size_t>(i)].label, TomLabel::Desire);
    }
    // Scoring prompts see the memory; each candidate is scored on its own.
    int scoring = 0;
    for (const auto& r : chat.requests()) {
        if (r.schema_tag != "plausibility") continue;
        ++scoring;
        EXPECT_NE(full_text(r).find("remembered"), std::string::npos);
        EXPECT_EQ(full_text(r).find("example " + std::to_string(scoring % 4 + 1)), std::string::npos);
    }
    EXPECT_EQ(scoring, 4);
}

TEST(Refine, MalformedScoreIsZeroForThatCandidateOnly) {
    ScriptedChat chat;
    chat.queue("plausibility", {"plausibility: 0.7", "no clue", "still no clue"});
    TomPipeline p(chat, cfg());
    const std::vector<ToMHypothesis> hs{{1, "a", TomLabel::Belief}, {2, "b", TomLabel::Belief}};
    const auto out = p.refine(hs, teacher(), {}, {}, {});
    EXPECT_DOUBLE_EQ(out[0].plausibility, 0.7);
    EXPECT_DOUBLE_EQ(out[1].plausibility, 0.0);
}

TEST(Refine, OutOfRangeScoreClamped) {
    ScriptedChat chat;
    chat.queue("plausibility", {"plausibility: 1.7"});
    TomPipeline p(chat, cfg());
    const auto out = p.refine({{1, "a", TomLabel::Belief}}, teacher(), {}, {}, {});
    EXPECT_DOUBLE_EQ(out[0].plausibility, 1.0);
}

std::vector<RefinedHypothesis> with_scores(const std::vector<double>& scores) {
    std::vector<RefinedHypothesis> out;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out.push_back({static_cast<int>(i) + 1, "h" + std::to_string(i + 1), scores[i], TomLabel::Thought});
    }
    return out;
}

TEST(SelectBest, Examples) {
    EXPECT_EQ(TomPipeline::select_best(with_scores({0.4, 0.9, 0.2})).source_index, 2);
    EXPECT_EQ(TomPipeline::select_best(with_scores({0.9, 0.9})).source_index, 1);
    EXPECT_EQ(TomPipeline::select_best(with_scores({0.3})).source_index, 1);
    EXPECT_THROW(TomPipeline::select_best({}), PreconditionViolation);
}

TEST(SelectBest, MatchesLinearScanOnRandomVectors) {
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> scores(1 + uniform_index(rng, 7));
        // Coarse grid so ties are common.
        for (auto& s : scores) s = static_cast<double>(uniform_index(rng, 5)) / 4.0;
        std::size_t oracle = 0;
        for (std::size_t i = 1; i < scores.size(); ++i) {
            if (scores[i] > scores[oracle]) oracle = i;
        }
        const auto refined = with_scores(scores);
        const auto& best = TomPipeline::select_best(refined);
        EXPECT_EQ(best.source_index, static_cast<int>(oracle) + 1);
        for (const auto& r : refined) EXPECT_GE(best.plausibility, r.plausibility);
    }
}

const RefinedHypothesis kSelected{1, "the student wants an example", 0.8, TomLabel::Desire};
const GenerationInput kInput{"What is attention?", {}, {2, "Understand", ""}};

TEST(GenerateAndValidate, RegeneratesOnceBelowThreshold) {
    ScriptedChat chat;
    chat.queue("utility", utility_replies({0.3, 0.8}));
    TomPipeline p(chat, cfg(0.5));
    const auto r = p.generate_and_validate(kSelected, {}, teacher(), {ActionName::Explain, {}}, kInput);
    EXPECT_EQ(r.final_draft.attempt, 2);
    EXPECT_DOUBLE_EQ(r.final_draft.utility, 0.8);
    EXPECT_EQ(chat.count("response"), 2);
}

TEST(GenerateAndValidate, AboveThresholdSingleCall) {
    ScriptedChat chat;
    chat.queue("utility", utility_replies({0.9}));
    TomPipeline p(chat, cfg(0.5));
    const auto r = p.generate_and_validate(kSelected, {}, teacher(), {ActionName::Explain, {}}, kInput);
    EXPECT_EQ(r.final_draft.attempt, 1);
    EXPECT_EQ(chat.count("response"), 1);
}

TEST(GenerateAndValidate, BestOfAllAttemptsWhenNonePass) {
    ScriptedChat chat;
    chat.queue("response", {"first", "second", "third"});
    chat.queue("utility", utility_replies({0.3, 0.2, 0.1}));
    TomPipeline p(chat, cfg(0.5, 2));
    const auto r = p.generate_and_validate(kSelected, {}, teacher(), {ActionName::Explain, {}}, kInput);
    EXPECT_EQ(r.final_draft.attempt, 3);
    EXPECT_DOUBLE_EQ(r.final_draft.utility, 0.3);
    EXPECT_EQ(r.final_draft.text, "first");
    EXPECT_EQ(r.drafts.size(), 3u);
}

TEST(GenerateAndValidate, PromptCarriesMemoryRoleActionAndScaffolding) {
    ScriptedChat chat;
    chat.queue("utility", utility_replies({0.9}));
    TomPipeline p(chat, cfg(0.5));
    const std::vector<MemoryRecord> mem{{"teacher", "asked about softmax earlier", 1}};
    p.generate_and_validate(kSelected, mem, teacher(), {ActionName::CallRoll, std::string("maya")}, kInput);
    const auto r = chat.requests().front();
    ASSERT_EQ(r.schema_tag, "response");
    const auto text = full_text(r);
    EXPECT_NE(text.find("asked about softmax earlier"), std::string::npos);
    EXPECT_NE(text.find(teacher().description), std::string::npos);
    EXPECT_NE(text.find("CallRoll"), std::string::npos);
    EXPECT_NE(text.find("maya"), std::string::npos);
    EXPECT_NE(text.find("Guide the student's thinking through your answer"), std::string::npos);
}

TEST(GenerateAndValidate, RetryPromptMentionsRejection) {
    ScriptedChat chat;
    chat.queue("utility", utility_replies({0.1, 0.9}));
    TomPipeline p(chat, cfg(0.5));
    p.generate_and_validate(kSelected, {}, teacher(), {ActionName::Explain, {}}, kInput);
    std::vector<llm::ChatRequest> gens;
    for (const auto& r : chat.requests()) {
        if (r.schema_tag == "response") gens.push_back(r);
    }
    ASSERT_EQ(gens.size(), 2u);
    EXPECT_EQ(full_text(gens[0]).find("rejected"), std::string::npos);
    EXPECT_NE(full_text(gens[1]).find("rated 0.10"), std::string::npos);
}

TEST(GenerateAndValidate, BackendErrorSurfaces) {
    ScriptedChat chat;
    chat.fail("response", 1, [] { throw TransportError("down"); });
    TomPipeline p(chat, cfg(0.5));
    EXPECT_THROW(p.generate_and_validate(kSelected, {}, teacher(), {ActionName::Explain, {}}, kInput), BackendError);
}

// Regeneration happens exactly while the previous draft is below threshold, capped at max_retries.
TEST(GenerateAndValidate, RegenerationCountProperty) {
    Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const int retries = static_cast<int>(uniform_index(rng, 4));
        const double threshold = static_cast<double>(uniform_index(rng, 11)) / 10.0;
        std::vector<double> seq;
        for (int i = 0; i <= retries; ++i) seq.push_back(static_cast<double>(uniform_index(rng, 11)) / 10.0);
        std::vector<std::string> replies;
        for (double v : seq) replies.push_back("utility: " + std::to_string(v));

        int expected_calls = 0;
        for (double v : seq) {
            ++expected_calls;
            if (v >= threshold) break;
        }
        ScriptedChat chat;
        chat.queue("utility", replies);
        TomPipeline p(chat, cfg(threshold, retries));
        const auto r = p.generate_and_validate(kSelected, {}, teacher(), {ActionName::Explain, {}}, kInput);
        EXPECT_EQ(chat.count("response"), expected_calls);
        const auto below = std::count_if(r.drafts.begin(), r.drafts.end(), [&](const auto& d) { return d.utility < threshold; });
        EXPECT_EQ(expected_calls - 1, std::min<int>(static_cast<int>(below), retries));
        EXPECT_TRUE(r.final_draft.utility >= threshold || r.final_draft.attempt == retries + 1);
    }
}

TEST(UpdateMemory, AppendsOnePerTurn) {
    std::vector<MemoryRecord> mem;
    const CognitiveAssessment a{4, "Analyze", ""};
    const auto first = TomPipeline::update_memory(mem, "teacher", kSelected, a, 1);
    EXPECT_EQ(mem.size(), 1u);
    EXPECT_NE(first.summary.find("Analyze"), std::string::npos);
    for (int t = 2; t <= 5; ++t) TomPipeline::update_memory(mem, "teacher", kSelected, a, t);
    ASSERT_EQ(mem.size(), 5u);
    for (int t = 1; t <= 5; ++t) EXPECT_EQ(mem[static_cast<std::size_t>(t - 1)].turn, t);
    EXPECT_THROW(TomPipeline::update_memory(mem, "teacher", kSelected, a, 0), PreconditionViolation);
}

TEST(Run, StageOrderMatchesContract) {
    ScriptedChat chat;
    chat.queue("utility", utility_replies({0.2, 0.9}));
    TomPipeline p(chat, cfg(0.5));
    TurnInput in{"Can you compare heads with channels?", {}, {{"teacher", "earlier turn", 1}}, teacher()};
    int chooser_calls = 0;
    const auto trace = p.run(in, [&](const std::string&) {
        ++chooser_calls;
        EXPECT_EQ(chat.count("response"), 0);
        return ActionKind{ActionName::Explain, std::nullopt};
    });
    EXPECT_EQ(chooser_calls, 1);
    const auto n = trace.labeled.size();
    std::vector<std::string> expected{"hypotheses", "memory-filter", "tom-labels", "cognitive-level"};
    for (std::size_t i = 0; i < n; ++i) expected.push_back("refine");
    for (std::size_t i = 0; i < n; ++i) expected.push_back("plausibility");
    for (int i = 0; i < 2; ++i) {
        expected.push_back("response");
        expected.push_back("utility");
    }
    EXPECT_EQ(chat.tags(), expected);
    EXPECT_EQ(trace.generation.final_draft.attempt, 2);
    EXPECT_EQ(trace.assessment.level, 4);
}

TEST(Run, SilenceSkipsGeneration) {
    ScriptedChat chat;
    TomPipeline p(chat, cfg());
    TurnInput in{"hello?", {}, {}, default_personas()[3]};
    const auto trace = p.run(in, [](const std::string&) { return ActionKind{ActionName::RemainSilent, std::nullopt}; });
    EXPECT_EQ(chat.count("response"), 0);
    EXPECT_TRUE(trace.generation.drafts.empty());
}

TEST(Run, LabelsAndLevelsStayInVocabulary) {
    const std::set<std::string> labels{"Belief", "Desire", "Intention", "Emotion", "Thought"};
    for (const auto& utter : {"remind me what a head is", "what if we designed our own layer?", "plain question"}) {
        ScriptedChat chat(llm::SyntheticProfile::Volatile);
        TomPipeline p(chat, cfg());
        const auto trace = p.run({utter, {}, {}, teacher()}, nullptr);
        EXPECT_GE(trace.assessment.level, kMinBloomLevel);
        EXPECT_LE(trace.assessment.level, kMaxBloomLevel);
        for (const auto& h : trace.labeled) EXPECT_TRUE(labels.count(std::string(to_string(h.label))));
    }
}

TEST(Run, ReplayEquality) {
    auto once = [] {
        ScriptedChat chat;
        TomPipeline p(chat, cfg());
        const auto t = p.run({"compare heads and channels", {}, {{"teacher", "m", 1}}, teacher()}, nullptr);
        return std::make_pair(chat.tags(), t.generation.final_draft.text);
    };
    EXPECT_EQ(once(), once());
}

TEST(PipelineConfig, Validation) {
    PipelineConfig c;
    EXPECT_NO_THROW(c.validate());
    c.k = 0;
    EXPECT_THROW(c.validate(), ValidationError);
    c = {};
    c.utility_threshold = 1.5;
    EXPECT_THROW(c.validate(), ValidationError);
    c = {};
    c.max_retries = -1;
    EXPECT_THROW(c.validate(), ValidationError);
    c = {};
    c.constraint_rules.push_back({ConstraintKind::Custom, ""});
    EXPECT_THROW(c.validate(), ValidationError);
}

TEST(BloomNames, RoundTrip) {
    for (int l = kMinBloomLevel; l <= kMaxBloomLevel; ++l) EXPECT_EQ(parse_bloom_name(bloom_name(l)), l);
    EXPECT_THROW(bloom_name(7), ValidationError);
}

}  // namespace
}  // namespace mindroom
