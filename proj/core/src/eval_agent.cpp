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

#include "mindroom/eval_agent.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "mindroom/errors.hpp"
#include "mindroom/tom_pipeline.hpp"
#include "text_util.hpp"

namespace mindroom {

void SeedPools::validate() const {
    if (content_seeds.empty()) throw ValidationError("content seed pool is empty");
    if (personality_seeds.empty()) throw ValidationError("personality seed pool is empty");
}

SeedPools SeedPools::defaults() {
    return {
        {"Digital Integrated Circuit Design", "Comprehensive Practice in Artificial Intelligence"},
        {
            "reflective: takes time to weigh alternatives before answering, slow but careful",
            "impulsive: answers quickly with the first idea that comes to mind, makes more slips",
            "field-dependent: relies on examples, context and social cues from classmates",
            "field-independent: prefers abstract structure and works problems out alone",
        },
    };
}

SeedPools SeedPools::parse(std::string_view text) {
    try {
        const auto j = nlohmann::json::parse(text);
        SeedPools pools{j.at("content_seeds").get<std::vector<std::string>>(),
                        j.at("personality_seeds").get<std::vector<std::string>>()};
        pools.validate();
        return pools;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed seed pool file: ") + e.what());
    }
}

SeedPools SeedPools::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open seed pool file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string SeedPools::dump() const {
    nlohmann::ordered_json j;
    j["content_seeds"] = content_seeds;
    j["personality_seeds"] = personality_seeds;
    return j.dump(2) + "\n";
}

void EvalConfig::validate() const {
    if (initial_emotion < 0 || initial_emotion > 100 || initial_emotion % 5 != 0) {
        throw ValidationError("initial emotion must be a multiple of 5 within [0, 100]");
    }
    if (termination_threshold < 0 || termination_threshold > 100) {
        throw ValidationError("termination threshold must lie within [0, 100]");
    }
    if (max_emotion_step < 5 || max_emotion_step % 5 != 0) {
        throw ValidationError("max emotion step must be a positive multiple of 5");
    }
}

int normalize_emotion_delta(double reported, int max_step) {
    const double snapped = std::round(reported / 5.0) * 5.0;
    return static_cast<int>(std::clamp(snapped, static_cast<double>(-max_step), static_cast<double>(max_step)));
}

int apply_emotion_delta(int score, int delta) { return std::clamp(score + delta, 0, 100); }

std::string render_state(const StudentState& s) {
    return "Belief: " + s.belief + "\nDesire: " + s.desire + "\nIntention: " + s.intention +
           "\nEmotion: " + s.emotion_text + "\nThought: " + s.thought;
}

EvaluationAgent::EvaluationAgent(llm::ChatBackend& backend, EvalConfig config, const PromptCatalog& prompts)
    : backend_(backend), config_(config), prompts_(prompts) {
    config_.validate();
}

PromptVars EvaluationAgent::persona_vars(const StudentPersona& p) const {
    return {{"student_id", p.student_id},     {"content", p.learning_content}, {"personality", p.personality},
            {"background", p.background},     {"challenges", p.challenges},    {"goals", p.goals_expectations}};
}

std::pair<StudentPersona, StudentState> EvaluationAgent::build_persona(const SeedPools& pools, Rng& rng,
                                                                       const std::string& student_id) const {
    pools.validate();
    StudentPersona persona;
    persona.student_id = student_id;
    persona.learning_content = pools.content_seeds[uniform_index(rng, pools.content_seeds.size())];
    persona.personality = pools.personality_seeds[uniform_index(rng, pools.personality_seeds.size())];

    auto request = prompts_.request(schema::kStudentPersona,
                                    {{"student_id", student_id},
                                     {"content", persona.learning_content},
                                     {"personality", persona.personality}},
                                    config_.temperature);
    request.meta = {{"student_id", student_id}, {"content", persona.learning_content},
                    {"personality", persona.personality}};
    auto complete = [](const llm::Fields& f) { return f.find("background") && f.find("challenges") && f.find("goals"); };
    auto reply = backend_.complete(request);
    if (!complete(reply.parsed)) {
        reply = backend_.complete(with_reask(request, reply.raw_text, "expected background, challenges and goals lines"));
        if (!complete(reply.parsed)) throw MalformedOutput("student persona reply lacks background/challenges/goals");
    }
    persona.background = *reply.parsed.find("background");
    persona.challenges = *reply.parsed.find("challenges");
    persona.goals_expectations = *reply.parsed.find("goals");

    StudentState state;
    state.belief = "I only partly understand " + persona.learning_content + ".";
    state.desire = persona.goals_expectations;
    state.intention = "Ask about the part that confuses me.";
    state.emotion_text = "neutral and a little curious";
    state.thought = persona.challenges;
    state.emotion_score = config_.initial_emotion;
    state.cognitive_level = 1;
    state.terminated = false;
    return {std::move(persona), std::move(state)};
}

std::string EvaluationAgent::student_turn(const StudentState& state, const StudentPersona& persona,
                                          const std::vector<ContextEntry>& dialogue, int round, int turns) const {
    if (state.terminated) throw PreconditionViolation("student_turn called on a terminated session");
    auto vars = persona_vars(persona);
    vars["state"] = render_state(state) + "\nEmotional score: " + std::to_string(state.emotion_score);
    vars["dialogue"] = render_dialogue(dialogue);
    vars["round"] = std::to_string(round);
    vars["turns"] = std::to_string(turns);
    auto request = prompts_.request(schema::kStudentUtterance, vars, config_.temperature);
    request.meta = {{"student_id", persona.student_id}, {"round", vars["round"]},
                    {"personality", persona.personality}, {"content", persona.learning_content},
                    {"emotion", std::to_string(state.emotion_score)}};
    auto extract = [](const llm::ChatResponse& r) {
        const std::string* tagged = r.parsed.find("utterance");
        auto u = std::string(text::trim(tagged ? *tagged : r.raw_text));
        if (u.size() >= 2 && u.front() == '"' && u.back() == '"') u = u.substr(1, u.size() - 2);
        return u;
    };
    auto reply = backend_.complete(request);
    auto utterance = extract(reply);
    if (utterance.empty()) {
        reply = backend_.complete(with_reask(request, reply.raw_text, "expected 'utterance: <what you say>'"));
        utterance = extract(reply);
    }
    if (utterance.empty()) throw MalformedOutput("simulated student produced an empty utterance");
    return utterance;
}

StudentState EvaluationAgent::update_state(const StudentState& state, const StudentPersona& persona,
                                           const std::string& utterance,
                                           const std::vector<std::string>& companion_responses) const {
    if (state.terminated) throw PreconditionViolation("update_state called on a terminated session");
    auto vars = persona_vars(persona);
    vars["state"] = render_state(state);
    vars["emotion"] = std::to_string(state.emotion_score);
    vars["utterance"] = utterance;
    vars["responses"] = companion_responses.empty()
                            ? std::string("(nobody answered)")
                            : text::join(companion_responses, "\n", [](const std::string& r) { return "- " + r; });
    auto request = prompts_.request(schema::kStudentUpdate, vars, config_.scoring_temperature);
    request.meta = {{"student_id", persona.student_id}, {"emotion", vars["emotion"]}, {"utterance", utterance},
                    {"responses", vars["responses"]}, {"personality", persona.personality}};

    auto delta_of = [&](const llm::Fields& f) -> std::optional<int> {
        if (const std::string* d = f.find("delta")) {
            if (auto n = text::first_number(*d)) return normalize_emotion_delta(*n, config_.max_emotion_step);
        }
        if (const std::string* v = f.find("verdict")) {
            const auto verdict = text::lower(*v);
            if (verdict.find("misaligned") != std::string::npos || verdict.find("not aligned") != std::string::npos) return -5;
            if (verdict.find("partial") != std::string::npos) return 0;
            if (verdict.find("aligned") != std::string::npos) return 5;
        }
        return std::nullopt;
    };
    try {
        auto reply = backend_.complete(request);
        auto delta = delta_of(reply.parsed);
        if (!delta) {
            reply = backend_.complete(with_reask(request, reply.raw_text, "expected the state lines and 'delta: <change>'"));
            delta = delta_of(reply.parsed);
        }
        if (!delta) throw MalformedOutput("state update reply has no emotion change");

        StudentState next = state;
        auto take = [&](const char* key, std::string& field) {
            if (const std::string* v = reply.parsed.find(key); v && !text::trim(*v).empty()) field = *v;
        };
        take("belief", next.belief);
        take("desire", next.desire);
        take("intention", next.intention);
        take("emotion", next.emotion_text);
        take("thought", next.thought);
        next.last_verdict = reply.parsed.find("verdict") ? *reply.parsed.find("verdict") : std::string{};
        next.emotion_score = apply_emotion_delta(state.emotion_score, *delta);
        next.terminated = next.emotion_score < config_.termination_threshold;
        return next;
    } catch (const MalformedOutput& e) {
        spdlog::warn("student state update unusable ({}); state unchanged", e.what());
        return state;
    }
}

int EvaluationAgent::assess_cognition(const std::string& utterance) const {
    if (text::trim(utterance).empty()) throw PreconditionViolation("utterance must not be empty");
    auto request = prompts_.request(schema::kStudentCognition, {{"utterance", utterance}}, config_.scoring_temperature);
    request.meta = {{"utterance", utterance}};
    auto reply = backend_.complete(request);
    auto parsed = parse_bloom_reply(reply.raw_text);
    if (!parsed.level) {
        reply = backend_.complete(with_reask(request, reply.raw_text, bloom_reask_problem(parsed)));
        parsed = resolve_bloom_retry(parsed, parse_bloom_reply(reply.raw_text));
    }
    if (!parsed.level) {
        spdlog::warn("cognition judge gave no Bloom tier; using level 1");
        return kMinBloomLevel;
    }
    return *parsed.level;
}

}  // namespace mindroom
