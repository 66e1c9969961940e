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

#include "mindroom/tom_pipeline.hpp"

#include <algorithm>
#include <cstdio>

#include <spdlog/spdlog.h>

#include "mindroom/errors.hpp"
#include "text_util.hpp"

namespace mindroom {
namespace {

constexpr std::string_view kBloomNames[] = {"Remember", "Understand", "Apply", "Analyze", "Evaluate", "Create"};

std::string format_score(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

// "hypothesis" or "hypothesis 3"
bool is_hypothesis_key(std::string_view key) {
    if (!key.starts_with("hypothesis")) return false;
    key.remove_prefix(10);
    key = text::trim(key);
    return std::all_of(key.begin(), key.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::vector<std::string> parse_hypotheses(const std::string& raw, int k) {
    std::vector<std::string> out;
    const auto fields = llm::Fields::parse(raw);
    for (const auto& [key, value] : fields.items()) {
        if (!is_hypothesis_key(key)) continue;
        auto v = std::string(text::trim(value));
        if (!v.empty()) out.push_back(std::move(v));
        if (static_cast<int>(out.size()) == k) break;
    }
    return out;
}

// Values of "<prefix> <n>" keys, by n (1-based); missing entries stay nullopt.
std::vector<std::optional<std::string>> indexed_fields(const std::string& raw, std::string_view prefix, std::size_t count) {
    std::vector<std::optional<std::string>> out(count);
    const auto fields = llm::Fields::parse(raw);
    for (const auto& [key, value] : fields.items()) {
        if (!key.starts_with(prefix)) continue;
        const auto n = text::first_number(std::string_view(key).substr(prefix.size()));
        if (!n || *n < 1 || *n > static_cast<double>(count)) continue;
        const auto idx = static_cast<std::size_t>(*n) - 1;
        if (!out[idx]) out[idx] = std::string(text::trim(value));
    }
    return out;
}

PromptVars persona_vars(const Persona& p) {
    return {{"name", p.display_name},
            {"agent", p.agent_id},
            {"role_kind", std::string(to_string(p.role_kind))},
            {"role", p.description}};
}

}  // namespace

std::string_view to_string(TomLabel label) {
    switch (label) {
        case TomLabel::Belief: return "Belief";
        case TomLabel::Desire: return "Desire";
        case TomLabel::Intention: return "Intention";
        case TomLabel::Emotion: return "Emotion";
        case TomLabel::Thought: return "Thought";
    }
    return "Thought";
}

std::optional<TomLabel> parse_tom_label(std::string_view text) {
    const auto key = text::lower(text::trim(text));
    for (auto label : kAllTomLabels) {
        if (text::lower(to_string(label)) == key) return label;
    }
    return std::nullopt;
}

std::string_view bloom_name(int level) {
    if (level < kMinBloomLevel || level > kMaxBloomLevel) throw ValidationError("Bloom level out of range");
    return kBloomNames[level - 1];
}

std::optional<int> parse_bloom_name(std::string_view text) {
    const auto key = text::lower(text::trim(text));
    for (int i = 0; i < kMaxBloomLevel; ++i) {
        if (text::lower(kBloomNames[i]) == key) return i + 1;
    }
    return std::nullopt;
}

BloomReply parse_bloom_reply(const std::string& raw) {
    BloomReply p;
    const auto fields = llm::Fields::parse(raw);
    const std::string* value = fields.find("level");
    const std::string v = value ? *value : raw;
    if (const std::string* r = fields.find("rationale")) p.rationale = *r;
    if (auto named = parse_bloom_name(v)) {
        p.level = named;
        return p;
    }
    for (int lvl = kMinBloomLevel; lvl <= kMaxBloomLevel; ++lvl) {
        if (text::contains_ci(v, bloom_name(lvl))) {
            p.level = lvl;
            return p;
        }
    }
    if (auto n = text::first_number(v)) {
        const auto lvl = static_cast<int>(*n);
        if (lvl >= kMinBloomLevel && lvl <= kMaxBloomLevel && lvl == *n) {
            p.level = lvl;
        } else {
            p.out_of_range = *n;
        }
    }
    return p;
}

std::string bloom_reask_problem(const BloomReply& reply) {
    return reply.out_of_range ? "the level must be one of the six Bloom tiers (1-6)" : "expected 'level: <Bloom tier>'";
}

BloomReply resolve_bloom_retry(const BloomReply& first, const BloomReply& second) {
    if (second.level) return second;
    const auto& source = second.out_of_range ? second : first;
    if (!source.out_of_range) return second;
    BloomReply out = source;
    out.level = *source.out_of_range < kMinBloomLevel ? kMinBloomLevel : kMaxBloomLevel;
    spdlog::warn("cognitive level {} outside [1, 6]; clamped to {}", *source.out_of_range, *out.level);
    return out;
}

std::string_view to_string(ConstraintKind kind) {
    switch (kind) {
        case ConstraintKind::PersonaConsistency: return "PersonaConsistency";
        case ConstraintKind::ClassroomNorm: return "ClassroomNorm";
        case ConstraintKind::TopicRelevance: return "TopicRelevance";
        case ConstraintKind::Custom: return "Custom";
    }
    return "Custom";
}

std::optional<ConstraintKind> parse_constraint_kind(std::string_view text) {
    for (auto k : {ConstraintKind::PersonaConsistency, ConstraintKind::ClassroomNorm, ConstraintKind::TopicRelevance,
                   ConstraintKind::Custom}) {
        if (to_string(k) == text) return k;
    }
    return std::nullopt;
}

std::vector<ConstraintRule> default_constraint_rules() {
    return {
        {ConstraintKind::PersonaConsistency,
         "Interpret the student the way your persona would; a teacher reads intentions as teaching "
         "opportunities, a classmate reads them as a peer would."},
        {ConstraintKind::TopicRelevance,
         "Keep the interpretation tied to the course topic under discussion; off-topic wishes are reframed "
         "as application scenarios or light remarks."},
        {ConstraintKind::ClassroomNorm,
         "Never step out of character or talk about being an AI, a model or a simulation."},
    };
}

void PipelineConfig::validate() const {
    if (k < 1) throw ValidationError("pipeline k must be >= 1");
    if (!(utility_threshold >= 0.0 && utility_threshold <= 1.0)) {
        throw ValidationError("utility_threshold must lie in [0, 1]");
    }
    if (max_retries < 0) throw ValidationError("max_retries must be >= 0");
    for (const auto& r : constraint_rules) {
        if (r.text.empty()) throw ValidationError("constraint rule text must not be empty");
    }
}

std::string render_memory(const std::vector<MemoryRecord>& memory) {
    if (memory.empty()) return "(no memory yet)";
    return text::join(memory, "\n", [](const MemoryRecord& m) { return "- " + memory_text(m); });
}

std::string hypothesis_summary(const RefinedHypothesis& h) {
    return std::string(to_string(h.label)) + ": " + h.revised_text;
}

TomPipeline::TomPipeline(llm::ChatBackend& backend, PipelineConfig config, const PromptCatalog& prompts)
    : backend_(backend), config_(std::move(config)), prompts_(prompts) {
    config_.validate();
}

std::vector<std::string> TomPipeline::propose_initial(const std::string& utterance,
                                                      const std::vector<ContextEntry>& context) const {
    if (text::trim(utterance).empty()) throw PreconditionViolation("utterance must not be empty");
    const auto k = std::to_string(config_.k);
    auto request = prompts_.request(schema::kHypotheses,
                                    {{"utterance", utterance}, {"context", render_dialogue(context)}, {"k", k}},
                                    config_.roleplay_temperature);
    request.meta = {{"utterance", utterance}, {"k", k}};
    auto reply = backend_.complete(request);
    auto hypotheses = parse_hypotheses(reply.raw_text, config_.k);
    if (hypotheses.empty()) {
        reply = backend_.complete(with_reask(request, reply.raw_text, "expected lines of the form 'hypothesis: ...'"));
        hypotheses = parse_hypotheses(reply.raw_text, config_.k);
    }
    if (hypotheses.empty()) throw MalformedOutput("hypothesis generation returned no hypotheses");
    return hypotheses;
}

std::vector<std::string> TomPipeline::filter_by_memory(const std::vector<std::string>& raw,
                                                       const std::vector<MemoryRecord>& memory) const {
    if (raw.empty()) throw PreconditionViolation("filter_by_memory needs at least one hypothesis");
    if (memory.empty()) return raw;
    const auto items = text::numbered(raw);
    const auto count = std::to_string(raw.size());
    auto request = prompts_.request(
        schema::kMemoryFilter, {{"memory", render_memory(memory)}, {"count", count}, {"hypotheses", items}},
        config_.scoring_temperature);
    request.meta = {{"count", count}, {"items", items}, {"memory", render_memory(memory)}};
    auto verdicts_of = [&](const std::string& text) { return indexed_fields(text, "verdict", raw.size()); };
    auto any_verdict = [](const auto& v) { return std::any_of(v.begin(), v.end(), [](const auto& x) { return x.has_value(); }); };
    try {
        auto reply = backend_.complete(request);
        auto verdicts = verdicts_of(reply.raw_text);
        if (!any_verdict(verdicts)) {
            reply = backend_.complete(with_reask(request, reply.raw_text, "expected 'verdict <number>: keep|drop' lines"));
            verdicts = verdicts_of(reply.raw_text);
        }
        if (!any_verdict(verdicts)) {
            spdlog::warn("memory filter gave no verdicts; keeping all hypotheses");
            return raw;
        }
        std::vector<std::string> kept;
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (verdicts[i] && text::contains_ci(*verdicts[i], "drop")) continue;
            kept.push_back(raw[i]);
        }
        if (kept.empty()) {
            spdlog::info("memory filter rejected every hypothesis; retaining the first-ranked one");
            kept.push_back(raw.front());
        }
        return kept;
    } catch (const BackendError& e) {
        spdlog::warn("memory filter failed ({}); keeping all hypotheses", e.what());
        return raw;
    }
}

std::vector<ToMHypothesis> TomPipeline::label_hypotheses(const std::vector<std::string>& filtered) const {
    if (filtered.empty()) throw PreconditionViolation("label_hypotheses needs at least one hypothesis");
    const auto items = text::numbered(filtered);
    const auto count = std::to_string(filtered.size());
    auto request = prompts_.request(schema::kTomLabels, {{"count", count}, {"hypotheses", items}},
                                    config_.scoring_temperature);
    request.meta = {{"count", count}, {"items", items}};

    auto labels_of = [&](const std::string& text) {
        std::vector<std::optional<TomLabel>> out;
        for (const auto& v : indexed_fields(text, "label", filtered.size())) {
            out.push_back(v ? parse_tom_label(*v) : std::nullopt);
        }
        return out;
    };
    auto reply = backend_.complete(request);
    auto labels = labels_of(reply.raw_text);
    if (std::any_of(labels.begin(), labels.end(), [](const auto& l) { return !l; })) {
        reply = backend_.complete(with_reask(request, reply.raw_text,
                                             "every label must be one of Belief, Desire, Intention, Emotion, Thought"));
        const auto second = labels_of(reply.raw_text);
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (!labels[i]) labels[i] = second[i];
        }
    }
    std::vector<ToMHypothesis> out;
    for (std::size_t i = 0; i < filtered.size(); ++i) {
        if (!labels[i]) spdlog::warn("hypothesis {} has no valid ToM label; using Thought", i + 1);
        out.push_back({static_cast<int>(i) + 1, filtered[i], labels[i].value_or(TomLabel::Thought)});
    }
    return out;
}

CognitiveAssessment TomPipeline::infer_cognitive_level(const std::string& utterance) const {
    if (text::trim(utterance).empty()) throw PreconditionViolation("utterance must not be empty");
    auto request = prompts_.request(schema::kCognitiveLevel, {{"utterance", utterance}}, config_.scoring_temperature);
    request.meta = {{"utterance", utterance}};

    auto reply = backend_.complete(request);
    auto parsed = parse_bloom_reply(reply.raw_text);
    if (!parsed.level) {
        reply = backend_.complete(with_reask(request, reply.raw_text, bloom_reask_problem(parsed)));
        parsed = resolve_bloom_retry(parsed, parse_bloom_reply(reply.raw_text));
        if (!parsed.level) throw MalformedOutput("cognitive level inference returned no Bloom tier");
    }
    return {*parsed.level, std::string(bloom_name(*parsed.level)), parsed.rationale};
}

double TomPipeline::score_unit(llm::ChatRequest request, std::string_view field) const {
    auto extract = [&](const std::string& raw) -> std::optional<double> {
        const auto fields = llm::Fields::parse(raw);
        const std::string* value = fields.find(field);
        return text::first_number(value ? *value : raw);
    };
    auto reply = backend_.complete(request);
    auto value = extract(reply.raw_text);
    if (!value) {
        reply = backend_.complete(with_reask(request, reply.raw_text,
                                             "expected '" + std::string(field) + ": <number between 0 and 1>'"));
        value = extract(reply.raw_text);
    }
    if (!value) throw MalformedOutput("no " + std::string(field) + " score in reply");
    if (*value < 0.0 || *value > 1.0) {
        spdlog::warn("{} score {} outside [0, 1]; clamped", field, *value);
        return std::clamp(*value, 0.0, 1.0);
    }
    return *value;
}

std::vector<RefinedHypothesis> TomPipeline::refine(const std::vector<ToMHypothesis>& hypotheses, const Persona& role,
                                                   const std::vector<ConstraintRule>& rules,
                                                   const std::vector<ContextEntry>& context,
                                                   const std::vector<MemoryRecord>& memory) const {
    if (hypotheses.empty()) throw PreconditionViolation("refine needs at least one hypothesis");
    const auto rules_text = rules.empty()
                                ? std::string("(none)")
                                : text::join(rules, "\n", [](const ConstraintRule& r) {
                                      return "- [" + std::string(to_string(r.kind)) + "] " + r.text;
                                  });
    const auto ctx = render_dialogue(context);
    const auto mem = render_memory(memory);
    const auto role_kind = std::string(to_string(role.role_kind));

    std::vector<RefinedHypothesis> out;
    out.reserve(hypotheses.size());
    // Revise every candidate first, then score each one independently.
    for (const auto& h : hypotheses) {
        auto vars = persona_vars(role);
        vars["rules"] = rules_text;
        vars["context"] = ctx;
        vars["label"] = std::string(to_string(h.label));
        vars["hypothesis"] = h.explanation;
        auto request = prompts_.request(schema::kRefine, vars, config_.roleplay_temperature);
        request.meta = {{"agent", role.agent_id}, {"role_kind", role_kind}, {"hypothesis", h.explanation},
                        {"label", vars["label"]}};
        auto reply = backend_.complete(request);
        const std::string* revised = reply.parsed.find("revised");
        if (!revised || text::trim(*revised).empty()) {
            reply = backend_.complete(with_reask(request, reply.raw_text, "expected 'revised: <text>'"));
            revised = reply.parsed.find("revised");
        }
        std::string text_out = revised && !text::trim(*revised).empty() ? std::string(text::trim(*revised)) : h.explanation;
        if (!revised) spdlog::warn("no revision for hypothesis {}; keeping the original wording", h.index);
        out.push_back({h.index, std::move(text_out), 0.0, h.label});
    }
    for (auto& r : out) {
        auto vars = persona_vars(role);
        vars["context"] = ctx;
        vars["memory"] = mem;
        vars["revised"] = r.revised_text;
        auto request = prompts_.request(schema::kPlausibility, vars, config_.scoring_temperature);
        request.meta = {{"agent", role.agent_id}, {"role_kind", role_kind}, {"revised", r.revised_text}};
        try {
            r.plausibility = score_unit(std::move(request), "plausibility");
        } catch (const MalformedOutput& e) {
            spdlog::warn("plausibility for hypothesis {} unusable ({}); scoring 0", r.source_index, e.what());
            r.plausibility = 0.0;
        }
    }
    return out;
}

const RefinedHypothesis& TomPipeline::select_best(const std::vector<RefinedHypothesis>& refined) {
    if (refined.empty()) throw PreconditionViolation("select_best needs at least one candidate");
    const RefinedHypothesis* best = &refined.front();
    for (const auto& r : refined) {
        if (r.plausibility > best->plausibility ||
            (r.plausibility == best->plausibility && r.source_index < best->source_index)) {
            best = &r;
        }
    }
    return *best;
}

GenerationResult TomPipeline::generate_and_validate(const RefinedHypothesis& selected,
                                                    const std::vector<MemoryRecord>& memory, const Persona& role,
                                                    const ActionKind& action, const GenerationInput& input) const {
    const auto level = std::to_string(input.assessment.level) + " (" + input.assessment.level_name + ")";
    const auto summary = hypothesis_summary(selected);
    const auto role_kind = std::string(to_string(role.role_kind));
    const auto action_name = std::string(to_string(action.name));
    const auto target = action.refers_to ? " directed at " + *action.refers_to : std::string{};

    GenerationResult result;
    const int attempts = config_.max_retries + 1;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        auto vars = persona_vars(role);
        vars["context"] = render_dialogue(input.context);
        vars["utterance"] = input.utterance;
        vars["memory"] = render_memory(memory);
        vars["hypothesis"] = summary;
        vars["level"] = level;
        vars["action"] = action_name;
        vars["target"] = target;
        vars["feedback"] = attempt == 1 ? std::string{}
                                        : "Your previous draft was rated " + format_score(result.drafts.back().utility) +
                                              " for usefulness and was rejected. Write a better one.\n";
        auto request = prompts_.request(schema::kResponse, vars, config_.roleplay_temperature);
        request.meta = {{"agent", role.agent_id}, {"role_kind", role_kind}, {"action", action_name},
                        {"target", action.refers_to.value_or("")}, {"hypothesis", summary},
                        {"level", std::to_string(input.assessment.level)}, {"attempt", std::to_string(attempt)},
                        {"utterance", input.utterance}};
        auto reply = backend_.complete(request);
        std::string text_out(text::trim(reply.raw_text));
        if (const std::string* tagged = reply.parsed.find("response"); tagged && text::lower(text_out).starts_with("response:")) {
            text_out = std::string(text::trim(*tagged));
        }

        auto check = prompts_.request(schema::kUtility,
                                      {{"hypothesis", summary}, {"level", level}, {"role_kind", role_kind},
                                       {"action", action_name}, {"attempt", std::to_string(attempt)}, {"draft", text_out}},
                                      config_.scoring_temperature);
        check.meta = {{"attempt", std::to_string(attempt)}, {"draft", text_out}, {"role_kind", role_kind},
                      {"level", std::to_string(input.assessment.level)}};
        double utility = 0.0;
        try {
            utility = text_out.empty() ? 0.0 : score_unit(std::move(check), "utility");
        } catch (const MalformedOutput& e) {
            spdlog::warn("utility for draft {} unusable ({}); scoring 0", attempt, e.what());
        }
        result.drafts.push_back({std::move(text_out), utility, attempt});
        if (utility >= config_.utility_threshold) {
            result.final_draft = result.drafts.back();
            return result;
        }
    }
    const auto best = std::max_element(result.drafts.begin(), result.drafts.end(),
                                       [](const ResponseDraft& a, const ResponseDraft& b) { return a.utility < b.utility; });
    result.final_draft = *best;
    result.final_draft.attempt = attempts;
    return result;
}

MemoryRecord TomPipeline::update_memory(std::vector<MemoryRecord>& memory, const AgentId& owner,
                                        const RefinedHypothesis& selected, const CognitiveAssessment& assessment,
                                        int turn) {
    if (turn < 1) throw PreconditionViolation("memory turn must be >= 1");
    MemoryRecord record{owner,
                        hypothesis_summary(selected) + " (cognitive level: " + assessment.level_name + ")", turn};
    memory.push_back(record);
    return record;
}

PipelineTrace TomPipeline::run(const TurnInput& input, const ActionChooser& choose_action) const {
    PipelineTrace trace;
    trace.proposed = propose_initial(input.utterance, input.context);
    trace.filtered = filter_by_memory(trace.proposed, input.memory);
    trace.labeled = label_hypotheses(trace.filtered);
    trace.assessment = infer_cognitive_level(input.utterance);
    trace.refined = refine(trace.labeled, input.role, config_.constraint_rules, input.context, input.memory);
    trace.selected = select_best(trace.refined);
    trace.action = choose_action ? choose_action(hypothesis_summary(trace.selected))
                                 : ActionKind{input.role.allowed_actions.front(), std::nullopt};
    if (trace.action.name == ActionName::RemainSilent) return trace;
    trace.generation = generate_and_validate(trace.selected, input.memory, input.role, trace.action,
                                             {input.utterance, input.context, trace.assessment});
    return trace;
}

}  // namespace mindroom
