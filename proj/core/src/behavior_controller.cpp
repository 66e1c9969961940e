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

#include "mindroom/behavior_controller.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include <spdlog/spdlog.h>

#include "mindroom/errors.hpp"
#include "text_util.hpp"

namespace mindroom {
namespace {

PromptVars persona_vars(const Persona& p) {
    return {{"name", p.display_name},
            {"agent", p.agent_id},
            {"role_kind", std::string(to_string(p.role_kind))},
            {"role", p.description}};
}

}  // namespace

std::optional<int> parse_intention(const std::string& raw) {
    const auto fields = llm::Fields::parse(raw);
    const std::string* value = fields.find("intention");
    const auto number = text::first_number(value ? *value : raw);
    if (!number) return std::nullopt;
    const double rounded = std::floor(*number + 0.5);
    return static_cast<int>(std::clamp(rounded, 0.0, 10.0));
}

AgentId select_speaker(std::span<const IntentionScore> scores, int n, Rng& rng,
                       const std::optional<AgentId>& referral) {
    if (scores.empty()) throw PreconditionViolation("select_speaker needs at least one score");
    if (n < 1) throw PreconditionViolation("top-n must be >= 1");
    if (referral) {
        const bool known = std::any_of(scores.begin(), scores.end(),
                                       [&](const IntentionScore& s) { return s.agent_id == *referral; });
        if (!known) throw UnknownReferral(*referral);
        return *referral;
    }
    std::vector<const IntentionScore*> ranked;
    ranked.reserve(scores.size());
    for (const auto& s : scores) ranked.push_back(&s);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const IntentionScore* a, const IntentionScore* b) { return a->score > b->score; });
    const auto top = std::min<std::size_t>(static_cast<std::size_t>(n), ranked.size());
    return ranked[uniform_index(rng, top)]->agent_id;
}

BehaviorController::BehaviorController(llm::ChatBackend& backend, ControllerConfig config, const PromptCatalog& prompts)
    : backend_(backend), config_(config), prompts_(prompts) {
    if (config_.top_n < 1) throw ValidationError("top_n must be >= 1");
}

IntentionScore BehaviorController::elicit_one(const AgentView& view) const {
    auto vars = persona_vars(view.persona);
    vars["context"] = render_dialogue(view.context);
    auto request = prompts_.request(schema::kIntention, vars, config_.temperature);
    request.meta = {{"agent", view.persona.agent_id}, {"role_kind", std::string(to_string(view.persona.role_kind))}};
    try {
        auto reply = backend_.complete(request);
        auto score = parse_intention(reply.raw_text);
        if (!score) {
            reply = backend_.complete(with_reask(request, reply.raw_text, "no integer intention score"));
            score = parse_intention(reply.raw_text);
        }
        if (!score) {
            spdlog::warn("agent {} gave no usable intention score; using 0", view.persona.agent_id);
            return {view.persona.agent_id, 0};
        }
        if (const auto raw = text::first_number(reply.raw_text); raw && (*raw < 0.0 || *raw > 10.0)) {
            spdlog::warn("agent {} intention {} outside [0, 10]; clamped to {}", view.persona.agent_id, *raw, *score);
        }
        return {view.persona.agent_id, *score};
    } catch (const BackendError& e) {
        spdlog::warn("intention elicitation failed for {}: {}", view.persona.agent_id, e.what());
        return {view.persona.agent_id, 0};
    }
}

std::vector<IntentionScore> BehaviorController::elicit_intentions(const std::vector<AgentView>& agents) const {
    if (agents.empty()) throw PreconditionViolation("elicit_intentions needs at least one agent");
    std::vector<IntentionScore> out;
    out.reserve(agents.size());
    if (!config_.parallel) {
        for (const auto& view : agents) out.push_back(elicit_one(view));
        return out;
    }
    std::vector<std::future<IntentionScore>> pending;
    pending.reserve(agents.size());
    for (const auto& view : agents) {
        pending.push_back(std::async(std::launch::async, [this, &view] { return elicit_one(view); }));
    }
    for (auto& f : pending) out.push_back(f.get());
    return out;
}

ActionKind BehaviorController::choose_action(const Persona& actor, const std::string& hypothesis_summary,
                                             const std::vector<ContextEntry>& context,
                                             const std::vector<AgentId>& peers) const {
    const auto allowed = text::join(actor.allowed_actions, ", ", [](ActionName a) { return std::string(to_string(a)); });
    std::vector<AgentId> others;
    for (const auto& p : peers) {
        if (p != actor.agent_id) others.push_back(p);
    }
    auto vars = persona_vars(actor);
    vars["context"] = render_dialogue(context);
    vars["hypothesis"] = hypothesis_summary;
    vars["allowed_actions"] = allowed;
    vars["peers"] = others.empty() ? "none" : text::join(others, ", ", [](const AgentId& a) { return a; });
    auto request = prompts_.request(schema::kAction, vars, config_.temperature);
    request.meta = {{"agent", actor.agent_id},
                    {"role_kind", std::string(to_string(actor.role_kind))},
                    {"allowed", allowed},
                    {"peers", vars["peers"]}};

    const ActionKind fallback{actor.allowed_actions.front(), std::nullopt};
    auto parse = [&](const std::string& raw) -> std::optional<ActionKind> {
        const auto fields = llm::Fields::parse(raw);
        const std::string* value = fields.find("action");
        const auto name = parse_action_name(text::trim(value ? *value : raw));
        if (!name || !actor.allows(*name)) return std::nullopt;
        ActionKind action{*name, std::nullopt};
        if (const std::string* target = fields.find("refers_to")) {
            const auto id = std::string(text::trim(*target));
            if (!id.empty() && text::lower(id) != "none") {
                if (std::find(others.begin(), others.end(), id) != others.end()) {
                    action.refers_to = id;
                } else {
                    spdlog::warn("{} referred to '{}', which is not a peer; ignoring the referral", actor.agent_id, id);
                }
            }
        }
        return action;
    };

    try {
        auto reply = backend_.complete(request);
        if (auto action = parse(reply.raw_text)) return *action;
        reply = backend_.complete(with_reask(request, reply.raw_text, "the action must be one of: " + allowed));
        if (auto action = parse(reply.raw_text)) return *action;
        spdlog::warn("{} proposed no allowed action; defaulting to {}", actor.agent_id, to_string(fallback.name));
    } catch (const BackendError& e) {
        spdlog::warn("action choice failed for {}: {}; defaulting to {}", actor.agent_id, e.what(), to_string(fallback.name));
    }
    return fallback;
}

}  // namespace mindroom
