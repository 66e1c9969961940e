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

#include "mindroom/persona.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mindroom/errors.hpp"

namespace mindroom {
namespace {

std::string normalize(std::string_view text) {
    std::string out;
    for (char c : text) {
        if (c == ' ' || c == '_' || c == '-') continue;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

}  // namespace

std::string_view to_string(RoleKind kind) {
    switch (kind) {
        case RoleKind::Teacher: return "Teacher";
        case RoleKind::ActiveStudent: return "ActiveStudent";
        case RoleKind::PartialStudent: return "PartialStudent";
        case RoleKind::StrugglingStudent: return "StrugglingStudent";
        case RoleKind::Custom: return "Custom";
    }
    return "Custom";
}

std::string_view to_string(ActionName name) {
    switch (name) {
        case ActionName::Explain: return "Explain";
        case ActionName::AnswerQuestion: return "AnswerQuestion";
        case ActionName::CallRoll: return "CallRoll";
        case ActionName::RemainSilent: return "RemainSilent";
        case ActionName::Speak: return "Speak";
        case ActionName::AskQuestion: return "AskQuestion";
        case ActionName::Encourage: return "Encourage";
        case ActionName::Summarize: return "Summarize";
    }
    return "Speak";
}

std::optional<RoleKind> parse_role_kind(std::string_view text) {
    const auto key = normalize(text);
    for (auto kind : {RoleKind::Teacher, RoleKind::ActiveStudent, RoleKind::PartialStudent,
                      RoleKind::StrugglingStudent, RoleKind::Custom}) {
        if (normalize(to_string(kind)) == key) return kind;
    }
    return std::nullopt;
}

std::optional<ActionName> parse_action_name(std::string_view text) {
    auto key = normalize(text);
    // "answer questions", "ask questions"
    if (key.size() > 1 && key.back() == 's' && key.ends_with("questions")) key.pop_back();
    for (auto name : kAllActions) {
        if (normalize(to_string(name)) == key) return name;
    }
    return std::nullopt;
}

bool Persona::allows(ActionName name) const {
    return std::find(allowed_actions.begin(), allowed_actions.end(), name) != allowed_actions.end();
}

void Persona::validate() const {
    if (agent_id.empty()) throw ValidationError("persona agent_id must not be empty");
    if (allowed_actions.empty()) throw ValidationError("persona " + agent_id + " has no allowed actions");
}

void to_json(nlohmann::json& j, const Persona& p) {
    nlohmann::json actions = nlohmann::json::array();
    for (auto a : p.allowed_actions) actions.push_back(std::string(to_string(a)));
    j = nlohmann::json{{"agent_id", p.agent_id},
                       {"display_name", p.display_name},
                       {"role_kind", std::string(to_string(p.role_kind))},
                       {"description", p.description},
                       {"allowed_actions", std::move(actions)}};
}

void from_json(const nlohmann::json& j, Persona& p) {
    p.agent_id = j.at("agent_id").get<std::string>();
    p.display_name = j.value("display_name", p.agent_id);
    const auto kind_text = j.value("role_kind", std::string("Custom"));
    const auto kind = parse_role_kind(kind_text);
    if (!kind) throw ValidationError("unknown role_kind '" + kind_text + "' for persona " + p.agent_id);
    p.role_kind = *kind;
    p.description = j.value("description", std::string{});
    p.allowed_actions.clear();
    for (const auto& a : j.at("allowed_actions")) {
        const auto text = a.get<std::string>();
        const auto name = parse_action_name(text);
        if (!name) throw ValidationError("unknown action '" + text + "' for persona " + p.agent_id);
        p.allowed_actions.push_back(*name);
    }
    p.validate();
}

std::vector<Persona> default_personas() {
    using A = ActionName;
    return {
        {"teacher", "Prof. Lin", RoleKind::Teacher,
         "Course instructor with deep domain expertise. Patient, structured, likes to check understanding "
         "by calling on students and connecting ideas to applications.",
         {A::Explain, A::AnswerQuestion, A::CallRoll, A::Summarize, A::Encourage}},
        {"maya", "Maya", RoleKind::ActiveStudent,
         "Knowledgeable classmate who participates actively, shares worked examples and asks probing "
         "follow-up questions.",
         {A::Speak, A::AnswerQuestion, A::AskQuestion, A::Explain, A::Encourage}},
        {"jonah", "Jonah", RoleKind::PartialStudent,
         "Classmate with partial understanding who only responds when the topic is familiar and stays "
         "quiet otherwise.",
         {A::Speak, A::AnswerQuestion, A::AskQuestion, A::RemainSilent}},
        {"sam", "Sam", RoleKind::StrugglingStudent,
         "Introverted classmate with limited foundational knowledge who faces learning difficulties and "
         "often admits confusion.",
         {A::Speak, A::AskQuestion, A::RemainSilent}},
    };
}

std::vector<Persona> parse_persona_catalog(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("persona catalog is not valid JSON: ") + e.what());
    }
    const auto& list = doc.contains("personas") ? doc.at("personas") : doc;
    if (!list.is_array() || list.empty()) throw ValidationError("persona catalog must list at least one persona");
    std::vector<Persona> out;
    std::set<std::string> seen;
    for (const auto& item : list) {
        Persona p;
        try {
            p = item.get<Persona>();
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(std::string("malformed persona entry: ") + e.what());
        }
        if (!seen.insert(p.agent_id).second) throw ValidationError("duplicate persona agent_id: " + p.agent_id);
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<Persona> load_persona_catalog(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open persona catalog " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_persona_catalog(buf.str());
}

std::string dump_persona_catalog(const std::vector<Persona>& personas) {
    nlohmann::json doc{{"personas", personas}};
    return doc.dump(2) + "\n";
}

std::vector<Persona> cycle_personas(const std::vector<Persona>& catalog, std::size_t count) {
    if (catalog.empty()) throw ValidationError("persona catalog is empty");
    std::vector<Persona> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Persona p = catalog[i % catalog.size()];
        if (const auto round = i / catalog.size(); round > 0) {
            p.agent_id += "-" + std::to_string(round + 1);
            p.display_name += " " + std::to_string(round + 1);
        }
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace mindroom
