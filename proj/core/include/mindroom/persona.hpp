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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace mindroom {

using AgentId = std::string;

enum class RoleKind { Teacher, ActiveStudent, PartialStudent, StrugglingStudent, Custom };

enum class ActionName { Explain, AnswerQuestion, CallRoll, RemainSilent, Speak, AskQuestion, Encourage, Summarize };

inline constexpr ActionName kAllActions[] = {
    ActionName::Explain,  ActionName::AnswerQuestion, ActionName::CallRoll,  ActionName::RemainSilent,
    ActionName::Speak,    ActionName::AskQuestion,    ActionName::Encourage, ActionName::Summarize,
};

std::string_view to_string(RoleKind kind);
std::string_view to_string(ActionName name);
std::optional<RoleKind> parse_role_kind(std::string_view text);
// Accepts the canonical CamelCase names as well as spaced/underscored lower-case variants ("call roll").
std::optional<ActionName> parse_action_name(std::string_view text);

struct ActionKind {
    ActionName name = ActionName::Speak;
    std::optional<AgentId> refers_to;

    bool operator==(const ActionKind&) const = default;
};

struct Persona {
    AgentId agent_id;
    std::string display_name;
    RoleKind role_kind = RoleKind::Custom;
    std::string description;
    std::vector<ActionName> allowed_actions;

    bool allows(ActionName name) const;
    // Throws ValidationError when agent_id is empty or allowed_actions is empty.
    void validate() const;

    bool operator==(const Persona&) const = default;
};

void to_json(nlohmann::json& j, const Persona& p);
void from_json(const nlohmann::json& j, Persona& p);

// The four classroom companions used by default: a teacher with domain expertise, an active and
// knowledgeable student, a student who only joins on familiar topics, and a struggling student.
std::vector<Persona> default_personas();

/// Persona catalog file: a JSON object `{"personas": [...]}` where each persona has
/// `agent_id`, `display_name`, `role_kind`, `description` and `allowed_actions`.
/// Agent ids must be unique within the catalog.
std::vector<Persona> load_persona_catalog(const std::filesystem::path& path);
std::vector<Persona> parse_persona_catalog(std::string_view text);
std::string dump_persona_catalog(const std::vector<Persona>& personas);

// Draws `count` personas cyclically from `catalog`. Repeated entries get a numeric suffix on
// agent_id and display_name so ids stay unique ("teacher", "teacher-2", ...).
std::vector<Persona> cycle_personas(const std::vector<Persona>& catalog, std::size_t count);

}  // namespace mindroom
