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
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mindroom/llm/chat.hpp"

namespace mindroom {

// Schema tags double as prompt template names.
namespace schema {
inline constexpr std::string_view kIntention = "intention";
inline constexpr std::string_view kAction = "action";
inline constexpr std::string_view kHypotheses = "hypotheses";
inline constexpr std::string_view kMemoryFilter = "memory-filter";
inline constexpr std::string_view kTomLabels = "tom-labels";
inline constexpr std::string_view kCognitiveLevel = "cognitive-level";
inline constexpr std::string_view kRefine = "refine";
inline constexpr std::string_view kPlausibility = "plausibility";
inline constexpr std::string_view kResponse = "response";
inline constexpr std::string_view kUtility = "utility";
inline constexpr std::string_view kStudentPersona = "student-persona";
inline constexpr std::string_view kStudentUtterance = "student-utterance";
inline constexpr std::string_view kStudentUpdate = "student-update";
inline constexpr std::string_view kStudentCognition = "student-cognition";
}  // namespace schema

using PromptVars = std::map<std::string, std::string, std::less<>>;

/// Versioned set of prompt templates.
///
/// A template file has a `### system` section followed by a `### user` section. Placeholders
/// are written `{{name}}`; rendering fails if a placeholder has no value. The built-in catalog
/// is compiled from core/prompts/<version>/ so experiments can cite the exact wording.
class PromptCatalog {
public:
    static const PromptCatalog& builtin();
    static PromptCatalog load(const std::filesystem::path& dir, std::string version);

    llm::ChatRequest request(std::string_view name, const PromptVars& vars, double temperature) const;

    std::string_view version() const { return version_; }
    std::vector<std::string> names() const;
    std::vector<std::string> placeholders(std::string_view name) const;

private:
    struct Template {
        std::string system;
        std::string user;
    };
    static Template split(std::string_view name, std::string_view text);
    const Template& get(std::string_view name) const;

    std::string version_;
    std::map<std::string, Template, std::less<>> templates_;
};

// Substitutes every {{name}}; throws ValidationError naming the first missing placeholder.
std::string render_template(std::string_view text, const PromptVars& vars);

// Follow-up message appended when a structured reply cannot be parsed.
llm::ChatRequest with_reask(const llm::ChatRequest& original, const std::string& previous_reply,
                            const std::string& problem);

}  // namespace mindroom
