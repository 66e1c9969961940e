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
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "mindroom/llm/chat.hpp"
#include "mindroom/llm/live.hpp"
#include "mindroom/llm/synthetic.hpp"
#include "mindroom/orchestrator.hpp"

namespace mindroom {

enum class BackendKind { Cassette, Live, Synthetic };

std::string_view to_string(BackendKind kind);
std::optional<BackendKind> parse_backend_kind(std::string_view text);

struct BackendConfig {
    BackendKind kind = BackendKind::Synthetic;
    std::filesystem::path cassette;  // replay source (Cassette) or optional record target
    bool lenient = false;
    llm::SyntheticProfile profile = llm::SyntheticProfile::Default;
    llm::LiveConfig live;
};

/// Everything a batch run needs. Read from JSON; omitted keys keep their defaults.
///
///   { "sessions": 20, "turns": 5, "seed": 7, "jobs": 1, "top_n": 3,
///     "personas": "personas.json" | [ ... ], "seed_pools": "seed_pools.json" | { ... },
///     "pipeline": { "k", "utility_threshold", "max_retries", "roleplay_temperature",
///                   "scoring_temperature", "constraints": [{"kind", "text"}] },
///     "evaluation": { "initial_emotion", "termination_threshold", "max_emotion_step",
///                     "temperature", "scoring_temperature" },
///     "backend": { "kind": "cassette|live|synthetic", "cassette", "lenient", "profile",
///                  "base_url", "model", "api_key_env", "timeout_ms", "max_retries",
///                  "backoff_ms", "max_in_flight" } }
///
/// Relative file paths resolve against the directory of the config file.
struct RunConfig {
    int sessions = 20;
    int jobs = 1;
    SessionConfig session;  // turns, seed, top_n, personas, pools, pipeline, evaluation
    BackendConfig backend;

    void validate() const;
};

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json run_config_to_json(const RunConfig& config);

// Builds the configured backend. With a non-empty `record_to`, replies are also written to that cassette.
std::shared_ptr<llm::ChatBackend> make_backend(const BackendConfig& config,
                                               const std::filesystem::path& record_to = {});

}  // namespace mindroom
