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

#include "mindroom/run_config.hpp"

#include <fstream>
#include <sstream>

#include "mindroom/errors.hpp"
#include "mindroom/llm/cassette.hpp"

namespace mindroom {
namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base.empty() ? base / path : path;
}

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end() && !it->is_null()) out = it->get<T>();
}

}  // namespace

std::string_view to_string(BackendKind kind) {
    switch (kind) {
        case BackendKind::Cassette: return "cassette";
        case BackendKind::Live: return "live";
        case BackendKind::Synthetic: return "synthetic";
    }
    return "synthetic";
}

std::optional<BackendKind> parse_backend_kind(std::string_view text) {
    for (auto k : {BackendKind::Cassette, BackendKind::Live, BackendKind::Synthetic}) {
        if (text == to_string(k)) return k;
    }
    return std::nullopt;
}

void RunConfig::validate() const {
    if (sessions < 1) throw ValidationError("sessions must be >= 1");
    if (jobs < 1) throw ValidationError("jobs must be >= 1");
    session.validate();
    if (backend.kind == BackendKind::Cassette && backend.cassette.empty()) {
        throw ValidationError("cassette backend needs a cassette path");
    }
    if (backend.kind == BackendKind::Live) {
        if (backend.live.max_retries < 0) throw ValidationError("backend.max_retries must be >= 0");
        if (backend.live.max_in_flight < 1 || backend.live.max_in_flight > 256) {
            throw ValidationError("backend.max_in_flight must be in [1, 256]");
        }
    }
}

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
    RunConfig c;
    try {
        const auto j = nlohmann::json::parse(text);
        if (!j.is_object()) throw ValidationError("run config must be a JSON object");
        read_opt(j, "sessions", c.sessions);
        read_opt(j, "jobs", c.jobs);
        read_opt(j, "turns", c.session.turns);
        read_opt(j, "seed", c.session.seed);
        read_opt(j, "top_n", c.session.top_n);
        if (auto it = j.find("personas"); it != j.end()) {
            c.session.agent_personas = it->is_string() ? load_persona_catalog(resolve(base_dir, it->get<std::string>()))
                                                       : parse_persona_catalog(nlohmann::json{{"personas", *it}}.dump());
        }
        if (auto it = j.find("agents"); it != j.end()) {
            c.session.agent_personas = cycle_personas(c.session.agent_personas, it->get<std::size_t>());
        }
        if (auto it = j.find("seed_pools"); it != j.end()) {
            c.session.seed_pools = it->is_string() ? SeedPools::load(resolve(base_dir, it->get<std::string>()))
                                                   : SeedPools::parse(it->dump());
        }
        if (auto it = j.find("pipeline"); it != j.end()) {
            auto& p = c.session.pipeline;
            read_opt(*it, "k", p.k);
            read_opt(*it, "utility_threshold", p.utility_threshold);
            read_opt(*it, "max_retries", p.max_retries);
            read_opt(*it, "roleplay_temperature", p.roleplay_temperature);
            read_opt(*it, "scoring_temperature", p.scoring_temperature);
            if (auto rules = it->find("constraints"); rules != it->end()) {
                p.constraint_rules.clear();
                for (const auto& r : *rules) {
                    const auto kind_text = r.value("kind", std::string("Custom"));
                    const auto kind = parse_constraint_kind(kind_text);
                    if (!kind) throw ValidationError("unknown constraint kind: " + kind_text);
                    p.constraint_rules.push_back({*kind, r.at("text").get<std::string>()});
                }
            }
        }
        if (auto it = j.find("evaluation"); it != j.end()) {
            auto& e = c.session.eval;
            read_opt(*it, "initial_emotion", e.initial_emotion);
            read_opt(*it, "termination_threshold", e.termination_threshold);
            read_opt(*it, "max_emotion_step", e.max_emotion_step);
            read_opt(*it, "temperature", e.temperature);
            read_opt(*it, "scoring_temperature", e.scoring_temperature);
        }
        if (auto it = j.find("backend"); it != j.end()) {
            auto& b = c.backend;
            if (auto k = it->find("kind"); k != it->end()) {
                const auto parsed = parse_backend_kind(k->get<std::string>());
                if (!parsed) throw ValidationError("unknown backend kind: " + k->get<std::string>());
                b.kind = *parsed;
            }
            if (auto p = it->find("cassette"); p != it->end()) b.cassette = resolve(base_dir, p->get<std::string>());
            read_opt(*it, "lenient", b.lenient);
            if (auto p = it->find("profile"); p != it->end()) {
                const auto parsed = llm::parse_synthetic_profile(p->get<std::string>());
                if (!parsed) throw ValidationError("unknown synthetic profile: " + p->get<std::string>());
                b.profile = *parsed;
            }
            read_opt(*it, "base_url", b.live.base_url);
            read_opt(*it, "model", b.live.model);
            read_opt(*it, "api_key_env", b.live.api_key_env);
            read_opt(*it, "max_retries", b.live.max_retries);
            read_opt(*it, "max_in_flight", b.live.max_in_flight);
            if (auto t = it->find("timeout_ms"); t != it->end()) b.live.timeout = std::chrono::milliseconds(t->get<int>());
            if (auto t = it->find("backoff_ms"); t != it->end()) b.live.initial_backoff = std::chrono::milliseconds(t->get<int>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed run config: ") + e.what());
    }
    c.validate();
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str(), path.parent_path());
}

nlohmann::json run_config_to_json(const RunConfig& c) {
    const auto& s = c.session;
    nlohmann::json constraints = nlohmann::json::array();
    for (const auto& r : s.pipeline.constraint_rules) {
        constraints.push_back({{"kind", std::string(to_string(r.kind))}, {"text", r.text}});
    }
    return {
        {"sessions", c.sessions},
        {"jobs", c.jobs},
        {"turns", s.turns},
        {"seed", s.seed},
        {"top_n", s.top_n},
        {"personas", s.agent_personas},
        {"seed_pools", {{"content_seeds", s.seed_pools.content_seeds}, {"personality_seeds", s.seed_pools.personality_seeds}}},
        {"pipeline",
         {{"k", s.pipeline.k},
          {"utility_threshold", s.pipeline.utility_threshold},
          {"max_retries", s.pipeline.max_retries},
          {"roleplay_temperature", s.pipeline.roleplay_temperature},
          {"scoring_temperature", s.pipeline.scoring_temperature},
          {"constraints", constraints}}},
        {"evaluation",
         {{"initial_emotion", s.eval.initial_emotion},
          {"termination_threshold", s.eval.termination_threshold},
          {"max_emotion_step", s.eval.max_emotion_step},
          {"temperature", s.eval.temperature},
          {"scoring_temperature", s.eval.scoring_temperature}}},
        {"backend",
         {{"kind", std::string(to_string(c.backend.kind))},
          {"cassette", c.backend.cassette.string()},
          {"lenient", c.backend.lenient},
          {"profile", std::string(llm::to_string(c.backend.profile))},
          {"base_url", c.backend.live.base_url},
          {"model", c.backend.live.model},
          {"api_key_env", c.backend.live.api_key_env},
          {"timeout_ms", c.backend.live.timeout.count()},
          {"max_retries", c.backend.live.max_retries},
          {"backoff_ms", c.backend.live.initial_backoff.count()},
          {"max_in_flight", c.backend.live.max_in_flight}}},
    };
}

std::shared_ptr<llm::ChatBackend> make_backend(const BackendConfig& config, const std::filesystem::path& record_to) {
    std::shared_ptr<llm::ChatBackend> backend;
    switch (config.kind) {
        case BackendKind::Cassette:
            backend = std::make_shared<llm::ScriptedBackend>(
                llm::Cassette::load(config.cassette), config.lenient ? llm::ReplayMode::Lenient : llm::ReplayMode::Strict);
            break;
        case BackendKind::Live: backend = std::make_shared<llm::LiveBackend>(config.live); break;
        case BackendKind::Synthetic: backend = std::make_shared<llm::SyntheticBackend>(config.profile); break;
    }
    if (!record_to.empty()) backend = std::make_shared<llm::RecordingBackend>(std::move(backend), record_to);
    return backend;
}

}  // namespace mindroom
