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

#include "mindroom/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <set>
#include <thread>

#include <spdlog/spdlog.h>

#include "mindroom/errors.hpp"

namespace mindroom {
namespace {

std::string action_line(const Persona& p, const ActionKind& action) {
    std::string line = p.display_name + " (" + p.agent_id + ") performs " + std::string(to_string(action.name));
    if (action.refers_to) line += " directed at " + *action.refers_to;
    return line;
}

Persona student_persona() {
    return {kStudentId, "Student", RoleKind::Custom, "The learner attending the class.",
            {ActionName::Speak, ActionName::AskQuestion}};
}

}  // namespace

std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::Completed: return "Completed";
        case Termination::EmotionBelowThreshold: return "EmotionBelowThreshold";
        case Termination::BackendFailure: return "BackendFailure";
        case Termination::Ended: return "Ended";
    }
    return "Completed";
}

std::optional<Termination> parse_termination(std::string_view text) {
    for (auto t : {Termination::Completed, Termination::EmotionBelowThreshold, Termination::BackendFailure,
                   Termination::Ended}) {
        if (to_string(t) == text) return t;
    }
    return std::nullopt;
}

void SessionConfig::validate() const {
    if (turns < 1) throw ValidationError("turns must be >= 1 (got " + std::to_string(turns) + ")");
    if (agent_personas.empty()) throw ValidationError("at least one companion persona is required");
    if (top_n < 1) throw ValidationError("top_n must be >= 1 (got " + std::to_string(top_n) + ")");
    std::set<AgentId> ids;
    for (const auto& p : agent_personas) {
        p.validate();
        if (p.agent_id == kStudentId) throw ValidationError("agent id 'student' is reserved for the learner");
        if (!ids.insert(p.agent_id).second) throw ValidationError("duplicate agent id: " + p.agent_id);
    }
    pipeline.validate();
    eval.validate();
    seed_pools.validate();
}

Classroom::Classroom(llm::ChatBackend& backend, const SessionConfig& config)
    : backend_(backend),
      config_(config),
      personas_(config.agent_personas),
      controller_(backend, ControllerConfig{config.top_n, config.pipeline.scoring_temperature, config.parallel_elicitation}),
      pipeline_(backend, config.pipeline),
      rng_(config.seed) {
    config_.validate();
    store_.register_agent(student_persona());
    for (const auto& p : personas_) store_.register_agent(p);
}

std::vector<ContextEntry> Classroom::context_for(const AgentId& agent, std::uint64_t upto) const {
    return store_.visible_for(agent, store_.groups_of(agent), upto);
}

CompanionReply Classroom::run_round(int turn, const std::string& student_utterance) {
    CompanionReply reply;
    store_.append("Student: " + student_utterance, classroom_scope(), std::nullopt, EntryType::Dialogue);
    const auto utterance_ts = store_.now();

    std::vector<AgentView> views;
    views.reserve(personas_.size());
    for (const auto& p : personas_) views.push_back({p, context_for(p.agent_id, utterance_ts)});
    reply.intentions = controller_.elicit_intentions(views);

    std::vector<AgentId> peers;
    for (const auto& p : personas_) peers.push_back(p.agent_id);

    auto candidates = reply.intentions;
    auto referral = std::exchange(referral_, std::nullopt);
    // First pick plus at most one replacement when the pick stays silent.
    for (int pick = 0; pick < 2 && !candidates.empty(); ++pick) {
        const auto speaker = select_speaker(candidates, config_.top_n, rng_, pick == 0 ? referral : std::nullopt);
        const auto persona = *std::find_if(personas_.begin(), personas_.end(),
                                           [&](const Persona& p) { return p.agent_id == speaker; });
        TurnInput input{student_utterance, context_for(speaker, utterance_ts - 1), store_.memory_of(speaker), persona};
        PipelineTrace trace;
        try {
            trace = pipeline_.run(input, [&](const std::string& summary) {
                return controller_.choose_action(persona, summary, context_for(speaker, utterance_ts), peers);
            });
        } catch (const CassetteMiss&) {
            throw;  // replay diverged; the session result would be meaningless
        } catch (const Error& e) {
            spdlog::warn("turn {}: pipeline for {} failed ({}); skipping the turn", turn, speaker, e.what());
            reply.speaker = speaker;
            reply.note = std::string("skipped: ") + e.what();
            return reply;
        }
        store_.append(hypothesis_summary(trace.selected), agent_scope(speaker), std::nullopt, EntryType::Inference);
        std::vector<MemoryRecord> memory = input.memory;
        store_.append_memory(TomPipeline::update_memory(memory, speaker, trace.selected, trace.assessment, turn));
        reply.speaker = speaker;
        reply.action = trace.action;
        reply.trace = trace;
        if (trace.action.name == ActionName::RemainSilent) {
            reply.silent.push_back(speaker);
            candidates.erase(std::remove_if(candidates.begin(), candidates.end(),
                                            [&](const IntentionScore& s) { return s.agent_id == speaker; }),
                             candidates.end());
            continue;
        }
        reply.response = trace.generation.final_draft.text;
        store_.append(action_line(persona, trace.action), classroom_scope(), std::nullopt, EntryType::Action);
        store_.append(persona.display_name + ": " + reply.response, classroom_scope(), std::nullopt, EntryType::Dialogue);
        referral_ = trace.action.refers_to;
        return reply;
    }
    reply.speaker.clear();
    reply.response.clear();
    reply.note = "all selected agents remained silent";
    return reply;
}

SessionTranscript run_session(const SessionConfig& config, llm::ChatBackend& backend, const TurnObserver& observer) {
    config.validate();
    SessionTranscript transcript;
    transcript.session_id = config.session_id;
    for (const auto& p : config.agent_personas) transcript.agents.push_back(p.agent_id);

    Classroom classroom(backend, config);
    EvaluationAgent student(backend, config.eval);
    // Persona seeds come from a stream independent of speaker selection.
    Rng persona_rng(splitmix64(config.seed ^ 0x5eedULL));
    try {
        auto [persona, state] = student.build_persona(config.seed_pools, persona_rng, config.session_id);
        transcript.learning_content = persona.learning_content;
        transcript.personality = persona.personality;

        for (int turn = 1; turn <= config.turns; ++turn) {
            TurnRecord record;
            record.turn = turn;
            record.student_utterance =
                student.student_turn(state, persona, classroom.store().visible_for(kStudentId), turn, config.turns);
            record.cognitive_score = student.assess_cognition(record.student_utterance);
            state.cognitive_level = *record.cognitive_score;

            auto reply = classroom.run_round(turn, record.student_utterance);
            record.intentions = std::move(reply.intentions);
            record.speaker = reply.speaker;
            record.action = reply.action;
            record.response = reply.response;
            record.note = reply.note;

            std::vector<std::string> responses;
            if (!record.response.empty()) responses.push_back(record.response);
            state = student.update_state(state, persona, record.student_utterance, responses);
            record.emotion_score = state.emotion_score;
            record.terminated = state.terminated;
            transcript.turns.push_back(record);
            if (observer) observer(transcript.turns.back(), classroom);
            if (state.terminated) {
                transcript.termination = Termination::EmotionBelowThreshold;
                break;
            }
        }
    } catch (const Error& e) {
        spdlog::error("session {} aborted: {}", config.session_id, e.what());
        transcript.failed = true;
        transcript.termination = Termination::BackendFailure;
        transcript.error = e.what();
    }
    classroom.store().close();
    return transcript;
}

SessionConfig batch_session_config(const SessionConfig& base, int index) {
    SessionConfig c = base;
    char id[32];
    std::snprintf(id, sizeof id, "session-%03d", index + 1);
    c.session_id = id;
    c.seed = splitmix64(base.seed + static_cast<std::uint64_t>(index));
    return c;
}

RunSummary summarize(const std::vector<SessionTranscript>& transcripts) {
    RunSummary s;
    std::vector<double> sums;
    double emotion_sum = 0.0;
    int emotion_n = 0;
    for (const auto& t : transcripts) {
        if (t.failed) {
            ++s.failed_count;
            continue;
        }
        ++s.session_count;
        int session_max = 0;
        for (const auto& r : t.turns) {
            if (!r.cognitive_score) continue;
            const auto idx = static_cast<std::size_t>(r.turn - 1);
            if (sums.size() <= idx) {
                sums.resize(idx + 1, 0.0);
                s.sessions_per_turn.resize(idx + 1, 0);
            }
            sums[idx] += *r.cognitive_score;
            s.sessions_per_turn[idx] += 1;
            session_max = std::max(session_max, *r.cognitive_score);
        }
        s.max_cognitive_per_session.push_back(session_max);
        if (!t.turns.empty() && t.turns.back().emotion_score) {
            emotion_sum += *t.turns.back().emotion_score;
            ++emotion_n;
        }
    }
    s.mean_cognitive_per_turn.resize(sums.size(), 0.0);
    for (std::size_t i = 0; i < sums.size(); ++i) {
        if (s.sessions_per_turn[i] > 0) s.mean_cognitive_per_turn[i] = sums[i] / s.sessions_per_turn[i];
    }
    s.final_mean_emotion = emotion_n ? emotion_sum / emotion_n : 0.0;
    return s;
}

BatchResult run_batch(const std::vector<SessionConfig>& configs, llm::ChatBackend& backend, int jobs) {
    if (configs.empty()) throw ValidationError("a batch needs at least one session");
    for (const auto& c : configs) c.validate();
    BatchResult result;
    result.transcripts.resize(configs.size());
    const auto workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1, configs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            result.transcripts[i] = run_session(configs[i], backend);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    result.summary = summarize(result.transcripts);
    if (result.summary.failed_count > 0) {
        spdlog::warn("{} of {} sessions failed and are excluded from the summary", result.summary.failed_count,
                     configs.size());
    }
    return result;
}

std::vector<RoundRow> round_table(const RunSummary& summary) {
    std::vector<RoundRow> rows;
    for (std::size_t i = 0; i < summary.mean_cognitive_per_turn.size(); ++i) {
        if (summary.sessions_per_turn[i] == 0) continue;
        rows.push_back({static_cast<int>(i) + 1, summary.mean_cognitive_per_turn[i]});
    }
    return rows;
}

std::vector<RoundRow> sweep_rounds(const SessionConfig& base, int max_turns, int sessions_per_point,
                                   llm::ChatBackend& backend, int jobs) {
    if (max_turns < 1) throw ValidationError("max_turns must be >= 1");
    if (sessions_per_point < 1) throw ValidationError("sessions per point must be >= 1");
    SessionConfig cfg = base;
    cfg.turns = max_turns;
    std::vector<SessionConfig> configs;
    for (int i = 0; i < sessions_per_point; ++i) configs.push_back(batch_session_config(cfg, i));
    return round_table(run_batch(configs, backend, jobs).summary);
}

AgentRow agent_row(int agents, const RunSummary& summary) {
    AgentRow row{agents, 0.0};
    if (summary.max_cognitive_per_session.empty()) return row;
    double sum = 0.0;
    for (int m : summary.max_cognitive_per_session) sum += m;
    row.mean_max_cog = sum / static_cast<double>(summary.max_cognitive_per_session.size());
    return row;
}

std::vector<AgentRow> sweep_agents(const SessionConfig& base, const std::vector<int>& agent_counts,
                                   int sessions_per_point, const std::vector<Persona>& catalog,
                                   llm::ChatBackend& backend, int jobs) {
    if (agent_counts.empty()) throw ValidationError("at least one agent count is required");
    if (sessions_per_point < 1) throw ValidationError("sessions per point must be >= 1");
    for (int c : agent_counts) {
        if (c < 1) throw ValidationError("agent counts must be >= 1");
    }
    std::vector<AgentRow> rows;
    for (int count : agent_counts) {
        SessionConfig cfg = base;
        cfg.agent_personas = cycle_personas(catalog, static_cast<std::size_t>(count));
        std::vector<SessionConfig> configs;
        for (int i = 0; i < sessions_per_point; ++i) configs.push_back(batch_session_config(cfg, i));
        rows.push_back(agent_row(count, run_batch(configs, backend, jobs).summary));
    }
    return rows;
}

}  // namespace mindroom
