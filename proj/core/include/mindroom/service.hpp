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

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "mindroom/errors.hpp"
#include "mindroom/eval_agent.hpp"
#include "mindroom/llm/chat.hpp"
#include "mindroom/orchestrator.hpp"

namespace mindroom {

enum class EventKind { AgentTyping, AgentMessage, TurnComplete, SessionEnded, Debug };
std::string_view to_string(EventKind kind);

struct AgentEvent {
    std::uint64_t id = 0;  // 1-based, contiguous per session
    EventKind kind = EventKind::AgentTyping;
    nlohmann::json payload;
};

// `id:`/`event:`/`data:` framing of one server-sent event.
std::string format_sse(const AgentEvent& event);

enum class SessionStatus { Active, Ended };
std::string_view to_string(SessionStatus status);

class SessionBusy : public Error {
public:
    using Error::Error;
};
class SessionNotActive : public Error {
public:
    using Error::Error;
};
class UnknownSession : public Error {
public:
    using Error::Error;
};

/// A live classroom where a human takes the student's seat. Each message triggers one round on
/// the session's own worker thread; the student's affect and Bloom level are still tracked by
/// the evaluation agent's judges so the session ends once emotion falls below the threshold.
class LiveSession {
public:
    LiveSession(std::string session_id, SessionConfig config, bool debug, std::string learning_content,
                llm::ChatBackend& backend);
    ~LiveSession();
    LiveSession(const LiveSession&) = delete;
    LiveSession& operator=(const LiveSession&) = delete;

    // Queues one round and returns its turn number. Throws SessionBusy or SessionNotActive.
    int post_message(const std::string& text);

    // Events with id > after_id. Waits up to `timeout` when none are available yet.
    std::vector<AgentEvent> events_after(std::uint64_t after_id, std::chrono::milliseconds timeout) const;
    SessionTranscript transcript() const;
    SessionStatus status() const;
    bool busy() const;
    bool debug() const { return debug_; }
    const std::string& id() const { return id_; }
    const SessionConfig& config() const { return config_; }
    std::chrono::system_clock::time_point created_at() const { return created_at_; }
    nlohmann::json handle_json() const;

    // Blocks until no round is in flight (tests and shutdown).
    void wait_idle() const;
    void shutdown();

private:
    void worker_loop(std::stop_token stop);
    void run_round(int turn, const std::string& text);
    void emit(EventKind kind, nlohmann::json payload);

    std::string id_;
    SessionConfig config_;
    bool debug_;
    std::chrono::system_clock::time_point created_at_;
    llm::ChatBackend& backend_;
    Classroom classroom_;
    EvaluationAgent judge_;
    StudentPersona persona_;
    StudentState state_;

    mutable std::mutex mu_;
    mutable std::condition_variable_any cv_;
    std::vector<AgentEvent> events_;
    SessionTranscript transcript_;
    SessionStatus status_ = SessionStatus::Active;
    int turns_started_ = 0;
    std::optional<std::pair<int, std::string>> pending_;
    bool in_flight_ = false;
    std::jthread worker_;
};

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    SessionConfig session_defaults;
    bool debug = false;           // default for sessions that do not ask
    std::string bearer_token;     // empty disables the check
    std::filesystem::path static_dir;
    std::uint64_t seed = 7;
};

/// In-memory session registry.
class SessionManager {
public:
    SessionManager(ServiceConfig config, std::shared_ptr<llm::ChatBackend> backend);
    ~SessionManager();

    // Body fields (all optional): turns, top_n, agents, personas, seed, debug, content.
    // Throws ValidationError on an invalid configuration.
    std::shared_ptr<LiveSession> create(const nlohmann::json& overrides);
    // Throws UnknownSession.
    std::shared_ptr<LiveSession> get(const std::string& id) const;
    std::size_t size() const;
    void shutdown();

private:
    ServiceConfig config_;
    std::shared_ptr<llm::ChatBackend> backend_;
    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<LiveSession>> sessions_;
    std::uint64_t counter_ = 0;
    std::uint64_t id_salt_;
};

/// HTTP front end:
///   POST /sessions                  -> 201 handle | 422
///   POST /sessions/{id}/messages    -> 202 {"turn"} | 404 | 409 | 410 | 422
///   GET  /sessions/{id}/events      -> text/event-stream (resumes after Last-Event-ID)
///   GET  /sessions/{id}/transcript  -> transcript JSON | 404
///   GET  /sessions/{id}             -> handle | 404
///   GET  /healthz
class Service {
public:
    Service(ServiceConfig config, std::shared_ptr<llm::ChatBackend> backend);
    ~Service();

    // Binds and serves on a background thread; returns the bound port.
    int start();
    // Binds and serves on the calling thread until stop().
    void run();
    void stop();
    SessionManager& sessions();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace mindroom
