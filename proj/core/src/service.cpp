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

#include "mindroom/service.hpp"

#include <random>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "mindroom/report.hpp"
#include "text_util.hpp"

namespace mindroom {
namespace {

std::string iso8601(std::chrono::system_clock::time_point t) {
    const auto secs = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Splits a reply into word groups so clients can render it incrementally.
std::vector<std::string> chunk_words(const std::string& text, std::size_t words_per_chunk) {
    std::vector<std::string> chunks;
    std::string current;
    std::size_t words = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        current += text[i];
        if (text[i] == ' ' && ++words == words_per_chunk) {
            chunks.push_back(std::move(current));
            current.clear();
            words = 0;
        }
    }
    if (!current.empty()) chunks.push_back(std::move(current));
    return chunks;
}

nlohmann::json debug_payload(int turn, const CompanionReply& reply) {
    nlohmann::json j{{"turn", turn}, {"speaker", reply.speaker}};
    j["intentions"] = nlohmann::json::array();
    for (const auto& s : reply.intentions) j["intentions"].push_back({{"agent_id", s.agent_id}, {"score", s.score}});
    if (!reply.trace) return j;
    const auto& t = *reply.trace;
    j["proposed"] = t.proposed;
    j["hypotheses"] = nlohmann::json::array();
    for (const auto& r : t.refined) {
        j["hypotheses"].push_back({{"index", r.source_index},
                                   {"text", r.revised_text},
                                   {"label", std::string(to_string(r.label))},
                                   {"plausibility", r.plausibility}});
    }
    j["selected"] = {{"index", t.selected.source_index},
                     {"label", std::string(to_string(t.selected.label))},
                     {"summary", hypothesis_summary(t.selected)},
                     {"plausibility", t.selected.plausibility}};
    j["cognitive_level"] = t.assessment.level;
    j["level_name"] = t.assessment.level_name;
    j["action"] = std::string(to_string(t.action.name));
    j["utility"] = t.generation.final_draft.utility;
    j["drafts"] = t.generation.drafts.size();
    return j;
}

}  // namespace

std::string_view to_string(EventKind kind) {
    switch (kind) {
        case EventKind::AgentTyping: return "AgentTyping";
        case EventKind::AgentMessage: return "AgentMessage";
        case EventKind::TurnComplete: return "TurnComplete";
        case EventKind::SessionEnded: return "SessionEnded";
        case EventKind::Debug: return "Debug";
    }
    return "Debug";
}

std::string_view to_string(SessionStatus status) { return status == SessionStatus::Active ? "Active" : "Ended"; }

std::string format_sse(const AgentEvent& e) {
    return "id: " + std::to_string(e.id) + "\nevent: " + std::string(to_string(e.kind)) + "\ndata: " + e.payload.dump() +
           "\n\n";
}

LiveSession::LiveSession(std::string session_id, SessionConfig config, bool debug, std::string learning_content,
                         llm::ChatBackend& backend)
    : id_(std::move(session_id)),
      config_(std::move(config)),
      debug_(debug),
      created_at_(std::chrono::system_clock::now()),
      backend_(backend),
      classroom_(backend, config_),
      judge_(backend, config_.eval) {
    config_.session_id = id_;
    persona_.student_id = id_;
    persona_.learning_content = std::move(learning_content);
    persona_.personality = "human participant";
    persona_.background = "unknown";
    persona_.challenges = "unknown";
    persona_.goals_expectations = "unknown";
    state_.emotion_score = config_.eval.initial_emotion;
    transcript_.session_id = id_;
    transcript_.learning_content = persona_.learning_content;
    transcript_.personality = persona_.personality;
    for (const auto& p : config_.agent_personas) transcript_.agents.push_back(p.agent_id);
    worker_ = std::jthread([this](std::stop_token st) { worker_loop(st); });
}

LiveSession::~LiveSession() { shutdown(); }

void LiveSession::shutdown() {
    worker_.request_stop();
    cv_.notify_all();
    if (worker_.joinable()) worker_.join();
}

int LiveSession::post_message(const std::string& text) {
    if (text::trim(text).empty()) throw ValidationError("message text must not be empty");
    std::lock_guard lock(mu_);
    if (status_ == SessionStatus::Ended) throw SessionNotActive("session " + id_ + " has ended");
    if (in_flight_) throw SessionBusy("a round is already in progress");
    in_flight_ = true;
    const int turn = ++turns_started_;
    pending_.emplace(turn, text);
    cv_.notify_all();
    return turn;
}

void LiveSession::worker_loop(std::stop_token stop) {
    while (true) {
        std::pair<int, std::string> job;
        {
            std::unique_lock lock(mu_);
            if (!cv_.wait(lock, stop, [&] { return pending_.has_value(); })) return;
            job = std::move(*pending_);
            pending_.reset();
        }
        run_round(job.first, job.second);
        {
            std::lock_guard lock(mu_);
            in_flight_ = false;
        }
        cv_.notify_all();
    }
}

void LiveSession::emit(EventKind kind, nlohmann::json payload) {
    {
        std::lock_guard lock(mu_);
        events_.push_back({events_.size() + 1, kind, std::move(payload)});
    }
    cv_.notify_all();
}

void LiveSession::run_round(int turn, const std::string& text) {
    std::vector<std::string> names;
    for (const auto& p : config_.agent_personas) names.push_back(p.agent_id);
    emit(EventKind::AgentTyping, {{"turn", turn}, {"agents", names}});

    TurnRecord record;
    record.turn = turn;
    record.student_utterance = text;
    try {
        auto reply = classroom_.run_round(turn, text);
        record.intentions = reply.intentions;
        record.speaker = reply.speaker;
        record.action = reply.action;
        record.response = reply.response;
        record.note = reply.note;
        if (!reply.response.empty()) {
            const auto& persona = *std::find_if(config_.agent_personas.begin(), config_.agent_personas.end(),
                                                [&](const Persona& p) { return p.agent_id == reply.speaker; });
            for (const auto& delta : chunk_words(reply.response, 4)) {
                emit(EventKind::AgentMessage,
                     {{"turn", turn}, {"speaker", reply.speaker}, {"name", persona.display_name},
                      {"action", std::string(to_string(reply.action.name))}, {"delta", delta}, {"done", false}});
            }
            emit(EventKind::AgentMessage, {{"turn", turn}, {"speaker", reply.speaker}, {"name", persona.display_name},
                                           {"action", std::string(to_string(reply.action.name))},
                                           {"text", reply.response}, {"done", true}});
        }
        if (debug_) emit(EventKind::Debug, debug_payload(turn, reply));

        record.cognitive_score = judge_.assess_cognition(text);
        state_.cognitive_level = *record.cognitive_score;
        std::vector<std::string> responses;
        if (!record.response.empty()) responses.push_back(record.response);
        state_ = judge_.update_state(state_, persona_, text, responses);
        record.emotion_score = state_.emotion_score;
        record.terminated = state_.terminated;
    } catch (const Error& e) {
        spdlog::error("live session {} turn {} failed: {}", id_, turn, e.what());
        std::lock_guard lock(mu_);
        transcript_.turns.push_back(record);
        transcript_.failed = true;
        transcript_.error = e.what();
        transcript_.termination = Termination::BackendFailure;
        status_ = SessionStatus::Ended;
        events_.push_back({events_.size() + 1, EventKind::SessionEnded,
                           {{"turn", turn}, {"reason", "BackendFailure"}, {"error", e.what()}}});
        classroom_.store().close();
        cv_.notify_all();
        return;
    }

    std::optional<Termination> ended;
    if (record.terminated) ended = Termination::EmotionBelowThreshold;
    else if (turn >= config_.turns) ended = Termination::Completed;
    {
        std::lock_guard lock(mu_);
        transcript_.turns.push_back(record);
        events_.push_back({events_.size() + 1, EventKind::TurnComplete,
                           {{"turn", turn},
                            {"speaker", record.speaker},
                            {"cognitive_score", *record.cognitive_score},
                            {"emotion_score", *record.emotion_score}}});
        if (ended) {
            transcript_.termination = *ended;
            status_ = SessionStatus::Ended;
            events_.push_back({events_.size() + 1, EventKind::SessionEnded,
                               {{"turn", turn}, {"reason", std::string(to_string(*ended))},
                                {"emotion_score", *record.emotion_score}}});
            classroom_.store().close();
        }
    }
    cv_.notify_all();
}

std::vector<AgentEvent> LiveSession::events_after(std::uint64_t after_id, std::chrono::milliseconds timeout) const {
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, timeout, [&] { return events_.size() > after_id || (status_ == SessionStatus::Ended && !in_flight_); });
    if (events_.size() <= after_id) return {};
    return {events_.begin() + static_cast<std::ptrdiff_t>(after_id), events_.end()};
}

SessionTranscript LiveSession::transcript() const {
    std::lock_guard lock(mu_);
    return transcript_;
}

SessionStatus LiveSession::status() const {
    std::lock_guard lock(mu_);
    return status_;
}

bool LiveSession::busy() const {
    std::lock_guard lock(mu_);
    return in_flight_;
}

void LiveSession::wait_idle() const {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return !in_flight_; });
}

nlohmann::json LiveSession::handle_json() const {
    nlohmann::json agents = nlohmann::json::array();
    for (const auto& p : config_.agent_personas) {
        agents.push_back({{"agent_id", p.agent_id}, {"display_name", p.display_name},
                          {"role_kind", std::string(to_string(p.role_kind))}});
    }
    std::lock_guard lock(mu_);
    return {{"session_id", id_},
            {"created_at", iso8601(created_at_)},
            {"mode", "Live"},
            {"status", std::string(to_string(status_))},
            {"debug", debug_},
            {"turns_taken", turns_started_},
            {"config", {{"turns", config_.turns}, {"top_n", config_.top_n}, {"seed", config_.seed},
                        {"learning_content", persona_.learning_content}, {"agents", agents}}}};
}

SessionManager::SessionManager(ServiceConfig config, std::shared_ptr<llm::ChatBackend> backend)
    : config_(std::move(config)), backend_(std::move(backend)), id_salt_(std::random_device{}()) {
    if (!backend_) throw ValidationError("the service needs a backend");
    config_.session_defaults.validate();
}

SessionManager::~SessionManager() { shutdown(); }

std::shared_ptr<LiveSession> SessionManager::create(const nlohmann::json& overrides) {
    if (!overrides.is_null() && !overrides.is_object()) throw ValidationError("session overrides must be a JSON object");
    SessionConfig cfg = config_.session_defaults;
    cfg.mode = SessionMode::Live;
    bool debug = config_.debug;
    std::string content = cfg.seed_pools.content_seeds.empty() ? "" : cfg.seed_pools.content_seeds.front();
    std::uint64_t index;
    {
        std::lock_guard lock(mu_);
        index = ++counter_;
    }
    cfg.seed = splitmix64(config_.seed + index);
    try {
        if (overrides.is_object()) {
            if (auto it = overrides.find("turns"); it != overrides.end()) cfg.turns = it->get<int>();
            if (auto it = overrides.find("top_n"); it != overrides.end()) cfg.top_n = it->get<int>();
            if (auto it = overrides.find("seed"); it != overrides.end()) cfg.seed = it->get<std::uint64_t>();
            if (auto it = overrides.find("debug"); it != overrides.end()) debug = it->get<bool>();
            if (auto it = overrides.find("content"); it != overrides.end()) content = it->get<std::string>();
            if (auto it = overrides.find("personas"); it != overrides.end()) {
                cfg.agent_personas = parse_persona_catalog(nlohmann::json{{"personas", *it}}.dump());
            }
            if (auto it = overrides.find("agents"); it != overrides.end()) {
                const int n = it->get<int>();
                if (n < 1) throw ValidationError("agents must be >= 1");
                cfg.agent_personas = cycle_personas(cfg.agent_personas, static_cast<std::size_t>(n));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("invalid session overrides: ") + e.what());
    }
    cfg.validate();

    char id[40];
    std::snprintf(id, sizeof id, "s%llu-%08llx", static_cast<unsigned long long>(index),
                  static_cast<unsigned long long>(splitmix64(id_salt_ + index) & 0xffffffffULL));
    auto session = std::make_shared<LiveSession>(id, std::move(cfg), debug, content, *backend_);
    std::lock_guard lock(mu_);
    sessions_[session->id()] = session;
    return session;
}

std::shared_ptr<LiveSession> SessionManager::get(const std::string& id) const {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw UnknownSession("unknown session " + id);
    return it->second;
}

std::size_t SessionManager::size() const {
    std::lock_guard lock(mu_);
    return sessions_.size();
}

void SessionManager::shutdown() {
    std::map<std::string, std::shared_ptr<LiveSession>> sessions;
    {
        std::lock_guard lock(mu_);
        sessions = sessions_;
    }
    for (auto& [id, s] : sessions) s->shutdown();
}

struct Service::Impl {
    ServiceConfig config;
    SessionManager manager;
    httplib::Server server;
    std::jthread thread;
    std::atomic<bool> stopping{false};

    Impl(ServiceConfig c, std::shared_ptr<llm::ChatBackend> backend)
        : config(c), manager(std::move(c), std::move(backend)) {
        routes();
    }

    static void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    static void send_error(httplib::Response& res, int status, const std::string& message) {
        send_json(res, status, {{"error", message}});
    }

    bool authorized(const httplib::Request& req) const {
        if (config.bearer_token.empty()) return true;
        if (req.get_header_value("Authorization") == "Bearer " + config.bearer_token) return true;
        // EventSource cannot set headers, so the stream also accepts ?token=.
        return req.has_param("token") && req.get_param_value("token") == config.bearer_token;
    }

    template <typename Fn>
    void with_session(const httplib::Request& req, httplib::Response& res, Fn&& fn) {
        try {
            fn(manager.get(req.matches[1]));
        } catch (const UnknownSession& e) {
            send_error(res, 404, e.what());
        }
    }

    void routes() {
        server.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
            if (req.path.rfind("/sessions", 0) == 0 && !authorized(req)) {
                send_error(res, 401, "missing or invalid bearer token");
                return httplib::Server::HandlerResponse::Handled;
            }
            return httplib::Server::HandlerResponse::Unhandled;
        });
        server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
            send_json(res, 200, {{"status", "ok"}});
        });
        server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
            nlohmann::json body = nlohmann::json::object();
            if (!req.body.empty()) {
                body = nlohmann::json::parse(req.body, nullptr, false);
                if (body.is_discarded()) return send_error(res, 422, "request body is not valid JSON");
            }
            try {
                send_json(res, 201, manager.create(body)->handle_json());
            } catch (const ValidationError& e) {
                send_error(res, 422, e.what());
            }
        });
        server.Get(R"(/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            with_session(req, res, [&](const auto& s) { send_json(res, 200, s->handle_json()); });
        });
        server.Post(R"(/sessions/([^/]+)/messages)", [this](const httplib::Request& req, httplib::Response& res) {
            with_session(req, res, [&](const std::shared_ptr<LiveSession>& s) {
                const auto body = nlohmann::json::parse(req.body, nullptr, false);
                if (body.is_discarded() || !body.is_object() || !body.contains("text") || !body["text"].is_string()) {
                    return send_error(res, 422, "expected a JSON body with a string field 'text'");
                }
                try {
                    send_json(res, 202, {{"turn", s->post_message(body["text"].get<std::string>())}});
                } catch (const SessionBusy& e) {
                    send_error(res, 409, e.what());
                } catch (const SessionNotActive& e) {
                    send_error(res, 410, e.what());
                } catch (const ValidationError& e) {
                    send_error(res, 422, e.what());
                }
            });
        });
        server.Get(R"(/sessions/([^/]+)/transcript)", [this](const httplib::Request& req, httplib::Response& res) {
            with_session(req, res, [&](const auto& s) { send_json(res, 200, transcript_to_json(s->transcript())); });
        });
        server.Get(R"(/sessions/([^/]+)/events)", [this](const httplib::Request& req, httplib::Response& res) {
            with_session(req, res, [&](const std::shared_ptr<LiveSession>& s) {
                std::uint64_t cursor = 0;
                if (req.has_header("Last-Event-ID")) {
                    cursor = std::strtoull(req.get_header_value("Last-Event-ID").c_str(), nullptr, 10);
                }
                res.set_header("Cache-Control", "no-cache");
                res.set_chunked_content_provider(
                    "text/event-stream", [this, s, cursor, idle = 0](std::size_t, httplib::DataSink& sink) mutable {
                        using namespace std::chrono_literals;
                        if (stopping) return false;
                        const auto events = s->events_after(cursor, 500ms);
                        if (events.empty()) {
                            if (s->status() == SessionStatus::Ended && !s->busy()) {
                                sink.done();
                                return true;
                            }
                            if (++idle < 30) return true;
                            idle = 0;
                            const std::string ping = ": keep-alive\n\n";
                            return sink.write(ping.data(), ping.size());
                        }
                        idle = 0;
                        for (const auto& e : events) {
                            const auto frame = format_sse(e);
                            if (!sink.write(frame.data(), frame.size())) return false;
                            cursor = e.id;
                        }
                        return true;
                    });
            });
        });
        if (!config.static_dir.empty()) {
            if (!server.set_mount_point("/", config.static_dir.string())) {
                throw IoError("static directory not found: " + config.static_dir.string());
            }
        }
    }
};

Service::Service(ServiceConfig config, std::shared_ptr<llm::ChatBackend> backend)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(backend))) {}

Service::~Service() { stop(); }

int Service::start() {
    auto& s = impl_->server;
    const int port = impl_->config.port == 0 ? s.bind_to_any_port(impl_->config.host)
                                             : (s.bind_to_port(impl_->config.host, impl_->config.port) ? impl_->config.port : -1);
    if (port < 0) throw IoError("cannot bind " + impl_->config.host + ":" + std::to_string(impl_->config.port));
    impl_->thread = std::jthread([&s] { s.listen_after_bind(); });
    s.wait_until_ready();
    spdlog::info("serving on http://{}:{}", impl_->config.host, port);
    return port;
}

void Service::run() {
    spdlog::info("serving on http://{}:{}", impl_->config.host, impl_->config.port);
    if (!impl_->server.listen(impl_->config.host, impl_->config.port)) {
        throw IoError("cannot listen on " + impl_->config.host + ":" + std::to_string(impl_->config.port));
    }
}

void Service::stop() {
    if (!impl_) return;
    impl_->stopping = true;
    impl_->manager.shutdown();
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

SessionManager& Service::sessions() { return impl_->manager; }

}  // namespace mindroom
