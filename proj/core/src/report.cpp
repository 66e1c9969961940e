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

#include "mindroom/report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "mindroom/errors.hpp"
#include "text_util.hpp"

namespace mindroom {
namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

double parse_double(std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw ValidationError("not a number: '" + std::string(s) + "'");
    return v;
}

int parse_int(std::string_view s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw ValidationError("not an integer: '" + std::string(s) + "'");
    return v;
}

template <typename T>
nlohmann::json optional_json(const std::optional<T>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

TurnRecord turn_from_json(const nlohmann::json& j) {
    TurnRecord r;
    r.turn = j.at("turn").get<int>();
    r.student_utterance = j.at("student_utterance").get<std::string>();
    for (const auto& s : j.at("intentions")) {
        r.intentions.push_back({s.at("agent_id").get<std::string>(), s.at("score").get<int>()});
    }
    r.speaker = j.at("speaker").get<std::string>();
    const auto& action = j.at("action");
    const auto name = action.at("name").get<std::string>();
    const auto parsed = parse_action_name(name);
    if (!parsed) throw ValidationError("unknown action in transcript: " + name);
    r.action.name = *parsed;
    if (const auto& t = action.at("refers_to"); !t.is_null()) r.action.refers_to = t.get<std::string>();
    r.response = j.at("response").get<std::string>();
    if (const auto& c = j.at("cognitive_score"); !c.is_null()) r.cognitive_score = c.get<int>();
    if (const auto& e = j.at("emotion_score"); !e.is_null()) r.emotion_score = e.get<int>();
    r.terminated = j.at("terminated").get<bool>();
    r.note = j.value("note", std::string{});
    return r;
}

nlohmann::ordered_json header_json(const SessionTranscript& t) {
    nlohmann::ordered_json j;
    j["record"] = "session";
    j["session_id"] = t.session_id;
    j["learning_content"] = t.learning_content;
    j["personality"] = t.personality;
    j["agents"] = t.agents;
    j["termination"] = std::string(to_string(t.termination));
    j["failed"] = t.failed;
    j["error"] = t.error;
    return j;
}

void read_header(const nlohmann::json& j, SessionTranscript& t) {
    t.session_id = j.at("session_id").get<std::string>();
    t.learning_content = j.value("learning_content", std::string{});
    t.personality = j.value("personality", std::string{});
    t.agents = j.at("agents").get<std::vector<std::string>>();
    const auto term = j.at("termination").get<std::string>();
    const auto parsed = parse_termination(term);
    if (!parsed) throw ValidationError("unknown termination reason: " + term);
    t.termination = *parsed;
    t.failed = j.value("failed", false);
    t.error = j.value("error", std::string{});
}

}  // namespace

std::string format_number(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

nlohmann::json turn_to_json(const TurnRecord& r) {
    nlohmann::ordered_json j;
    j["record"] = "turn";
    j["turn"] = r.turn;
    j["student_utterance"] = r.student_utterance;
    auto intentions = nlohmann::ordered_json::array();
    for (const auto& s : r.intentions) intentions.push_back({{"agent_id", s.agent_id}, {"score", s.score}});
    j["intentions"] = std::move(intentions);
    j["speaker"] = r.speaker;
    nlohmann::ordered_json action;
    action["name"] = std::string(to_string(r.action.name));
    action["refers_to"] = r.action.refers_to ? nlohmann::ordered_json(*r.action.refers_to) : nlohmann::ordered_json(nullptr);
    j["action"] = std::move(action);
    j["response"] = r.response;
    j["cognitive_score"] = r.cognitive_score ? nlohmann::ordered_json(*r.cognitive_score) : nlohmann::ordered_json(nullptr);
    j["emotion_score"] = r.emotion_score ? nlohmann::ordered_json(*r.emotion_score) : nlohmann::ordered_json(nullptr);
    j["terminated"] = r.terminated;
    j["note"] = r.note;
    return nlohmann::json::parse(j.dump());
}

std::string transcript_to_ndjson(const SessionTranscript& t) {
    std::string out = header_json(t).dump() + "\n";
    for (const auto& r : t.turns) {
        // Re-serialize through ordered_json so field order is stable in files.
        nlohmann::ordered_json line = nlohmann::ordered_json::parse(turn_to_json(r).dump());
        nlohmann::ordered_json ordered;
        for (const char* key : {"record", "turn", "student_utterance", "intentions", "speaker", "action", "response",
                                "cognitive_score", "emotion_score", "terminated", "note"}) {
            ordered[key] = line[key];
        }
        out += ordered.dump() + "\n";
    }
    return out;
}

SessionTranscript transcript_from_ndjson(std::string_view text) {
    SessionTranscript t;
    bool have_header = false;
    try {
        for (auto line : split_lines(text)) {
            const auto j = nlohmann::json::parse(line);
            const auto kind = j.at("record").get<std::string>();
            if (kind == "session") {
                read_header(j, t);
                have_header = true;
            } else if (kind == "turn") {
                t.turns.push_back(turn_from_json(j));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed transcript: ") + e.what());
    }
    if (!have_header) throw ValidationError("transcript has no session header");
    return t;
}

nlohmann::json transcript_to_json(const SessionTranscript& t) {
    auto j = nlohmann::json::parse(header_json(t).dump());
    j.erase("record");
    j["turns"] = nlohmann::json::array();
    for (const auto& r : t.turns) {
        auto turn = turn_to_json(r);
        turn.erase("record");
        j["turns"].push_back(std::move(turn));
    }
    return j;
}

SessionTranscript transcript_from_json(const nlohmann::json& j) {
    SessionTranscript t;
    read_header(j, t);
    for (const auto& r : j.at("turns")) t.turns.push_back(turn_from_json(r));
    return t;
}

std::string summary_to_csv(const RunSummary& s) {
    std::string out = "metric,index,value\n";
    out += "sessions,," + std::to_string(s.session_count) + "\n";
    out += "failed,," + std::to_string(s.failed_count) + "\n";
    out += "final_mean_emotion,," + format_number(s.final_mean_emotion) + "\n";
    for (std::size_t i = 0; i < s.mean_cognitive_per_turn.size(); ++i) {
        out += "mean_cog," + std::to_string(i + 1) + "," + format_number(s.mean_cognitive_per_turn[i]) + "\n";
    }
    for (std::size_t i = 0; i < s.sessions_per_turn.size(); ++i) {
        out += "sessions_at_turn," + std::to_string(i + 1) + "," + std::to_string(s.sessions_per_turn[i]) + "\n";
    }
    for (std::size_t i = 0; i < s.max_cognitive_per_session.size(); ++i) {
        out += "max_cog," + std::to_string(i + 1) + "," + std::to_string(s.max_cognitive_per_session[i]) + "\n";
    }
    return out;
}

RunSummary summary_from_csv(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty() || lines.front() != "metric,index,value") throw ValidationError("summary CSV header mismatch");
    RunSummary s;
    auto put = [](auto& vec, std::string_view index, auto value) {
        const auto i = static_cast<std::size_t>(parse_int(index));
        if (i < 1) throw ValidationError("summary CSV index must be >= 1");
        if (vec.size() < i) vec.resize(i);
        vec[i - 1] = value;
    };
    for (std::size_t n = 1; n < lines.size(); ++n) {
        const auto cells = split_csv(lines[n]);
        if (cells.size() != 3) throw ValidationError("summary CSV row needs 3 cells: " + std::string(lines[n]));
        const auto metric = cells[0];
        if (metric == "sessions") {
            s.session_count = parse_int(cells[2]);
        } else if (metric == "failed") {
            s.failed_count = parse_int(cells[2]);
        } else if (metric == "final_mean_emotion") {
            s.final_mean_emotion = parse_double(cells[2]);
        } else if (metric == "mean_cog") {
            put(s.mean_cognitive_per_turn, cells[1], parse_double(cells[2]));
        } else if (metric == "sessions_at_turn") {
            put(s.sessions_per_turn, cells[1], parse_int(cells[2]));
        } else if (metric == "max_cog") {
            put(s.max_cognitive_per_session, cells[1], parse_int(cells[2]));
        } else {
            throw ValidationError("unknown summary metric: " + std::string(metric));
        }
    }
    return s;
}

std::string rounds_to_csv(const std::vector<RoundRow>& rows) {
    std::string out = "turn,mean_cog\n";
    for (const auto& r : rows) out += std::to_string(r.turn) + "," + format_number(r.mean_cog) + "\n";
    return out;
}

std::vector<RoundRow> rounds_from_csv(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty() || lines.front() != "turn,mean_cog") throw ValidationError("round sweep CSV header mismatch");
    std::vector<RoundRow> rows;
    for (std::size_t n = 1; n < lines.size(); ++n) {
        const auto cells = split_csv(lines[n]);
        if (cells.size() != 2) throw ValidationError("round sweep row needs 2 cells");
        rows.push_back({parse_int(cells[0]), parse_double(cells[1])});
    }
    return rows;
}

std::string agents_to_csv(const std::vector<AgentRow>& rows) {
    std::string out = "agents,mean_max_cog\n";
    for (const auto& r : rows) out += std::to_string(r.agents) + "," + format_number(r.mean_max_cog) + "\n";
    return out;
}

std::string trajectory_to_csv(const SessionTranscript& t) {
    std::string out = "turn,emotion_score,cognitive_level,terminated\n";
    for (const auto& r : t.turns) {
        out += std::to_string(r.turn) + "," + (r.emotion_score ? std::to_string(*r.emotion_score) : "") + "," +
               (r.cognitive_score ? std::to_string(*r.cognitive_score) : "") + "," + (r.terminated ? "1" : "0") + "\n";
    }
    return out;
}

std::string transcript_to_text(const SessionTranscript& t) {
    std::ostringstream out;
    out << "Session " << t.session_id << "\n";
    if (!t.learning_content.empty()) out << "Learning content: " << t.learning_content << "\n";
    if (!t.personality.empty()) out << "Student personality: " << t.personality << "\n";
    out << "Companions: " << text::join(t.agents, ", ", [](const std::string& a) { return a; }) << "\n";
    out << "Outcome: " << to_string(t.termination) << (t.failed ? " (failed: " + t.error + ")" : "") << "\n";
    for (const auto& r : t.turns) {
        out << "\n=== Segment " << r.turn << " ===\n";
        out << "Student: " << r.student_utterance << "\n";
        if (r.speaker.empty()) {
            out << "(no companion replied" << (r.note.empty() ? "" : ": " + r.note) << ")\n";
        } else if (r.response.empty()) {
            out << "[" << r.speaker << "] (" << (r.note.empty() ? "no reply" : r.note) << ")\n";
        } else {
            out << "[" << r.speaker << ", " << to_string(r.action.name)
                << (r.action.refers_to ? " -> " + *r.action.refers_to : "") << "] " << r.response << "\n";
        }
        out << "Rubric notes: participation ___ / comment quality ___ / listening & co-construction ___ / "
               "critical analysis ___\n";
    }
    return out.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_batch_outputs(const BatchResult& batch, const std::filesystem::path& dir) {
    write_text_file(dir / "summary.csv", summary_to_csv(batch.summary));
    for (const auto& t : batch.transcripts) {
        write_text_file(dir / "transcripts" / (t.session_id + ".ndjson"), transcript_to_ndjson(t));
        write_text_file(dir / "trajectories" / (t.session_id + ".csv"), trajectory_to_csv(t));
    }
}

void export_report(const RunSummary& summary, const std::vector<SessionTranscript>& transcripts,
                   const std::filesystem::path& dir) {
    if (transcripts.empty()) throw ValidationError("report needs at least one transcript");
    write_text_file(dir / "summary.csv", summary_to_csv(summary));
    for (const auto& t : transcripts) write_text_file(dir / "transcripts" / (t.session_id + ".txt"), transcript_to_text(t));
}

std::vector<SessionTranscript> load_transcripts(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw IoError("transcript directory not found: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.path().extension() == ".ndjson") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<SessionTranscript> out;
    for (const auto& f : files) out.push_back(transcript_from_ndjson(read_text_file(f)));
    return out;
}

}  // namespace mindroom
