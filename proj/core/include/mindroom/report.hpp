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
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mindroom/orchestrator.hpp"

namespace mindroom {

// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

/// Transcript file: newline-delimited JSON. The first line is the session header
/// (`"record": "session"` with session_id, learning_content, personality, agents, termination,
/// failed, error); each further line is one turn (`"record": "turn"`).
std::string transcript_to_ndjson(const SessionTranscript& transcript);
SessionTranscript transcript_from_ndjson(std::string_view text);

nlohmann::json turn_to_json(const TurnRecord& record);
nlohmann::json transcript_to_json(const SessionTranscript& transcript);
SessionTranscript transcript_from_json(const nlohmann::json& j);

/// Summary CSV: header `metric,index,value`. Rows: sessions, failed, final_mean_emotion (empty
/// index); mean_cog and sessions_at_turn per turn (index = turn); max_cog per session
/// (index = session ordinal).
std::string summary_to_csv(const RunSummary& summary);
RunSummary summary_from_csv(std::string_view text);

std::string rounds_to_csv(const std::vector<RoundRow>& rows);  // turn,mean_cog
std::vector<RoundRow> rounds_from_csv(std::string_view text);
std::string agents_to_csv(const std::vector<AgentRow>& rows);  // agents,mean_max_cog
// turn,emotion_score,cognitive_level,terminated
std::string trajectory_to_csv(const SessionTranscript& transcript);
// Plain-text transcript segmented per turn for rubric-based rating by human experts.
std::string transcript_to_text(const SessionTranscript& transcript);

// <dir>/summary.csv, <dir>/transcripts/<id>.ndjson, <dir>/trajectories/<id>.csv
void write_batch_outputs(const BatchResult& batch, const std::filesystem::path& dir);
// <dir>/summary.csv and <dir>/transcripts/<id>.txt
void export_report(const RunSummary& summary, const std::vector<SessionTranscript>& transcripts,
                   const std::filesystem::path& dir);
std::vector<SessionTranscript> load_transcripts(const std::filesystem::path& dir);

void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace mindroom
