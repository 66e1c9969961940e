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

#include <optional>
#include <string>
#include <string_view>

#include "mindroom/llm/chat.hpp"

namespace mindroom::llm {

/// Reply styles of the synthetic backend.
///  - Default: student cognition climbs with the round, emotion drifts upward.
///  - FigureRounds: cognitive levels follow a fixed per-session table, emotion never drops.
///  - Volatile: emotion mostly falls, so sessions end early.
enum class SyntheticProfile { Default, FigureRounds, Volatile };

std::string_view to_string(SyntheticProfile profile);
std::optional<SyntheticProfile> parse_synthetic_profile(std::string_view text);

/// Rule-based stand-in for a chat model. Replies are a pure function of the request (its meta
/// annotations and request key), so recording it into a cassette and replaying is lossless.
/// Used to produce the checked-in fixtures and for offline demos.
class SyntheticBackend final : public ChatBackend {
public:
    explicit SyntheticBackend(SyntheticProfile profile = SyntheticProfile::Default);

    ChatResponse complete(const ChatRequest& request) override;
    std::string name() const override { return "synthetic"; }

    SyntheticProfile profile() const { return profile_; }

    // Level whose marker phrase appears in a synthetic student utterance, 1 when none does.
    static int marker_level(std::string_view utterance);
    // Figure table: session ordinal (1-based, wraps every 5) and round (clamped to 1..5).
    static int figure_level(int session_ordinal, int round);

private:
    std::string reply(const ChatRequest& request) const;

    SyntheticProfile profile_;
};

}  // namespace mindroom::llm
