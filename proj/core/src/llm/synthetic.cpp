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

#include "mindroom/llm/synthetic.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>

#include "mindroom/prompts.hpp"
#include "text_util.hpp"

namespace mindroom::llm {
namespace {

constexpr std::array<const char*, 6> kLevelNames = {"Remember", "Understand", "Apply", "Analyze", "Evaluate", "Create"};

// Marker phrase per Bloom level; checked from the highest level down.
constexpr std::array<const char*, 6> kMarkers = {"remind me", "in my own words", "how would i apply", "compare",
                                                 "is justified", "what if we designed"};

constexpr std::array<std::array<int, 5>, 5> kFigureTable = {{
    {3, 3, 3, 4, 4},
    {3, 4, 4, 4, 4},
    {4, 4, 4, 5, 5},
    {4, 5, 5, 5, 5},
    {5, 5, 5, 5, 6},
}};

int to_int(const std::string& s, int fallback) {
    int v = fallback;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc{} ? v : fallback;
}

// Trailing number of an id such as "session-003".
int ordinal_of(const std::string& id) {
    auto pos = id.find_last_not_of("0123456789");
    const auto digits = pos == std::string::npos ? id : id.substr(pos + 1);
    return digits.empty() ? static_cast<int>(fnv1a64(id) % 5) + 1 : to_int(digits, 1);
}

std::string fixed2(double v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

const std::vector<std::string>& topics_for(const std::string& content) {
    static const std::vector<std::string> circuits = {"CMOS inverter delay", "static timing analysis", "clock skew",
                                                      "dynamic power", "logical effort"};
    static const std::vector<std::string> ai = {"gradient descent", "overfitting", "heuristic search",
                                                "decision trees", "attention layers"};
    static const std::vector<std::string> generic = {"the main definition", "the worked example", "the key tradeoff",
                                                     "the lab task", "the last lecture"};
    if (text::contains_ci(content, "circuit")) return circuits;
    if (text::contains_ci(content, "intelligence")) return ai;
    return generic;
}

std::string utterance_for(int level, const std::string& topic) {
    switch (level) {
        case 1: return "Sorry, can you remind me what " + topic + " means? I lost track.";
        case 2: return "Let me try to say " + topic + " in my own words: it is about how one choice limits the next.";
        case 3: return "How would I apply " + topic + " to the assignment we got this week?";
        case 4: return "Can we compare " + topic + " with the approach from last week? They seem to pull in different directions.";
        case 5: return "I am not convinced the usual rule for " + topic + " is justified when resources are tight.";
        default: return "What if we designed a small experiment around " + topic + " and checked the results ourselves?";
    }
}

// Item lines of a numbered list ("1. text").
std::vector<std::string> numbered_items(const std::string& items) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start < items.size()) {
        auto end = items.find('\n', start);
        if (end == std::string::npos) end = items.size();
        auto line = std::string(text::trim(std::string_view(items).substr(start, end - start)));
        if (auto dot = line.find(". "); dot != std::string::npos) line = line.substr(dot + 2);
        if (!line.empty()) out.push_back(line);
        start = end + 1;
    }
    return out;
}

std::string label_for(const std::string& hypothesis) {
    if (text::contains_ci(hypothesis, "believes")) return "Belief";
    if (text::contains_ci(hypothesis, "wants")) return "Desire";
    if (text::contains_ci(hypothesis, "intends")) return "Intention";
    if (text::contains_ci(hypothesis, "feels")) return "Emotion";
    return "Thought";
}

}  // namespace

std::string_view to_string(SyntheticProfile profile) {
    switch (profile) {
        case SyntheticProfile::Default: return "default";
        case SyntheticProfile::FigureRounds: return "figure-rounds";
        case SyntheticProfile::Volatile: return "volatile";
    }
    return "default";
}

std::optional<SyntheticProfile> parse_synthetic_profile(std::string_view text) {
    for (auto p : {SyntheticProfile::Default, SyntheticProfile::FigureRounds, SyntheticProfile::Volatile}) {
        if (text == to_string(p)) return p;
    }
    return std::nullopt;
}

SyntheticBackend::SyntheticBackend(SyntheticProfile profile) : profile_(profile) {}

int SyntheticBackend::marker_level(std::string_view utterance) {
    for (int level = 6; level >= 1; --level) {
        if (text::contains_ci(utterance, kMarkers[static_cast<std::size_t>(level - 1)])) return level;
    }
    return 1;
}

int SyntheticBackend::figure_level(int session_ordinal, int round) {
    const auto s = static_cast<std::size_t>(((session_ordinal - 1) % 5 + 5) % 5);
    const auto r = static_cast<std::size_t>(std::clamp(round, 1, 5) - 1);
    return kFigureTable[r][s];
}

ChatResponse SyntheticBackend::complete(const ChatRequest& request) {
    ChatResponse response;
    response.raw_text = reply(request);
    response.parsed = Fields::parse(response.raw_text);
    response.backend_name = name();
    return response;
}

std::string SyntheticBackend::reply(const ChatRequest& request) const {
    const auto& tag = request.schema_tag;
    const std::uint64_t h = fnv1a64(request.request_key());
    auto pick = [h](std::uint64_t salt, std::uint64_t bound) { return static_cast<int>((h ^ (salt * 0x9e3779b97f4a7c15ULL)) % bound); };
    auto meta = [&](const char* key) { return request.meta_or(key); };

    if (tag == schema::kIntention) {
        const auto kind = meta("role_kind");
        int base = 5;
        if (kind == "Teacher") base = 6;
        else if (kind == "ActiveStudent") base = 7;
        else if (kind == "StrugglingStudent") base = 3;
        return "intention: " + std::to_string(std::clamp(base + pick(1, 5) - 2, 0, 10));
    }
    if (tag == schema::kAction) {
        const auto allowed = meta("allowed");
        const auto kind = meta("role_kind");
        const auto peers = meta("peers");
        std::vector<std::string> names;
        std::size_t start = 0;
        while (start <= allowed.size()) {
            auto end = allowed.find(", ", start);
            if (end == std::string::npos) end = allowed.size();
            if (end > start) names.push_back(allowed.substr(start, end - start));
            start = end + 2;
        }
        auto has = [&](const char* a) { return std::find(names.begin(), names.end(), a) != names.end(); };
        const int roll = pick(2, 10);
        if (has("CallRoll") && roll < 2 && peers != "none") {
            const auto first = peers.substr(0, peers.find(','));
            return "action: CallRoll\nrefers_to: " + first;
        }
        if (has("RemainSilent") && kind == "StrugglingStudent" && roll < 3) return "action: RemainSilent\nrefers_to: none";
        const char* preferred = kind == "Teacher" ? "Explain" : (roll < 5 && has("AskQuestion") ? "AskQuestion" : "Speak");
        if (!has(preferred)) preferred = names.empty() ? "Speak" : names.front().c_str();
        return std::string("action: ") + preferred + "\nrefers_to: none";
    }
    if (tag == schema::kHypotheses) {
        static const std::array<const char*, 6> pool = {
            "The student believes they grasp the basics but is unsure how the pieces connect.",
            "The student wants a concrete example before moving on.",
            "The student intends to test their own idea against the group's reasoning.",
            "The student feels uneasy about keeping up with the pace of the class.",
            "The student is weighing how this relates to earlier material.",
            "The student believes the previous answer skipped a step.",
        };
        const int k = std::max(1, to_int(meta("k"), 5));
        const int offset = pick(3, pool.size());
        std::string out;
        for (int i = 0; i < k; ++i) out += std::string("hypothesis: ") + pool[static_cast<std::size_t>((offset + i) % pool.size())] + "\n";
        return out;
    }
    if (tag == schema::kMemoryFilter) {
        const int count = std::max(1, to_int(meta("count"), 1));
        const int drop = pick(4, 4) == 0 ? pick(5, static_cast<std::uint64_t>(count)) + 1 : 0;
        std::string out;
        for (int i = 1; i <= count; ++i) out += "verdict " + std::to_string(i) + ": " + (i == drop ? "drop" : "keep") + "\n";
        return out;
    }
    if (tag == schema::kTomLabels) {
        std::string out;
        int i = 1;
        for (const auto& item : numbered_items(meta("items"))) out += "label " + std::to_string(i++) + ": " + label_for(item) + "\n";
        return out;
    }
    if (tag == schema::kCognitiveLevel || tag == schema::kStudentCognition) {
        const int level = marker_level(meta("utterance"));
        std::string out = std::string("level: ") + kLevelNames[static_cast<std::size_t>(level - 1)];
        if (tag == schema::kCognitiveLevel) out += "\nrationale: the wording matches this tier of the taxonomy.";
        return out;
    }
    if (tag == schema::kRefine) {
        const auto kind = meta("role_kind");
        const auto lens = kind == "Teacher" ? "so I should scaffold the next step rather than give the answer"
                                            : "so as a classmate I can share how I worked through it";
        auto base = meta("hypothesis");
        if (!base.empty() && base.back() == '.') base.pop_back();
        return "revised: " + base + ", " + lens + ".";
    }
    if (tag == schema::kPlausibility) return "plausibility: " + fixed2(0.40 + pick(6, 56) / 100.0);
    if (tag == schema::kUtility) {
        const int attempt = to_int(meta("attempt"), 1);
        const double u = attempt == 1 && pick(7, 10) < 3 ? 0.45 + pick(8, 10) / 100.0 : 0.70 + pick(9, 25) / 100.0;
        return "utility: " + fixed2(u);
    }
    if (tag == schema::kResponse) {
        const auto action = meta("action");
        const int level = std::clamp(to_int(meta("level"), 1), 1, 6);
        const auto next = kLevelNames[static_cast<std::size_t>(std::min(level, 5))];
        const auto target = meta("target");
        if (action == "CallRoll" && !target.empty()) {
            return target + ", could you share how you would approach the student's question? Let's build on it together.";
        }
        if (action == "AskQuestion") return "I was wondering the same thing. What would happen if we changed one assumption?";
        if (action == "Encourage") return "That is a good start. Keep going and tell us what you would check first.";
        if (action == "Summarize") return "So far we have the definition and one example. Which part still feels shaky?";
        if (action == "Speak" || action == "AnswerQuestion") {
            return "When I worked on this I split it into two steps first. Which step do you think matters more?";
        }
        return std::string("Good point. Instead of the answer, try this: what changes if the inputs double? Aim to ") +
               (level >= 6 ? "refine your design" : std::string("move toward ") + next) + " in your next reply.";
    }
    if (tag == schema::kStudentPersona) {
        const auto content = meta("content");
        const auto personality = meta("personality");
        const auto trait = personality.substr(0, personality.find(':'));
        return "background: A second-year student taking " + content + " alongside a part-time job.\n"
               "challenges: Finds it hard to connect lectures to practice; tends to be " + trait + " in discussion.\n"
               "goals: Wants to pass the course with a solid grasp of " + content + " and feel confident asking questions.";
    }
    if (tag == schema::kStudentUtterance) {
        const int round = to_int(meta("round"), 1);
        const auto sid = meta("student_id");
        const auto& topics = topics_for(meta("content"));
        const auto topic = topics[fnv1a64(sid + "#" + meta("round")) % topics.size()];
        int level = 1;
        if (profile_ == SyntheticProfile::FigureRounds) {
            level = figure_level(ordinal_of(sid), round);
        } else {
            const auto personality = meta("personality");
            const int base = text::contains_ci(personality, "reflective") || text::contains_ci(personality, "independent") ? 2 : 1;
            const int jitter = static_cast<int>(fnv1a64(sid + "/" + meta("round")) % 2);
            const int mood = to_int(meta("emotion"), 50) < 35 ? -1 : 0;
            level = std::clamp(base + round - 1 + jitter + mood, 1, 6);
        }
        return "utterance: " + utterance_for(level, topic);
    }
    if (tag == schema::kStudentUpdate) {
        int delta = 0;
        const bool replied = meta("responses") != "(nobody answered)" && !meta("responses").empty();
        const int roll = pick(10, 10);
        switch (profile_) {
            case SyntheticProfile::FigureRounds: delta = roll < 6 ? 5 : 0; break;
            case SyntheticProfile::Volatile: {
                static constexpr std::array<int, 10> steps = {-10, -10, -10, -5, -5, -5, 0, 0, 5, 10};
                delta = steps[static_cast<std::size_t>(roll)];
                break;
            }
            case SyntheticProfile::Default: {
                static constexpr std::array<int, 10> steps = {-5, 0, 0, 5, 5, 5, 5, 10, 10, -10};
                delta = replied ? steps[static_cast<std::size_t>(roll)] : -5;
                break;
            }
        }
        const char* verdict = delta > 0 ? "aligned" : (delta == 0 ? "partially aligned" : "misaligned");
        const char* feeling = delta > 0 ? "encouraged" : (delta == 0 ? "neutral" : "frustrated");
        return std::string("belief: I understand a bit more than before.\n") +
               "desire: I want to see one more worked example.\n"
               "intention: I will try the next step myself.\n"
               "emotion: " + feeling + "\n"
               "thought: The replies " + (delta >= 0 ? "helped me see the next step." : "did not address what confuses me.") + "\n"
               "verdict: " + verdict + "\n"
               "delta: " + (delta > 0 ? "+" : "") + std::to_string(delta);
    }
    return "unsupported request";
}

}  // namespace mindroom::llm
