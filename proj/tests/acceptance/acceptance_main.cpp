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

// Acceptance checks. Prints one PASS/FAIL/SKIP line per criterion and exits nonzero on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "mindroom/behavior_controller.hpp"
#include "mindroom/cli.hpp"
#include "mindroom/context_store.hpp"
#include "mindroom/llm/live.hpp"
#include "mindroom/orchestrator.hpp"
#include "mindroom/report.hpp"
#include "mindroom/tom_pipeline.hpp"
#include "test_support.hpp"

namespace {

using namespace mindroom;
namespace fs = std::filesystem;
using testing::ScriptedChat;

enum class Outcome { Pass, Fail, Skip };

struct Verdict {
    Outcome outcome = Outcome::Pass;
    std::string detail;
};

Verdict pass(std::string d) { return {Outcome::Pass, std::move(d)}; }
Verdict fail(std::string d) { return {Outcome::Fail, std::move(d)}; }
Verdict check(bool ok, std::string d) { return {ok ? Outcome::Pass : Outcome::Fail, std::move(d)}; }

// Cognitive scores and ToM labels seen anywhere in this run, checked by the Bloom criterion.
struct Observed {
    std::vector<int> levels;
    std::vector<std::string> labels;

    void add(const SessionTranscript& t) {
        for (const auto& r : t.turns) {
            if (r.cognitive_score) levels.push_back(*r.cognitive_score);
        }
    }
    void add(const PipelineTrace& trace) {
        levels.push_back(trace.assessment.level);
        for (const auto& h : trace.labeled) labels.emplace_back(to_string(h.label));
        for (const auto& r : trace.refined) labels.emplace_back(to_string(r.label));
        labels.emplace_back(to_string(trace.selected.label));
    }
} observed;

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

int run_cli(std::vector<std::string> args, std::string* err_text = nullptr) {
    args.insert(args.begin(), "mindroom");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    if (err_text) *err_text = err.str();
    return code;
}

std::map<std::string, std::string> tree(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = testing::read_file(e.path());
    }
    return out;
}

std::string fixture(const std::string& name) { return (testing::source_dir() / "fixtures" / name).string(); }

Verdict visibility() {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(2024);
    ContextStore store;
    const auto world = testing::make_world(rng, 10, 4);
    for (const auto& a : world.agents) store.register_agent({a, "Name " + a, RoleKind::ActiveStudent, "d", {ActionName::Speak}});
    testing::fuzz_fill(store, world, rng, 1000);
    const auto all = store.entries();
    int mismatches = 0;
    for (int q = 0; q < 200; ++q) {
        const auto& agent = world.agents[uniform_index(rng, world.agents.size())];
        const auto upto = 1 + uniform_index(rng, store.now());
        // Random membership claims, not only the true ones, so the member-set half of the rule is exercised.
        GroupKeys groups;
        for (const auto& [key, _] : world.groups) {
            if (uniform_index(rng, 2)) groups.insert(key);
        }
        std::vector<std::uint64_t> expected, got;
        for (const auto& e : all) {
            if (testing::oracle_visible(e, agent, groups, upto)) expected.push_back(e.pk);
        }
        for (const auto& e : store.visible_for(agent, groups, upto)) got.push_back(e.pk);
        mismatches += expected != got;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return check(mismatches == 0 && secs < 5.0,
                 std::to_string(all.size()) + " entries, 200 queries, " + std::to_string(mismatches) + " mismatches, " +
                     fmt(secs) + " s");
}

Verdict selection() {
    const std::vector<IntentionScore> scores{{"a", 9}, {"b", 7}, {"c", 5}, {"d", 3}};
    Rng rng(7);
    std::map<std::string, int> hits;
    const int draws = 10'000;
    for (int i = 0; i < draws; ++i) ++hits[select_speaker(scores, 3, rng)];
    bool ok = hits["d"] == 0;
    std::string detail;
    for (const char* id : {"a", "b", "c"}) {
        const double f = static_cast<double>(hits[id]) / draws;
        ok = ok && std::abs(f - 1.0 / 3.0) <= 0.02;
        detail += std::string(id) + "=" + fmt(f) + " ";
    }
    int referred = 0;
    for (int i = 0; i < 1000; ++i) referred += select_speaker(scores, 3, rng, AgentId("d")) == "d";
    ok = ok && referred == 1000;
    return check(ok, detail + "d=" + std::to_string(hits["d"]) + ", referral " + std::to_string(referred) + "/1000");
}

PipelineConfig pipeline_config(double threshold, int retries) {
    PipelineConfig c;
    c.utility_threshold = threshold;
    c.max_retries = retries;
    return c;
}

Verdict pipeline_contract() {
    std::vector<std::string> problems;
    const Persona teacher = default_personas()[0];

    {
        ScriptedChat chat;
        chat.queue("utility", {"utility: 0.2", "utility: 0.9"});
        TomPipeline p(chat, pipeline_config(0.5, 2));
        int response_calls_at_choice = -1;
        const auto trace = p.run({"Can you compare heads with channels?", {}, {{"teacher", "earlier turn", 1}}, teacher},
                                 [&](const std::string&) {
                                     response_calls_at_choice = chat.count("response");
                                     return ActionKind{ActionName::Explain, std::nullopt};
                                 });
        observed.add(trace);
        std::vector<std::string> expected{"hypotheses", "memory-filter", "tom-labels", "cognitive-level"};
        for (std::size_t i = 0; i < trace.labeled.size(); ++i) expected.push_back("refine");
        for (std::size_t i = 0; i < trace.labeled.size(); ++i) expected.push_back("plausibility");
        for (int i = 0; i < 2; ++i) {
            expected.push_back("response");
            expected.push_back("utility");
        }
        if (chat.tags() != expected) problems.push_back("stage order");
        if (response_calls_at_choice != 0) problems.push_back("action chosen after generation");
    }

    Rng rng(99);
    int best_wrong = 0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<RefinedHypothesis> refined(1 + uniform_index(rng, 7));
        for (std::size_t i = 0; i < refined.size(); ++i) {
            refined[i] = {static_cast<int>(i) + 1, "h", static_cast<double>(uniform_index(rng, 5)) / 4.0, TomLabel::Thought};
        }
        std::size_t scan = 0;
        for (std::size_t i = 1; i < refined.size(); ++i) {
            if (refined[i].plausibility > refined[scan].plausibility) scan = i;
        }
        best_wrong += TomPipeline::select_best(refined).source_index != static_cast<int>(scan) + 1;
    }
    if (best_wrong) problems.push_back(std::to_string(best_wrong) + " select_best mismatches");

    int regen_wrong = 0;
    const RefinedHypothesis selected{1, "wants an example", 0.8, TomLabel::Desire};
    const GenerationInput input{"What is attention?", {}, {2, "Understand", ""}};
    for (int trial = 0; trial < 200; ++trial) {
        const int retries = static_cast<int>(uniform_index(rng, 4));
        const double threshold = static_cast<double>(uniform_index(rng, 11)) / 10.0;
        std::vector<std::string> replies;
        int expected_regens = 0;
        bool passed = false;
        for (int i = 0; i <= retries; ++i) {
            const double u = static_cast<double>(uniform_index(rng, 11)) / 10.0;
            replies.push_back("utility: " + fmt(u));
            if (!passed && u < threshold && i < retries) ++expected_regens;
            passed = passed || u >= threshold;
        }
        ScriptedChat chat;
        chat.queue("utility", replies);
        TomPipeline p(chat, pipeline_config(threshold, retries));
        const auto r = p.generate_and_validate(selected, {}, teacher, {ActionName::Explain, std::nullopt}, input);
        const auto below = std::count_if(r.drafts.begin(), r.drafts.end(), [&](const auto& d) { return d.utility < threshold; });
        const int regens = static_cast<int>(r.drafts.size()) - 1;
        regen_wrong += regens != expected_regens || regens != std::min<int>(static_cast<int>(below), retries);
    }
    if (regen_wrong) problems.push_back(std::to_string(regen_wrong) + " regeneration mismatches");

    if (problems.empty()) return pass("stage order ok, 100 select_best vectors, 200 utility sequences");
    std::string d;
    for (const auto& p : problems) d += (d.empty() ? "" : "; ") + p;
    return fail(d);
}

Verdict emotion_dynamics() {
    SessionConfig base;
    base.turns = 10;
    const std::set<int> allowed{-10, -5, 0, 5, 10};
    int violations = 0, terminated = 0;
    for (int i = 0; i < 50; ++i) {
        const auto cfg = batch_session_config(base, i);
        ScriptedChat chat(llm::SyntheticProfile::Volatile);
        const auto t = run_session(cfg, chat);
        observed.add(t);
        if (t.failed) {
            ++violations;
            continue;
        }
        int prev = cfg.eval.initial_emotion;
        for (std::size_t k = 0; k < t.turns.size(); ++k) {
            const auto& r = t.turns[k];
            if (!r.emotion_score) {
                ++violations;
                break;
            }
            const int e = *r.emotion_score;
            if (e < 0 || e > 100 || e % 5 != 0 || !allowed.count(e - prev)) ++violations;
            const bool below = e < cfg.eval.termination_threshold;
            if (below != r.terminated) ++violations;
            if (below && k + 1 != t.turns.size()) ++violations;
            prev = e;
        }
        const bool ended_early = t.termination == Termination::EmotionBelowThreshold;
        terminated += ended_early;
        if (!ended_early && static_cast<int>(t.turns.size()) != cfg.turns) ++violations;
        // One student utterance per recorded turn: nothing is generated after termination.
        if (chat.count("student-utterance") != static_cast<int>(t.turns.size())) ++violations;
    }
    return check(violations == 0 && terminated > 0,
                 "50 sessions, " + std::to_string(terminated) + " terminated early, " + std::to_string(violations) +
                     " violations");
}

Verdict determinism(const fs::path& work) {
    const std::vector<std::string> args{"simulate", "--sessions", "5", "--turns", "5", "--seed", "7", "--cassette",
                                        fixture("golden.ndjson")};
    std::string err;
    for (const char* run : {"a", "b"}) {
        auto a = args;
        a.insert(a.end(), {"--out", (work / run).string()});
        if (const int code = run_cli(a, &err); code != cli::kExitOk) return fail("simulate exited " + std::to_string(code) + ": " + err);
    }
    const auto a = tree(work / "a");
    const auto b = tree(work / "b");
    for (const auto& t : load_transcripts(work / "a" / "transcripts")) observed.add(t);
    return check(a == b && a.count("summary.csv") && a.size() > 5,
                 std::to_string(a.size()) + " files, " + (a == b ? "byte-identical" : "differ"));
}

Verdict figure_shape(const fs::path& work) {
    std::string err;
    const std::vector<std::string> common{"--sessions", "5", "--seed", "7", "--cassette", fixture("figure_rounds.ndjson")};
    auto sweep = std::vector<std::string>{"sweep-rounds", "--max-turns", "5", "--out", (work / "sweep").string()};
    sweep.insert(sweep.end(), common.begin(), common.end());
    if (run_cli(sweep, &err) != cli::kExitOk) return fail("sweep-rounds failed: " + err);
    auto sim = std::vector<std::string>{"simulate", "--turns", "5", "--out", (work / "sim").string()};
    sim.insert(sim.end(), common.begin(), common.end());
    if (run_cli(sim, &err) != cli::kExitOk) return fail("simulate failed: " + err);

    const auto rows = rounds_from_csv(testing::read_file(work / "sweep" / "rounds.csv"));
    const auto transcripts = load_transcripts(work / "sim" / "transcripts");
    for (const auto& t : transcripts) observed.add(t);

    // Hand oracle: plain per-turn averages over the replayed transcripts.
    std::map<int, std::pair<double, int>> acc;
    for (const auto& t : transcripts) {
        for (const auto& r : t.turns) {
            if (!r.cognitive_score) continue;
            acc[r.turn].first += *r.cognitive_score;
            acc[r.turn].second += 1;
        }
    }
    if (rows.size() != 5) return fail(std::to_string(rows.size()) + " rows");
    double worst = 0.0;
    for (const auto& row : rows) {
        const auto& [sum, n] = acc[row.turn];
        worst = std::max(worst, n ? std::abs(row.mean_cog - sum / n) : 1.0);
    }
    const bool ok = std::abs(rows.front().mean_cog - 3.4) <= 1e-9 && std::abs(rows.back().mean_cog - 5.2) <= 1e-9 &&
                    worst <= 1e-9;
    return check(ok, "turn 1 = " + fmt(rows.front().mean_cog) + ", turn 5 = " + fmt(rows.back().mean_cog) +
                         ", max oracle gap " + fmt(worst));
}

Verdict bloom_bounds() {
    // Extra pipeline turns over every synthetic profile, in addition to what the other checks produced.
    const std::vector<std::string> utterances{"remind me what attention is", "in my own words, it weighs tokens?",
                                              "how would i apply this to audio?", "compare heads and channels",
                                              "this design is justified because", "what if we designed it recurrent?",
                                              "hm", "7"};
    for (auto profile : {llm::SyntheticProfile::Default, llm::SyntheticProfile::FigureRounds, llm::SyntheticProfile::Volatile}) {
        ScriptedChat chat(profile);
        TomPipeline p(chat, PipelineConfig{});
        for (const auto& u : utterances) {
            observed.add(p.run({u, {}, {}, default_personas()[0]},
                               [](const std::string&) { return ActionKind{ActionName::Explain, std::nullopt}; }));
        }
    }
    std::set<std::string> valid;
    for (auto l : kAllTomLabels) valid.emplace(to_string(l));
    const auto bad_levels = std::count_if(observed.levels.begin(), observed.levels.end(), [](int l) { return l < 1 || l > 6; });
    const auto bad_labels = std::count_if(observed.labels.begin(), observed.labels.end(), [&](const auto& l) { return !valid.count(l); });
    return check(bad_levels == 0 && bad_labels == 0 && !observed.levels.empty() && !observed.labels.empty(),
                 std::to_string(observed.levels.size()) + " scores, " + std::to_string(observed.labels.size()) +
                     " labels, " + std::to_string(bad_levels + bad_labels) + " violations");
}

Verdict live_smoke() {
    if (!std::getenv("MINDROOM_API_KEY")) return {Outcome::Skip, "MINDROOM_API_KEY not set"};
    llm::LiveConfig lc;
    if (const char* url = std::getenv("MINDROOM_BASE_URL")) lc.base_url = url;
    if (const char* model = std::getenv("MINDROOM_MODEL")) lc.model = model;
    llm::LiveBackend backend(lc);
    SessionConfig cfg;
    cfg.turns = 5;
    const auto start = std::chrono::steady_clock::now();
    const auto t = run_session(cfg, backend);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (t.failed) return fail("session failed: " + t.error);
    int bad = 0;
    for (const auto& r : t.turns) {
        for (const auto& s : r.intentions) bad += s.score < 0 || s.score > 10;
        if (r.cognitive_score) bad += *r.cognitive_score < 1 || *r.cognitive_score > 6;
        if (r.emotion_score) bad += *r.emotion_score < 0 || *r.emotion_score > 100 || *r.emotion_score % 5 != 0;
    }
    return check(bad == 0 && secs < 300.0 && !t.turns.empty(),
                 std::to_string(t.turns.size()) + " turns in " + fmt(secs) + " s, " + std::to_string(bad) + " out of range");
}

}  // namespace

int main() {
    spdlog::set_level(spdlog::level::err);
    const auto work = testing::temp_dir("acceptance");
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"visibility-oracle", visibility},
        {"selection-distribution", selection},
        {"pipeline-contract", pipeline_contract},
        {"emotion-dynamics", emotion_dynamics},
        {"determinism", [&] { return determinism(work / "determinism"); }},
        {"figure-shape", [&] { return figure_shape(work / "figure"); }},
        // Runs after the others so it covers everything they produced.
        {"bloom-bounds", bloom_bounds},
        {"live-smoke", live_smoke},
    };
    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        Verdict v;
        try {
            v = fn();
        } catch (const std::exception& e) {
            v = fail(std::string("threw: ") + e.what());
        }
        const char* tag = v.outcome == Outcome::Pass ? "PASS" : v.outcome == Outcome::Fail ? "FAIL" : "SKIP";
        failures += v.outcome == Outcome::Fail;
        std::cout << tag << " " << name << ": " << v.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
