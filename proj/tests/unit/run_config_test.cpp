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

#include <gtest/gtest.h>

#include <fstream>

#include "mindroom/errors.hpp"
#include "mindroom/llm/cassette.hpp"
#include "mindroom/run_config.hpp"
#include "test_support.hpp"

namespace mindroom {
namespace {

TEST(RunConfig, ShippedDefaultEqualsBuiltInDefaults) {
    const auto loaded = load_run_config(testing::source_dir() / "config" / "default.json");
    EXPECT_EQ(run_config_to_json(loaded), run_config_to_json(RunConfig{}));
}

TEST(RunConfig, EmptyObjectIsDefaults) {
    EXPECT_EQ(run_config_to_json(parse_run_config("{}")), run_config_to_json(RunConfig{}));
}

TEST(RunConfig, DumpParseRoundTrip) {
    RunConfig c;
    c.sessions = 3;
    c.session.turns = 4;
    c.session.seed = 99;
    c.session.pipeline.k = 3;
    c.session.eval.termination_threshold = 15;
    c.backend.profile = llm::SyntheticProfile::Volatile;
    const auto text = run_config_to_json(c).dump();
    EXPECT_EQ(run_config_to_json(parse_run_config(text)), run_config_to_json(c));
}

TEST(RunConfig, AgentCountCyclesRoster) {
    const auto c = parse_run_config(R"({"agents": 6})");
    ASSERT_EQ(c.session.agent_personas.size(), 6u);
    EXPECT_EQ(c.session.agent_personas[4].agent_id, "teacher-2");
}

TEST(RunConfig, RelativePathsResolveAgainstConfigDir) {
    const auto dir = testing::temp_dir("cfg");
    std::ofstream(dir / "pools.json") << R"({"content_seeds":["Databases"],"personality_seeds":["calm"]})";
    std::ofstream(dir / "run.json") << R"({"seed_pools":"pools.json","backend":{"kind":"cassette","cassette":"c.ndjson"}})";
    const auto c = load_run_config(dir / "run.json");
    EXPECT_EQ(c.session.seed_pools.content_seeds, (std::vector<std::string>{"Databases"}));
    EXPECT_EQ(c.backend.kind, BackendKind::Cassette);
    EXPECT_EQ(c.backend.cassette, dir / "c.ndjson");
}

TEST(RunConfig, CustomConstraints) {
    const auto c = parse_run_config(R"({"pipeline":{"constraints":[{"kind":"ClassroomNorm","text":"Be kind."}]}})");
    ASSERT_EQ(c.session.pipeline.constraint_rules.size(), 1u);
    EXPECT_EQ(c.session.pipeline.constraint_rules[0].kind, ConstraintKind::ClassroomNorm);
}

TEST(RunConfig, Rejections) {
    EXPECT_THROW(parse_run_config("[1]"), ValidationError);
    EXPECT_THROW(parse_run_config("{"), ValidationError);
    EXPECT_THROW(parse_run_config(R"({"turns": 0})"), ValidationError);
    EXPECT_THROW(parse_run_config(R"({"sessions": 0})"), ValidationError);
    EXPECT_THROW(parse_run_config(R"({"turns": "five"})"), ValidationError);
    EXPECT_THROW(parse_run_config(R"({"backend":{"kind":"quantum"}})"), ValidationError);
    EXPECT_THROW(parse_run_config(R"({"backend":{"kind":"cassette"}})"), ValidationError);
    EXPECT_THROW(parse_run_config(R"({"backend":{"profile":"spiky"}})"), ValidationError);
    EXPECT_THROW(parse_run_config(R"({"pipeline":{"constraints":[{"kind":"Odd","text":"x"}]}})"), ValidationError);
    EXPECT_THROW(parse_run_config(R"({"pipeline":{"utility_threshold":2}})"), ValidationError);
    EXPECT_THROW(load_run_config("/nonexistent/run.json"), IoError);
}

TEST(BackendKind, Names) {
    for (auto k : {BackendKind::Cassette, BackendKind::Live, BackendKind::Synthetic}) {
        EXPECT_EQ(parse_backend_kind(to_string(k)), k);
    }
    EXPECT_EQ(parse_backend_kind("other"), std::nullopt);
}

TEST(MakeBackend, RecordingWritesCassetteOnlyWhenAsked) {
    const auto dir = testing::temp_dir("mk");
    llm::ChatRequest r;
    r.messages = {{"user", "x"}};
    r.schema_tag = "plausibility";
    {
        auto plain = make_backend(BackendConfig{});
        plain->complete(r);
    }
    EXPECT_TRUE(std::filesystem::is_empty(dir));
    {
        auto rec = make_backend(BackendConfig{}, dir / "rec.ndjson");
        rec->complete(r);
    }
    EXPECT_EQ(llm::Cassette::load(dir / "rec.ndjson").size(), 1u);

    BackendConfig replay;
    replay.kind = BackendKind::Cassette;
    replay.cassette = dir / "rec.ndjson";
    auto back = make_backend(replay);
    EXPECT_EQ(back->name(), "scripted");
    EXPECT_NO_THROW(back->complete(r));
}

}  // namespace
}  // namespace mindroom
