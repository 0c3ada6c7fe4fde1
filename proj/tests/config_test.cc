// Copyright 2026 The TALENT Harness Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "talent/config.h"

#include <gtest/gtest.h>

#include "fixture_env.h"
#include "talent/error.h"
#include "talent/util.h"
#include "test_paths.h"

namespace talent {
namespace {

using testing::TempDir;

TEST(Config, Defaults) {
  RunConfig c;
  EXPECT_EQ(c.strategies, std::vector<StrategyKind>{StrategyKind::kTalent});
  EXPECT_EQ(c.resolution.target, ResolutionTarget::kR1024);
  EXPECT_EQ(c.concurrency, 4);
  EXPECT_EQ(c.transport, "live");
  EXPECT_EQ(c.vlm.role, EndpointRole::kVlm);
  EXPECT_EQ(c.llm.name, "llm");
}

TEST(Config, LayersApplyInPrecedenceOrder) {
  TempDir dir;
  WriteFileAtomic(dir / "c.json",
                  R"({"concurrency": 2, "llm_model": "from-file", "seed": 9,
                      "vlm-model": "file-vlm", "temperature": 0.5})");
  const RunConfig only_file = ResolveConfig(dir / "c.json", {}, {});
  EXPECT_EQ(only_file.concurrency, 2);
  EXPECT_EQ(only_file.seed, 9u);
  EXPECT_EQ(only_file.vlm.temperature, 0.5);
  EXPECT_EQ(only_file.llm.temperature, 0.5);

  const RunConfig env = ResolveConfig(
      dir / "c.json", {{"concurrency", "3"}, {"llm-model", "from-env"}}, {});
  EXPECT_EQ(env.concurrency, 3);
  EXPECT_EQ(env.llm.model, "from-env");
  EXPECT_EQ(env.vlm.model, "file-vlm");

  const RunConfig flags =
      ResolveConfig(dir / "c.json", {{"concurrency", "3"}, {"llm-model", "from-env"}},
                    {{"llm-model", "from-flag"}, {"llm-temperature", "0.1"}, {"temperature", "0.9"}});
  EXPECT_EQ(flags.concurrency, 3);
  EXPECT_EQ(flags.llm.model, "from-flag");
  EXPECT_EQ(flags.llm.temperature, 0.1);
  EXPECT_EQ(flags.vlm.temperature, 0.9);
}

TEST(Config, EnvironmentVariablesMapToKeys) {
  std::string a = "TALENT_LLM_BASE_URL=http://x/v1";
  std::string b = "TALENT_NOT_A_KEY=1";
  std::string c = "HOME=/root";
  std::string d = "TALENT_RESOLUTION=r512";
  char* envp[] = {a.data(), b.data(), c.data(), d.data(), nullptr};
  const auto s = SettingsFromEnvironment(envp);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.at("llm-base-url"), "http://x/v1");
  EXPECT_EQ(ResolveConfig(std::nullopt, s, {}).resolution.target, ResolutionTarget::kR512);
}

TEST(Config, BadSettingsNameTheKey) {
  RunConfig c;
  auto message = [&](std::string_view key, const nlohmann::json& v) -> std::string {
    try {
      ApplySetting(c, key, v);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
      return e.what();
    }
    return "";
  };
  EXPECT_NE(message("no-such-key", 1).find("no-such-key"), std::string::npos);
  EXPECT_NE(message("concurrency", "many").find("concurrency"), std::string::npos);
  EXPECT_NE(message("strategies", "talent,bogus").find("bogus"), std::string::npos);
  EXPECT_NE(message("resolution", "r2048").find("r2048"), std::string::npos);

  TempDir dir;
  WriteFileAtomic(dir / "c.json", R"({"colour": "blue"})");
  EXPECT_THROW(ResolveConfig(dir / "c.json", {}, {}), Error);
}

TEST(Config, ValueForms) {
  RunConfig c;
  ApplySetting(c, "strategies", "talent, perfect_ocr");
  EXPECT_EQ(c.strategies.size(), 2u);
  ApplySetting(c, "strategies", nlohmann::json::array({"direct_prompt"}));
  EXPECT_EQ(c.strategies, std::vector<StrategyKind>{StrategyKind::kDirectPrompt});
  ApplySetting(c, "fail-fast", "true");
  EXPECT_TRUE(c.fail_fast);
  ApplySetting(c, "fail_fast", false);
  EXPECT_FALSE(c.fail_fast);
  ApplySetting(c, "vlm-model-size-b", "3");
  EXPECT_EQ(c.vlm.model_size_b, 3.0);
  ApplySetting(c, "categories", "financial_reports,survey_results");
  EXPECT_EQ(c.categories.size(), 2u);
}

TEST(Config, BothResolutionPresetsAreSelectable) {
  for (const auto& [name, target] :
       {std::pair{"r512", ResolutionTarget::kR512}, std::pair{"r1024", ResolutionTarget::kR1024}}) {
    const RunConfig c = ResolveConfig(std::nullopt, {}, {{"resolution", name}});
    EXPECT_EQ(c.resolution.target, target);
    EXPECT_EQ(EffectiveConfig(c)["resolution"], name);
  }
}

TEST(Config, ValidateChecksEndpointsInUse) {
  RunConfig c;
  c.manifest = "m.jsonl";
  EXPECT_THROW(c.Validate(), Error);
  c.vlm.model = "v";
  c.llm.model = "l";
  c.transport = "replay";
  c.fixtures_dir = "fx";
  EXPECT_NO_THROW(c.Validate());
  c.transport = "live";
  try {
    c.Validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("vlm-base-url"), std::string::npos) << e.what();
  }
  c.strategies = {StrategyKind::kPerfectOcr};
  c.llm.base_url = "http://x/v1";
  EXPECT_NO_THROW(c.Validate());
  c.concurrency = 0;
  EXPECT_THROW(c.Validate(), Error);
}

TEST(Config, EffectiveConfigRedactsKeys) {
  RunConfig c = ResolveConfig(std::nullopt, {}, {{"llm-api-key", "sk-secret"}});
  const std::string echo = EffectiveConfig(c).dump();
  EXPECT_EQ(echo.find("sk-secret"), std::string::npos);
  EXPECT_EQ(EffectiveConfig(c)["llm"]["api-key"], "<redacted>");
  EXPECT_TRUE(EffectiveConfig(c)["vlm"]["api-key"].is_null());
  for (const auto& key : {"manifest", "strategies", "resolution", "match-policy", "transport"}) {
    EXPECT_TRUE(EffectiveConfig(c).contains(key)) << key;
  }
}

TEST(Config, PerfectOcrNeedsGroundTruthTables) {
  auto m = LoadManifest(testing::TestData("mini/manifest.jsonl"));
  m.records[2].gt_table_text.reset();
  m.records[4].gt_table_text.reset();
  const auto items = SelectItems(m, {});
  RunConfig c;
  EXPECT_NO_THROW(CheckStrategiesAgainstItems(c, items));
  c.strategies = {StrategyKind::kTalent, StrategyKind::kPerfectOcr};
  try {
    CheckStrategiesAgainstItems(c, items);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPrecondition);
    EXPECT_NE(std::string(e.what()).find("t03, t05"), std::string::npos) << e.what();
  }
}

}  // namespace
}  // namespace talent
