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

#ifndef TALENT_TESTS_SUPPORT_FIXTURE_ENV_H_
#define TALENT_TESTS_SUPPORT_FIXTURE_ENV_H_

#include <memory>
#include <string>

#include "scripted_model.h"
#include "talent/config.h"
#include "talent/dataset.h"
#include "talent/pipeline.h"

namespace talent::testing {

EndpointConfig TestVlm();  // "vlm", qwen2.5-vl-3b-instruct, 3B
EndpointConfig TestLlm();  // "llm", qwen2.5-7b-instruct, 7B

// A checked-in fixture (tests/data/<name>) wired to an in-process scripted
// model whose rules come from <name>/script.json.
struct ScriptedEnv {
  DatasetManifest manifest;
  std::shared_ptr<ScriptedModel> model;
  std::shared_ptr<ScriptedTransport> transport;
  std::shared_ptr<ModelClient> client;
  std::shared_ptr<Pipeline> pipeline;
};

ScriptedEnv MakeScriptedEnv(const std::string& fixture,
                            const ResolutionPreset& preset = {});

// RunConfig over the fixture with the test endpoints and the given
// transport settings.
RunConfig FixtureConfig(const std::string& fixture);

}  // namespace talent::testing

#endif  // TALENT_TESTS_SUPPORT_FIXTURE_ENV_H_
