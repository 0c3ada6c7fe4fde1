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

#include "talent/service.h"

#include <gtest/gtest.h>
#include <httplib.h>

#include <atomic>
#include <condition_variable>
#include <thread>

#include "fixture_env.h"
#include "talent/error.h"
#include "talent/util.h"
#include "test_paths.h"

namespace talent {
namespace {

using json = nlohmann::json;
using testing::TempDir;
using testing::TestData;

// Holds every upstream call until Open().
class GateTransport : public Transport {
 public:
  explicit GateTransport(TransportHandle inner) : inner_(std::move(inner)) {}
  ChatResponse Send(const ChatRequest& request, const std::string& digest) override {
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait(lock, [&] { return open_; });
    lock.unlock();
    return inner_->Send(request, digest);
  }
  void Open() {
    std::lock_guard<std::mutex> lock(mu_);
    open_ = true;
    cv_.notify_all();
  }

 private:
  TransportHandle inner_;
  std::mutex mu_;
  std::condition_variable cv_;
  bool open_ = false;
};

std::string ImageBase64(const std::string& table_id) {
  const std::string bytes = ReadFile(TestData("mini/images/" + table_id + ".png"));
  return Base64Encode(std::string_view(bytes));
}

std::shared_ptr<testing::ScriptedModel> MiniModel() {
  const auto manifest = LoadManifest(TestData("mini/manifest.jsonl"));
  auto model = testing::ScriptedModel::FromFile(TestData("mini/script.json"));
  model->LabelManifestImages(manifest, ParseResolution("r1024"));
  model->LabelManifestImages(manifest, ParseResolution("r512"));
  return model;
}

RunConfig BaseConfig() {
  RunConfig c = testing::FixtureConfig("mini");
  c.vlm.base_url = "http://127.0.0.1:9/v1";
  c.llm.base_url = "http://127.0.0.1:9/v1";
  return c;
}

struct Fixture {
  explicit Fixture(std::function<void(ServiceOptions&)> tweak = nullptr,
                   std::shared_ptr<testing::ScriptedModel> model = MiniModel()) {
    scripted = std::make_shared<testing::ScriptedTransport>(std::move(model));
    ServiceOptions o;
    o.base_config = BaseConfig();
    o.wire = scripted;
    if (tweak) tweak(o);
    service = std::make_unique<Service>(std::move(o));
    port = service->Start("127.0.0.1", 0);
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
    client->set_read_timeout(30, 0);
  }

  std::pair<int, json> Post(const std::string& path, const json& body) {
    auto res = client->Post(path, body.dump(), "application/json");
    if (!res) return {0, nullptr};
    return {res->status, json::parse(res->body, nullptr, false)};
  }
  std::pair<int, json> Get(const std::string& path) {
    auto res = client->Get(path);
    if (!res) return {0, nullptr};
    return {res->status, json::parse(res->body, nullptr, false)};
  }
  std::string NewSession(const std::string& table = "t01") {
    auto [status, body] = Post("/v1/sessions", {{"image_base64", ImageBase64(table)}});
    EXPECT_EQ(status, 201) << body.dump();
    return body.value("session_id", "");
  }
  json WaitForRun(const std::string& id) {
    for (int i = 0; i < 600; ++i) {
      auto [status, body] = Get("/v1/runs/" + id);
      EXPECT_EQ(status, 200);
      if (body["state"] == "done" || body["state"] == "failed") return body;
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    ADD_FAILURE() << "run did not finish";
    return nullptr;
  }

  std::shared_ptr<testing::ScriptedTransport> scripted;
  std::unique_ptr<Service> service;
  int port = 0;
  std::unique_ptr<httplib::Client> client;
};

TEST(Service, Healthz) {
  Fixture f;
  auto [status, body] = f.Get("/v1/healthz");
  EXPECT_EQ(status, 200);
  EXPECT_EQ(body["status"], "ok");
}

TEST(Service, CreateSessionBuildsTheDualRepresentationOnce) {
  Fixture f;
  auto [status, body] =
      f.Post("/v1/sessions", {{"image_base64", "data:image/png;base64," + ImageBase64("t01")}});
  ASSERT_EQ(status, 201) << body.dump();
  EXPECT_EQ(body["resolution"], "r1024");
  EXPECT_EQ(body["ocr_markdown"], "| Year | Revenue (in millions) |\n|---|---|\n| 2019 | 4,124 |");
  EXPECT_NE(body["narration"].get<std::string>().find("Table t01"), std::string::npos);
  EXPECT_EQ(body["trace"]["stages"].size(), 2u);
  EXPECT_EQ(f.scripted->calls(), 2);
  EXPECT_EQ(body["session_id"].get<std::string>().size(), 32u);
}

TEST(Service, CachedSessionCreationMakesNoUpstreamCalls) {
  TempDir cache;
  Fixture f([&](ServiceOptions& o) { o.base_config.cache_dir = cache.path(); });
  const std::string a = f.NewSession();
  EXPECT_EQ(f.scripted->calls(), 2);
  const std::string b = f.NewSession();
  EXPECT_EQ(f.scripted->calls(), 2);
  EXPECT_NE(a, b);
}

TEST(Service, RejectsBadUploads) {
  Fixture f;
  auto [s1, b1] = f.Post("/v1/sessions", {{"image_base64", ImageBase64("t01").substr(0, 200)}});
  EXPECT_EQ(s1, 400);
  EXPECT_EQ(b1["code"], "decode_error");
  const std::string junk = "bm90IGFuIGltYWdl";  // "not an image"
  EXPECT_EQ(f.Post("/v1/sessions", {{"image_base64", junk}}).first, 400);
  EXPECT_EQ(f.Post("/v1/sessions", {{"image_base64", "%%%"}}).first, 400);
  auto [s2, b2] = f.Post("/v1/sessions", json::object());
  EXPECT_EQ(s2, 400);
  EXPECT_NE(b2["message"].get<std::string>().find("image_base64"), std::string::npos);
  auto res = f.client->Post("/v1/sessions", "{not json", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  EXPECT_EQ(json::parse(res->body)["code"], "parse_error");
  EXPECT_EQ(f.scripted->calls(), 0);
}

TEST(Service, AskReusesTheSessionRepresentations) {
  Fixture f;
  const std::string id = f.NewSession();
  const int after_create = f.scripted->calls();

  auto [status, body] = f.Post("/v1/sessions/" + id + "/ask",
                               {{"question", "What was the revenue in 2019?"}});
  ASSERT_EQ(status, 200) << body.dump();
  EXPECT_EQ(body["answer"], "The revenue in 2019 was $4,124 million.");
  EXPECT_EQ(body["strategy"], "talent");
  EXPECT_EQ(body["history_length"], 1);
  ASSERT_EQ(body["trace"]["stages"].size(), 1u);
  EXPECT_EQ(body["trace"]["stages"][0]["stage"], "reason");
  EXPECT_EQ(f.scripted->calls(), after_create + 1);
  EXPECT_EQ(f.scripted->views().back().stage, "reason");

  auto [s2, b2] = f.Post("/v1/sessions/" + id + "/ask",
                         {{"question", "What was the revenue in 2019?"},
                          {"strategy", "generated_ocr"}});
  EXPECT_EQ(s2, 200);
  EXPECT_EQ(b2["history_length"], 2);
  EXPECT_EQ(f.scripted->views().back().user_text.find("## Table description"),
            std::string::npos);

  auto [s3, summary] = f.Get("/v1/sessions/" + id);
  EXPECT_EQ(s3, 200);
  ASSERT_EQ(summary["history"].size(), 2u);
  EXPECT_EQ(summary["history"][0]["strategy"], "talent");
  EXPECT_EQ(summary["history"][1]["strategy"], "generated_ocr");
  EXPECT_EQ(summary["totals"]["vlm_calls"], 2);
  EXPECT_EQ(summary["totals"]["llm_calls"], 2);
}

TEST(Service, AskErrors) {
  Fixture f;
  const std::string id = f.NewSession();
  auto [s1, b1] = f.Post("/v1/sessions/" + id + "/ask",
                         {{"question", "q"}, {"strategy", "direct_prompt"}});
  EXPECT_EQ(s1, 400);
  EXPECT_EQ(b1["code"], "invalid_argument");
  EXPECT_EQ(f.Post("/v1/sessions/" + id + "/ask",
                   {{"question", "q"}, {"strategy", "perfect_ocr"}}).first, 400);
  EXPECT_EQ(f.Post("/v1/sessions/" + id + "/ask", json::object()).first, 400);
  auto [s2, b2] = f.Post("/v1/sessions/ffff/ask", {{"question", "q"}});
  EXPECT_EQ(s2, 404);
  EXPECT_EQ(b2["code"], "not_found");
  EXPECT_EQ(f.Get("/v1/sessions/nope").first, 404);
  // No script rule matches this question: the upstream fails.
  auto [s3, b3] = f.Post("/v1/sessions/" + id + "/ask", {{"question", "unscripted?"}});
  EXPECT_EQ(s3, 502);
  EXPECT_EQ(b3["code"], "upstream_error");
}

TEST(Service, ResolutionChangeRecomputesOnlyWhenNeeded) {
  Fixture f;
  const std::string id = f.NewSession();
  EXPECT_EQ(f.scripted->calls(), 2);
  auto [s1, b1] = f.Post("/v1/sessions/" + id + "/resolution", {{"resolution", "r1024"}});
  EXPECT_EQ(s1, 200);
  EXPECT_EQ(f.scripted->calls(), 2);
  auto [s2, b2] = f.Post("/v1/sessions/" + id + "/resolution", {{"resolution", "r512"}});
  ASSERT_EQ(s2, 200) << b2.dump();
  EXPECT_EQ(b2["resolution"], "r512");
  EXPECT_EQ(f.scripted->calls(), 4);
  EXPECT_EQ(f.Get("/v1/sessions/" + id).second["totals"]["vlm_calls"], 4);
  EXPECT_EQ(f.Post("/v1/sessions/" + id + "/resolution", {{"resolution", "r2048"}}).first, 400);
}

TEST(Service, SessionsExpireAfterTheTtl) {
  TempDir dir;
  auto offset = std::make_shared<std::atomic<int>>(0);
  const auto start = std::chrono::steady_clock::now();
  Fixture f([&](ServiceOptions& o) {
    o.session_ttl = std::chrono::seconds(60);
    o.session_dir = dir.path();
    o.now = [=] { return start + std::chrono::seconds(offset->load()); };
  });
  const std::string id = f.NewSession();
  EXPECT_TRUE(std::filesystem::exists(dir / (id + ".json")));
  offset->store(59);
  EXPECT_EQ(f.Get("/v1/sessions/" + id).first, 200);
  offset->store(59 + 61);
  EXPECT_EQ(f.Get("/v1/sessions/" + id).first, 404);
  EXPECT_FALSE(std::filesystem::exists(dir / (id + ".json")));
}

TEST(Service, SessionsSurviveARestart) {
  TempDir dir;
  std::string id;
  {
    Fixture f([&](ServiceOptions& o) { o.session_dir = dir.path(); });
    id = f.NewSession();
    EXPECT_EQ(f.Post("/v1/sessions/" + id + "/ask",
                     {{"question", "What was the revenue in 2019?"}}).first, 200);
  }
  Fixture g([&](ServiceOptions& o) { o.session_dir = dir.path(); });
  auto [status, summary] = g.Get("/v1/sessions/" + id);
  ASSERT_EQ(status, 200);
  EXPECT_EQ(summary["history"].size(), 1u);
  EXPECT_EQ(summary["ocr_markdown"],
            "| Year | Revenue (in millions) |\n|---|---|\n| 2019 | 4,124 |");
  EXPECT_EQ(g.Post("/v1/sessions/" + id + "/ask",
                   {{"question", "What was the revenue in 2019?"}}).first, 200);
  EXPECT_EQ(g.scripted->calls(), 1);
}

TEST(Service, CorsHeaders) {
  Fixture f([](ServiceOptions& o) { o.cors_origin = "http://localhost:5173"; });
  auto res = f.client->Options("/v1/sessions");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 204);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "http://localhost:5173");
  auto health = f.client->Get("/v1/healthz");
  EXPECT_EQ(health->get_header_value("Access-Control-Allow-Origin"), "http://localhost:5173");
  EXPECT_EQ(f.Get("/v1/nothing-here").first, 404);
}

TEST(Service, BatchRunReachesDone) {
  Fixture f;
  auto [status, body] = f.Post(
      "/v1/runs", {{"spec", {{"manifest", TestData("mini/manifest.jsonl").string()},
                             {"strategies", "talent"}}}});
  ASSERT_EQ(status, 202) << body.dump();
  EXPECT_EQ(body["state"], "pending");
  EXPECT_EQ(body["total"], 10);
  const json done = f.WaitForRun(body["run_id"]);
  EXPECT_EQ(done["state"], "done") << done.dump();
  EXPECT_EQ(done["progress"], 1.0);
  EXPECT_EQ(done["completed"], 10);
  EXPECT_EQ(done["overall"]["total"], 10);
  // q03 needs numeric matching and q06 is answered wrongly.
  EXPECT_EQ(done["overall"]["correct"], 8);
  EXPECT_EQ(f.scripted->calls(), 30);

  auto res = f.client->Get("/v1/runs/" + body["run_id"].get<std::string>() + "/report");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const EvalReport report = ReportFromJson(res->body);
  EXPECT_EQ(report.overall, (Accuracy{8, 10}));
  EXPECT_EQ(report.run.transport, "live");
}

TEST(Service, ReportIsAConflictUntilTheRunIsDone) {
  std::shared_ptr<GateTransport> gate;
  Fixture f([&](ServiceOptions& o) {
    gate = std::make_shared<GateTransport>(o.wire);
    o.wire = gate;
  });
  auto [status, body] = f.Post("/v1/runs", {{"manifest", TestData("mini/manifest.jsonl").string()},
                                            {"limit", 2}});
  ASSERT_EQ(status, 202) << body.dump();
  const std::string id = body["run_id"];
  auto [s1, b1] = f.Get("/v1/runs/" + id + "/report");
  EXPECT_EQ(s1, 409);
  EXPECT_EQ(b1["code"], "conflict");
  auto [s2, running] = f.Get("/v1/runs/" + id);
  EXPECT_NE(running["state"], "done");
  EXPECT_LT(running["progress"].get<double>(), 1.0);
  gate->Open();
  EXPECT_EQ(f.WaitForRun(id)["state"], "done");
  EXPECT_EQ(f.Get("/v1/runs/" + id + "/report").first, 200);
}

TEST(Service, RunFailuresAreReportedNotFatal) {
  // Drop every rule for table t05 so its item fails upstream.
  auto model = std::make_shared<testing::ScriptedModel>();
  const auto doc = json::parse(ReadFile(TestData("mini/script.json")));
  for (const auto& r : doc["rules"]) {
    if (r.value("image", "") == "t05") continue;
    if (r.value("contains", "") == "How many units were outstanding?") continue;
    model->AddRule({r.contains("stage") ? std::optional(r["stage"].get<std::string>()) : std::nullopt,
                    r.contains("image") ? std::optional(r["image"].get<std::string>()) : std::nullopt,
                    r.contains("contains") ? std::optional(r["contains"].get<std::string>())
                                           : std::nullopt,
                    r["reply"].get<std::string>()});
  }
  model->LabelManifestImages(LoadManifest(TestData("mini/manifest.jsonl")), {});
  Fixture f(nullptr, model);
  auto [status, body] =
      f.Post("/v1/runs", {{"manifest", TestData("mini/manifest.jsonl").string()}});
  ASSERT_EQ(status, 202);
  const json done = f.WaitForRun(body["run_id"]);
  EXPECT_EQ(done["state"], "done");
  EXPECT_EQ(done["overall"]["total"], 9);
  ASSERT_EQ(done["failures"].size(), 1u);
  EXPECT_EQ(done["failures"][0]["qa_id"], "q05");
}

TEST(Service, RunSpecErrors) {
  Fixture f;
  EXPECT_EQ(f.Post("/v1/runs", {{"spec", {{"colour", "blue"}}}}).first, 400);
  EXPECT_EQ(f.Post("/v1/runs", {{"concurrency", 0}}).first, 400);
  auto [status, body] = f.Post("/v1/runs", {{"manifest", "/nonexistent/m.jsonl"}});
  EXPECT_EQ(status, 400) << body.dump();
  EXPECT_EQ(f.Get("/v1/runs/abc").first, 404);
  EXPECT_EQ(f.Get("/v1/runs/abc/report").first, 404);
}

}  // namespace
}  // namespace talent
