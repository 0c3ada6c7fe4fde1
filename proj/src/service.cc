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

#include <atomic>

#include "httplib.h"
#include "talent/error.h"
#include "talent/imaging.h"
#include "talent/util.h"

namespace talent {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Service::Session {
  struct Turn {
    std::string question;
    StrategyKind strategy;
    std::string answer;
    ordered_json trace;
  };

  std::string id;
  std::string created_at;
  std::string image_base64;  // as uploaded, for persistence
  ImageBuffer image;         // decoded, native size
  ResolutionPreset resolution;
  std::optional<DualRepresentation> dual;
  std::vector<Turn> history;
  int vlm_calls = 0;
  int llm_calls = 0;
  std::chrono::steady_clock::time_point last_used;
  std::mutex mu;  // serializes requests within the session
};

struct Service::Run {
  enum class State { kPending, kRunning, kDone, kFailed };

  std::string id;
  RunConfig config;
  std::shared_ptr<DatasetManifest> manifest;
  std::atomic<State> state{State::kPending};
  std::atomic<std::size_t> completed{0};
  std::atomic<std::size_t> total{0};
  std::mutex mu;  // guards error and report
  std::string error;
  std::optional<EvalReport> report;
};

namespace {

std::string_view StateName(int s) {
  static constexpr std::string_view kNames[] = {"pending", "running", "done",
                                                "failed"};
  return kNames[s];
}

int StatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParse:
    case ErrorCode::kDecode:
    case ErrorCode::kPrecondition:
    case ErrorCode::kDanglingReference:
    case ErrorCode::kDuplicateId:
    case ErrorCode::kMissingFile:
      return 400;
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kConflict:
      return 409;
    case ErrorCode::kRetryable:
    case ErrorCode::kRetriesExhausted:
    case ErrorCode::kUpstream:
    case ErrorCode::kReplayMiss:
    case ErrorCode::kEmptyCompletion:
      return 502;
    default:
      return 500;
  }
}

std::string ErrorBody(std::string_view code, const std::string& message) {
  ordered_json j;
  j["code"] = code;
  j["message"] = message;
  return j.dump();
}

json ParseBody(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json j = json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::kParse, "request body must be a JSON object");
  }
  return j;
}

std::string RequireString(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_string() || it->get<std::string>().empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("'") + key + "' is required");
  }
  return it->get<std::string>();
}

std::vector<std::uint8_t> DecodeImagePayload(std::string payload) {
  if (payload.rfind("data:", 0) == 0) {
    const auto comma = payload.find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorCode::kDecode, "malformed data URL");
    }
    payload.erase(0, comma + 1);
  }
  return Base64Decode(payload);
}

StrategyKind AskStrategy(const json& body) {
  auto it = body.find("strategy");
  if (it == body.end() || it->is_null()) return StrategyKind::kTalent;
  if (!it->is_string()) {
    throw Error(ErrorCode::kInvalidArgument, "'strategy' must be a string");
  }
  const StrategyKind s = ParseStrategy(it->get<std::string>());
  if (s != StrategyKind::kTalent && s != StrategyKind::kGeneratedOcr &&
      s != StrategyKind::kLanguageDescription) {
    throw Error(ErrorCode::kInvalidArgument,
                "strategy '" + std::string(ToString(s)) +
                    "' cannot reuse a session's representations; use a batch run");
  }
  return s;
}

}  // namespace

Service::Service(ServiceOptions options) : options_(std::move(options)) {
  if (!options_.now) options_.now = [] { return std::chrono::steady_clock::now(); };
  harness_ = BuildHarness(options_.base_config, options_.wire);
  if (options_.session_dir) fs::create_directories(*options_.session_dir);
  server_ = std::make_unique<httplib::Server>();
  Mount();
}

Service::~Service() {
  Stop();
  std::vector<std::thread> threads;
  {
    std::lock_guard<std::mutex> lock(runs_mu_);
    threads.swap(run_threads_);
  }
  for (auto& t : threads) {
    if (t.joinable()) t.join();
  }
}

int Service::Start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
  } else if (!server_->bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) {
    throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  }
  server_thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void Service::ListenBlocking(const std::string& host, int port) {
  if (!server_->listen(host, port)) {
    throw Error(ErrorCode::kIo, "cannot listen on " + host + ":" + std::to_string(port));
  }
}

void Service::Stop() {
  if (server_) server_->stop();
  if (server_thread_.joinable()) server_thread_.join();
}

void Service::Mount() {
  auto& srv = *server_;
  const std::string origin = options_.cors_origin;

  srv.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
    if (origin.empty()) return;
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
  srv.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });

  // Every handler returns (status, JSON text); errors become {code, message}.
  using Handler = std::function<std::pair<int, std::string>(const httplib::Request&)>;
  auto wrap = [](Handler h) {
    return [h](const httplib::Request& req, httplib::Response& res) {
      try {
        auto [status, body] = h(req);
        res.status = status;
        res.set_content(body, "application/json");
      } catch (const Error& e) {
        res.status = StatusFor(e.code());
        res.set_content(ErrorBody(ErrorCodeName(e.code()), e.what()),
                        "application/json");
      } catch (const std::exception& e) {
        res.status = 500;
        res.set_content(ErrorBody("internal", e.what()), "application/json");
      }
    };
  };

  srv.Get("/v1/healthz", wrap([](const httplib::Request&) {
            return std::pair{200, std::string(R"({"status":"ok"})")};
          }));
  srv.Post("/v1/sessions", wrap([this](const httplib::Request& req) {
             return std::pair{201, CreateSession(ParseBody(req)).dump()};
           }));
  srv.Get(R"(/v1/sessions/([^/]+))", wrap([this](const httplib::Request& req) {
            return std::pair{200, SessionSummary(req.matches[1]).dump()};
          }));
  srv.Post(R"(/v1/sessions/([^/]+)/ask)", wrap([this](const httplib::Request& req) {
             return std::pair{200, Ask(req.matches[1], ParseBody(req)).dump()};
           }));
  srv.Post(R"(/v1/sessions/([^/]+)/resolution)",
           wrap([this](const httplib::Request& req) {
             return std::pair{200,
                              ChangeResolution(req.matches[1], ParseBody(req)).dump()};
           }));
  srv.Post("/v1/runs", wrap([this](const httplib::Request& req) {
             return std::pair{202, LaunchRun(ParseBody(req)).dump()};
           }));
  srv.Get(R"(/v1/runs/([^/]+))", wrap([this](const httplib::Request& req) {
            return std::pair{200, RunState(req.matches[1]).dump()};
          }));
  srv.Get(R"(/v1/runs/([^/]+)/report)", wrap([this](const httplib::Request& req) {
            return std::pair{200, RunReport(req.matches[1])};
          }));

  srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    const std::string code = res.status == 404 ? "not_found" : "http_error";
    res.set_content(ErrorBody(code, "HTTP " + std::to_string(res.status)),
                    "application/json");
  });
}

void Service::Expire() {
  const auto now = options_.now();
  std::vector<std::string> gone;
  {
    std::lock_guard<std::mutex> lock(sessions_mu_);
    for (auto it = sessions_.begin(); it != sessions_.end();) {
      if (now - it->second->last_used > options_.session_ttl) {
        gone.push_back(it->first);
        it = sessions_.erase(it);
      } else {
        ++it;
      }
    }
  }
  if (options_.session_dir) {
    for (const auto& id : gone) {
      std::error_code ec;
      fs::remove(*options_.session_dir / (id + ".json"), ec);
    }
  }
}

std::shared_ptr<Service::Session> Service::FindSession(const std::string& id) {
  Expire();
  {
    std::lock_guard<std::mutex> lock(sessions_mu_);
    auto it = sessions_.find(id);
    if (it != sessions_.end()) {
      it->second->last_used = options_.now();
      return it->second;
    }
  }
  if (auto loaded = LoadPersisted(id)) return loaded;
  throw Error(ErrorCode::kNotFound, "unknown or expired session '" + id + "'");
}

void Service::Persist(const Session& s) const {
  if (!options_.session_dir) return;
  ordered_json j;
  j["session_id"] = s.id;
  j["created_at"] = s.created_at;
  j["resolution"] = ToString(s.resolution.target);
  j["image_base64"] = s.image_base64;
  if (s.dual) {
    j["dual"] = {{"ocr_markdown", s.dual->ocr_markdown},
                 {"narration", s.dual->narration}};
  }
  ordered_json history = ordered_json::array();
  for (const auto& t : s.history) {
    history.push_back({{"question", t.question},
                       {"strategy", ToString(t.strategy)},
                       {"answer", t.answer},
                       {"trace", t.trace}});
  }
  j["history"] = std::move(history);
  j["vlm_calls"] = s.vlm_calls;
  j["llm_calls"] = s.llm_calls;
  WriteFileAtomic(*options_.session_dir / (s.id + ".json"), j.dump(2) + "\n");
}

std::shared_ptr<Service::Session> Service::LoadPersisted(const std::string& id) {
  if (!options_.session_dir) return nullptr;
  // Ids are hex; anything else cannot name a file we wrote.
  if (id.empty() || id.find_first_not_of("0123456789abcdef") != std::string::npos) {
    return nullptr;
  }
  const fs::path path = *options_.session_dir / (id + ".json");
  std::error_code ec;
  if (!fs::exists(path, ec)) return nullptr;
  json j = json::parse(ReadFile(path), nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorCode::kCorrupt, "session file " + path.string() + " is corrupt");
  }
  auto s = std::make_shared<Session>();
  try {
    s->id = id;
    s->created_at = j.at("created_at").get<std::string>();
    s->image_base64 = j.at("image_base64").get<std::string>();
    s->image = DecodeImage(DecodeImagePayload(s->image_base64), "session " + id);
    s->resolution = options_.base_config.resolution;
    s->resolution.target =
        ParseResolution(j.at("resolution").get<std::string>()).target;
    if (j.contains("dual")) {
      s->dual = DualRepresentation{j["dual"].at("ocr_markdown").get<std::string>(),
                                   j["dual"].at("narration").get<std::string>()};
    }
    for (const auto& t : j.at("history")) {
      s->history.push_back({t.at("question").get<std::string>(),
                            ParseStrategy(t.at("strategy").get<std::string>()),
                            t.at("answer").get<std::string>(), t.at("trace")});
    }
    s->vlm_calls = j.value("vlm_calls", 0);
    s->llm_calls = j.value("llm_calls", 0);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kCorrupt, "session file " + path.string() + ": " + e.what());
  }
  s->last_used = options_.now();
  std::lock_guard<std::mutex> lock(sessions_mu_);
  auto [it, inserted] = sessions_.emplace(id, s);
  return it->second;
}

ordered_json Service::CreateSession(const json& body) {
  Expire();
  auto s = std::make_shared<Session>();
  s->image_base64 = RequireString(body, "image_base64");
  s->image = DecodeImage(DecodeImagePayload(s->image_base64), "uploaded image");
  s->resolution = options_.base_config.resolution;
  if (body.contains("resolution") && !body["resolution"].is_null()) {
    if (!body["resolution"].is_string()) {
      throw Error(ErrorCode::kInvalidArgument, "'resolution' must be a string");
    }
    s->resolution.target = ParseResolution(body["resolution"].get<std::string>()).target;
  }

  // The session is only stored once the dual representation exists.
  PipelineTrace trace;
  s->dual = harness_.pipeline->BuildDual(ResizeToPreset(s->image, s->resolution),
                                         &trace);
  s->vlm_calls = trace.vlm_calls();
  s->id = RandomHexId();
  s->created_at = UtcTimestamp();
  s->last_used = options_.now();
  Persist(*s);
  {
    std::lock_guard<std::mutex> lock(sessions_mu_);
    sessions_[s->id] = s;
  }

  ordered_json out;
  out["session_id"] = s->id;
  out["resolution"] = ToString(s->resolution.target);
  out["ocr_markdown"] = s->dual->ocr_markdown;
  out["narration"] = s->dual->narration;
  out["trace"] = trace.ToJson();
  return out;
}

ordered_json Service::Ask(const std::string& id, const json& body) {
  auto s = FindSession(id);
  const std::string question = RequireString(body, "question");
  const StrategyKind strategy = AskStrategy(body);

  std::lock_guard<std::mutex> lock(s->mu);
  if (!s->dual) {
    throw Error(ErrorCode::kPrecondition, "session has no dual representation");
  }
  PipelineTrace trace;
  const QaSlots slots = Pipeline::SlotsFor(strategy, *s->dual, std::nullopt, question);
  std::string answer = harness_.pipeline->Reason(slots, &trace);

  s->llm_calls += trace.llm_calls();
  s->history.push_back({question, strategy, answer, trace.ToJson()});
  Persist(*s);

  ordered_json out;
  out["answer"] = answer;
  out["strategy"] = ToString(strategy);
  out["trace"] = trace.ToJson();
  out["history_length"] = s->history.size();
  return out;
}

ordered_json Service::SessionSummary(const std::string& id) {
  auto s = FindSession(id);
  std::lock_guard<std::mutex> lock(s->mu);
  ordered_json out;
  out["session_id"] = s->id;
  out["created_at"] = s->created_at;
  out["resolution"] = ToString(s->resolution.target);
  out["image"] = {{"width", s->image.width}, {"height", s->image.height}};
  if (s->dual) {
    out["ocr_markdown"] = s->dual->ocr_markdown;
    out["narration"] = s->dual->narration;
  }
  ordered_json history = ordered_json::array();
  for (const auto& t : s->history) {
    history.push_back({{"question", t.question},
                       {"strategy", ToString(t.strategy)},
                       {"answer", t.answer},
                       {"trace", t.trace}});
  }
  out["history"] = std::move(history);
  out["totals"] = {{"vlm_calls", s->vlm_calls}, {"llm_calls", s->llm_calls}};
  return out;
}

ordered_json Service::ChangeResolution(const std::string& id, const json& body) {
  auto s = FindSession(id);
  const ResolutionPreset requested = ParseResolution(RequireString(body, "resolution"));
  std::lock_guard<std::mutex> lock(s->mu);
  PipelineTrace trace;
  if (requested.target != s->resolution.target || !s->dual) {
    ResolutionPreset next = s->resolution;
    next.target = requested.target;
    s->dual = harness_.pipeline->BuildDual(ResizeToPreset(s->image, next), &trace);
    s->resolution = next;
    s->vlm_calls += trace.vlm_calls();
    Persist(*s);
  }
  ordered_json out;
  out["session_id"] = s->id;
  out["resolution"] = ToString(s->resolution.target);
  out["ocr_markdown"] = s->dual->ocr_markdown;
  out["narration"] = s->dual->narration;
  out["trace"] = trace.ToJson();
  return out;
}

ordered_json Service::LaunchRun(const json& body) {
  const json& spec = body.contains("spec") ? body["spec"] : body;
  auto run = std::make_shared<Run>();
  run->config = options_.base_config;
  ApplyJson(run->config, spec, "run spec");
  run->config.Validate();
  if (run->config.manifest.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "run spec needs a manifest");
  }
  run->manifest = std::make_shared<DatasetManifest>(LoadManifest(run->config.manifest));
  const auto items = SelectItems(*run->manifest, run->config.selection());
  CheckStrategiesAgainstItems(run->config, items);
  run->total = items.size() * run->config.strategies.size();
  auto harness = std::make_shared<Harness>(BuildHarness(run->config, options_.wire));
  run->id = RandomHexId();

  std::lock_guard<std::mutex> lock(runs_mu_);
  runs_[run->id] = run;
  run_threads_.emplace_back([run, harness] {
    run->state = Run::State::kRunning;
    try {
      RunResult result = ExecuteRun(
          run->config, *run->manifest, *harness,
          [&](std::size_t done, std::size_t total) {
            run->total = total;
            // Progress only moves forward even if callbacks interleave.
            std::size_t prev = run->completed.load();
            while (prev < done && !run->completed.compare_exchange_weak(prev, done)) {
            }
          });
      std::lock_guard<std::mutex> rlock(run->mu);
      if (result.report) {
        run->report = std::move(result.report);
        run->completed = run->total.load();
        run->state = Run::State::kDone;
      } else {
        run->error = result.report_error.value_or("nothing to score");
        run->state = Run::State::kFailed;
      }
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> rlock(run->mu);
      run->error = e.what();
      run->state = Run::State::kFailed;
    }
  });

  ordered_json out;
  out["run_id"] = run->id;
  out["state"] = "pending";
  out["total"] = run->total.load();
  return out;
}

ordered_json Service::RunState(const std::string& id) {
  std::shared_ptr<Run> run;
  {
    std::lock_guard<std::mutex> lock(runs_mu_);
    auto it = runs_.find(id);
    if (it == runs_.end()) throw Error(ErrorCode::kNotFound, "unknown run '" + id + "'");
    run = it->second;
  }
  const auto state = run->state.load();
  const std::size_t done = run->completed.load();
  const std::size_t total = run->total.load();
  ordered_json out;
  out["run_id"] = run->id;
  out["state"] = StateName(static_cast<int>(state));
  out["completed"] = done;
  out["total"] = total;
  out["progress"] = total == 0 ? 0.0 : static_cast<double>(done) / total;
  std::lock_guard<std::mutex> lock(run->mu);
  if (state == Run::State::kFailed) out["error"] = run->error;
  if (run->report) {
    out["overall"] = {{"correct", run->report->overall.correct},
                      {"total", run->report->overall.total},
                      {"accuracy", run->report->overall.percent()}};
    ordered_json failures = ordered_json::array();
    for (const auto& f : run->report->failures) {
      failures.push_back({{"qa_id", f.qa_id},
                          {"strategy", ToString(f.strategy)},
                          {"error", f.error}});
    }
    out["failures"] = std::move(failures);
  }
  return out;
}

std::string Service::RunReport(const std::string& id) {
  std::shared_ptr<Run> run;
  {
    std::lock_guard<std::mutex> lock(runs_mu_);
    auto it = runs_.find(id);
    if (it == runs_.end()) throw Error(ErrorCode::kNotFound, "unknown run '" + id + "'");
    run = it->second;
  }
  std::lock_guard<std::mutex> lock(run->mu);
  if (run->state.load() != Run::State::kDone || !run->report) {
    throw Error(ErrorCode::kConflict,
                "run '" + id + "' is " +
                    std::string(StateName(static_cast<int>(run->state.load()))) +
                    "; the report exists once it is done");
  }
  return ReportToJson(*run->report);
}

}  // namespace talent
