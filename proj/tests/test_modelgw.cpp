#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <thread>

#include <httplib.h>

#include "cateval/corpus.hpp"
#include "cateval/errors.hpp"
#include "cateval/modelgw.hpp"
#include "cateval/pairgen.hpp"
#include "cateval/taskgen.hpp"

using namespace cateval;
using namespace cateval::modelgw;

namespace {

std::filesystem::path fixture(const char* name) {
  return std::filesystem::path(CATEVAL_FIXTURE_DIR) / name;
}

std::vector<taskgen::TaskInstance> translation_tasks(std::size_t count = 6) {
  auto objects = corpus::read_corpus(fixture("python_multisolution_mini.jsonl"));
  std::vector<corpus::CodeObject> some;
  for (const auto& obj : objects) {
    if (some.size() >= count) break;
    some.push_back(obj);
    some.back().language = "python";
  }
  taskgen::PromptTemplate tpl;
  for (const auto& t : taskgen::builtin_templates())
    if (t.task_kind == taskgen::TaskKind::Translation) tpl = t;
  return taskgen::build_translation_tasks(some, "python", "javascript", tpl);
}

/// Local chat-completions endpoint with programmable behaviour.
class FakeEndpoint {
 public:
  explicit FakeEndpoint(int fail_first_n = 0, int status_on_fail = 500,
                        int delay_ms = 0) {
    server_.Post("/v1/chat/completions", [this, fail_first_n, status_on_fail,
                                          delay_ms](const httplib::Request& req,
                                                    httplib::Response& res) {
      int now = concurrent_.fetch_add(1) + 1;
      int snapshot = max_concurrent_.load();
      while (now > snapshot && !max_concurrent_.compare_exchange_weak(snapshot, now)) {
      }
      if (delay_ms > 0)
        std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
      int n = hits_.fetch_add(1) + 1;
      if (n <= fail_first_n) {
        res.status = status_on_fail;
        res.set_content("overloaded", "text/plain");
      } else {
        json body = json::parse(req.body);
        std::string user = body["messages"].back()["content"];
        json reply{{"choices",
                    json::array({json{{"message",
                                       {{"role", "assistant"},
                                        {"content", "echo:" + std::to_string(user.size())}}}}})}};
        res.set_content(reply.dump(), "application/json");
      }
      concurrent_.fetch_sub(1);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this]() { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
  }
  int hits() const { return hits_.load(); }
  int max_concurrent() const { return max_concurrent_.load(); }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> hits_{0};
  std::atomic<int> concurrent_{0};
  std::atomic<int> max_concurrent_{0};
};

ModelSpec http_spec(const std::string& endpoint, int parallelism = 4) {
  ModelSpec spec;
  spec.id = "fake";
  spec.adapter = Adapter::chat_http;
  spec.endpoint = endpoint;
  spec.model_name = "fake-model";
  spec.parallelism = parallelism;
  spec.retry.backoff_ms = 10;
  return spec;
}

struct WithApiKey {
  WithApiKey() { ::setenv("CATEVAL_API_KEY", "test-key", 1); }
  ~WithApiKey() { ::unsetenv("CATEVAL_API_KEY"); }
};

}  // namespace

TEST_CASE("modelgw: stub_constant_true answers True for everything") {
  auto tasks = translation_tasks();
  ModelSpec spec;
  spec.adapter = Adapter::stub_constant_true;
  auto responses = dispatch(tasks, spec);
  REQUIRE(responses.size() == tasks.size());
  for (std::size_t i = 0; i < responses.size(); ++i) {
    CHECK(responses[i].task_id == tasks[i].id);
    CHECK(responses[i].raw_text == "True");
    CHECK(responses[i].status == ResponseStatus::ok);
  }
}

TEST_CASE("modelgw: stub_identity echoes the embedded code verbatim") {
  auto tasks = translation_tasks();
  ModelSpec spec;
  spec.adapter = Adapter::stub_identity;
  auto responses = dispatch(tasks, spec);
  for (std::size_t i = 0; i < tasks.size(); ++i)
    CHECK(responses[i].raw_text == tasks[i].payload["code"].get<std::string>());
}

TEST_CASE("modelgw: stubs are deterministic across runs") {
  auto tasks = translation_tasks();
  ModelSpec spec;
  spec.adapter = Adapter::stub_identity;
  auto a = dispatch(tasks, spec);
  auto b = dispatch(tasks, spec);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].raw_text == b[i].raw_text);
}

TEST_CASE("modelgw: execution oracle judges pairs by running both sides") {
  auto objects = corpus::read_corpus(fixture("python_multisolution_mini.jsonl"));
  auto built = pairgen::build_global_pairs(objects, 3, {});
  taskgen::PromptTemplate tpl;
  for (const auto& t : taskgen::builtin_templates())
    if (t.task_kind == taskgen::TaskKind::MorphismIdentification) tpl = t;
  auto tasks = taskgen::build_identification_tasks(built.pairs, tpl);

  ModelSpec spec;
  spec.adapter = Adapter::stub_execution_oracle;
  DispatchOptions opts;
  opts.exec_passes = [](const corpus::CodeObject& obj) {
    return std::optional<bool>(obj.verdict == corpus::SolutionVerdict::correct);
  };
  auto responses = dispatch(tasks, spec, opts);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    REQUIRE(responses[i].status == ResponseStatus::ok);
    bool truth_eq = built.pairs[i].label == pairgen::PairLabel::equivalent;
    CHECK(responses[i].raw_text == (truth_eq ? "True" : "False"));
  }
}

TEST_CASE("modelgw: execution oracle translation emits the canonical solution") {
  auto tasks = translation_tasks(2);
  auto oracle = corpus::read_corpus(fixture("python_multisolution_mini.jsonl"));
  ModelSpec spec;
  spec.adapter = Adapter::stub_execution_oracle;
  DispatchOptions opts;
  opts.oracle_corpus = &oracle;
  auto responses = dispatch(tasks, spec, opts);
  REQUIRE(responses[0].status == ResponseStatus::ok);
  CHECK(responses[0].raw_text.find("```") == 0);
  CHECK(responses[0].raw_text.find("def ") != std::string::npos);
}

TEST_CASE("modelgw: http adapter round trip with bounded parallelism") {
  WithApiKey key;
  FakeEndpoint server(0, 500, 40);
  auto tasks = translation_tasks(6);

  auto responses = dispatch(tasks, http_spec(server.endpoint(), 2));
  REQUIRE(responses.size() == tasks.size());
  for (std::size_t i = 0; i < responses.size(); ++i) {
    CHECK(responses[i].status == ResponseStatus::ok);
    CHECK(responses[i].task_id == tasks[i].id);
    CHECK(responses[i].raw_text.rfind("echo:", 0) == 0);
  }
  CHECK(server.max_concurrent() <= 2);
  CHECK(server.hits() == static_cast<int>(tasks.size()));
}

TEST_CASE("modelgw: retries recover from transient server errors") {
  WithApiKey key;
  FakeEndpoint server(2, 500);  // first two requests fail
  auto tasks = translation_tasks(1);
  ModelSpec spec = http_spec(server.endpoint(), 1);
  spec.retry.max_attempts = 4;
  auto responses = dispatch(tasks, spec);
  REQUIRE(responses.size() == 1);
  CHECK(responses[0].status == ResponseStatus::ok);
  CHECK(responses[0].attempt_count == 3);
}

TEST_CASE("modelgw: exhausted rate limits are recorded, never dropped") {
  WithApiKey key;
  FakeEndpoint server(1000, 429);
  auto tasks = translation_tasks(2);
  ModelSpec spec = http_spec(server.endpoint(), 2);
  spec.retry.max_attempts = 2;
  auto responses = dispatch(tasks, spec);
  REQUIRE(responses.size() == 2);
  for (const auto& r : responses) {
    CHECK(r.status == ResponseStatus::rate_limited_exhausted);
    CHECK(r.attempt_count == 2);
  }
}

TEST_CASE("modelgw: journal resume skips completed tasks") {
  WithApiKey key;
  auto tasks = translation_tasks(4);
  auto journal = std::filesystem::temp_directory_path() / "cateval-journal.jsonl";
  std::filesystem::remove(journal);

  {
    FakeEndpoint server;
    DispatchOptions opts;
    opts.journal = journal;
    auto first = dispatch(tasks, http_spec(server.endpoint()), opts);
    CHECK(server.hits() == 4);
  }
  {
    FakeEndpoint server;
    DispatchOptions opts;
    opts.journal = journal;
    auto second = dispatch(tasks, http_spec(server.endpoint()), opts);
    CHECK(server.hits() == 0);  // everything came from the journal
    for (std::size_t i = 0; i < second.size(); ++i) {
      CHECK(second[i].status == ResponseStatus::ok);
      CHECK(second[i].task_id == tasks[i].id);
    }
  }
  std::filesystem::remove(journal);
}

TEST_CASE("modelgw: missing credential is fatal for http adapters") {
  ::unsetenv("CATEVAL_API_KEY");
  auto tasks = translation_tasks(1);
  CHECK_THROWS_AS(dispatch(tasks, http_spec("http://127.0.0.1:1/v1")), EnvironmentError);
}

TEST_CASE("modelgw: invalid specs are configuration errors") {
  auto tasks = translation_tasks(1);
  ModelSpec no_endpoint;
  no_endpoint.adapter = Adapter::chat_http;
  CHECK_THROWS_AS(dispatch(tasks, no_endpoint), ConfigError);

  ModelSpec stub_with_endpoint;
  stub_with_endpoint.adapter = Adapter::stub_constant_true;
  stub_with_endpoint.endpoint = "http://example.invalid";
  CHECK_THROWS_AS(dispatch(tasks, stub_with_endpoint), ConfigError);

  ModelSpec bad_parallel;
  bad_parallel.adapter = Adapter::stub_constant_true;
  bad_parallel.parallelism = 0;
  CHECK_THROWS_AS(dispatch(tasks, bad_parallel), ConfigError);
}

TEST_CASE("modelgw: response bijection holds under mixed failures") {
  WithApiKey key;
  FakeEndpoint server(3, 503);  // first three hits fail; with retries disabled some
                                // tasks end in api_error, later ones succeed
  auto tasks = translation_tasks(6);
  ModelSpec spec = http_spec(server.endpoint(), 3);
  spec.retry.max_attempts = 1;
  auto responses = dispatch(tasks, spec);
  REQUIRE(responses.size() == tasks.size());
  int ok = 0, failed = 0;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    CHECK(responses[i].task_id == tasks[i].id);
    (responses[i].status == ResponseStatus::ok ? ok : failed)++;
  }
  CHECK(ok + failed == 6);
  CHECK(failed == 3);
}

TEST_CASE("modelgw: model spec json round trip") {
  ModelSpec spec;
  spec.id = "gpt-like";
  spec.adapter = Adapter::chat_http;
  spec.endpoint = "https://api.example.com/v1/chat/completions";
  spec.model_name = "gpt-like-001";
  spec.config = json{{"temperature", 0.2}};
  auto back = model_spec_from_json(to_json(spec));
  CHECK(back.id == spec.id);
  CHECK(back.adapter == spec.adapter);
  CHECK(back.endpoint == spec.endpoint);
  CHECK(back.config == spec.config);
}
