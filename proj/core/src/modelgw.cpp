#include "cateval/modelgw.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <memory>
#include <mutex>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include <httplib.h>

#include "cateval/errors.hpp"
#include "cateval/jsonl.hpp"
#include "cateval/pairgen.hpp"

namespace cateval::modelgw {

std::string to_string(Adapter a) {
  switch (a) {
    case Adapter::chat_http: return "chat_http";
    case Adapter::completion_http: return "completion_http";
    case Adapter::stub_identity: return "stub_identity";
    case Adapter::stub_constant_true: return "stub_constant_true";
    case Adapter::stub_execution_oracle: return "stub_execution_oracle";
  }
  return "?";
}

Adapter adapter_from_string(const std::string& s) {
  if (s == "chat_http") return Adapter::chat_http;
  if (s == "completion_http") return Adapter::completion_http;
  if (s == "stub_identity") return Adapter::stub_identity;
  if (s == "stub_constant_true") return Adapter::stub_constant_true;
  if (s == "stub_execution_oracle") return Adapter::stub_execution_oracle;
  throw ConfigError("unknown adapter: " + s);
}

bool is_stub(Adapter a) {
  return a == Adapter::stub_identity || a == Adapter::stub_constant_true ||
         a == Adapter::stub_execution_oracle;
}

ModelSpec model_spec_from_json(const json& rec) {
  ModelSpec spec;
  spec.id = rec.value("id", "stub");
  spec.adapter = adapter_from_string(rec.value("adapter", "stub_constant_true"));
  spec.endpoint = rec.value("endpoint", "");
  spec.model_name = rec.value("model_name", "");
  spec.max_tokens = rec.value("max_tokens", 500);
  if (rec.contains("config")) spec.config = rec["config"];
  spec.parallelism = rec.value("parallelism", 4);
  if (rec.contains("retry")) {
    spec.retry.max_attempts = rec["retry"].value("max_attempts", 3);
    spec.retry.backoff_ms = rec["retry"].value("backoff_ms", 200);
  }
  spec.api_key_env = rec.value("api_key_env", "CATEVAL_API_KEY");
  spec.system_prompt = rec.value("system_prompt", "");
  return spec;
}

json to_json(const ModelSpec& spec) {
  return json{{"id", spec.id},
              {"adapter", to_string(spec.adapter)},
              {"endpoint", spec.endpoint},
              {"model_name", spec.model_name},
              {"max_tokens", spec.max_tokens},
              {"config", spec.config},
              {"parallelism", spec.parallelism},
              {"retry", {{"max_attempts", spec.retry.max_attempts},
                         {"backoff_ms", spec.retry.backoff_ms}}},
              {"api_key_env", spec.api_key_env},
              {"system_prompt", spec.system_prompt}};
}

std::string to_string(ResponseStatus s) {
  switch (s) {
    case ResponseStatus::ok: return "ok";
    case ResponseStatus::api_error: return "api_error";
    case ResponseStatus::timeout: return "timeout";
    case ResponseStatus::rate_limited_exhausted: return "rate_limited_exhausted";
  }
  return "?";
}

namespace {

ResponseStatus status_from_string(const std::string& s) {
  if (s == "ok") return ResponseStatus::ok;
  if (s == "timeout") return ResponseStatus::timeout;
  if (s == "rate_limited_exhausted") return ResponseStatus::rate_limited_exhausted;
  return ResponseStatus::api_error;
}

}  // namespace

json to_json(const ModelResponse& r) {
  return json{{"task_id", r.task_id},
              {"raw_text", r.raw_text},
              {"latency_ms", r.latency_ms},
              {"status", to_string(r.status)},
              {"attempt_count", r.attempt_count}};
}

ModelResponse response_from_json(const json& rec) {
  ModelResponse r;
  r.task_id = rec.value("task_id", "");
  r.raw_text = rec.value("raw_text", "");
  r.latency_ms = rec.value("latency_ms", 0);
  r.status = status_from_string(rec.value("status", "ok"));
  r.attempt_count = rec.value("attempt_count", 1);
  return r;
}

void write_responses(const std::filesystem::path& path,
                     const std::vector<ModelResponse>& responses, const json& meta) {
  std::vector<json> records;
  if (!meta.empty()) records.push_back(json{{"_meta", meta}});
  for (const auto& r : responses) records.push_back(to_json(r));
  write_jsonl(path, records);
}

std::vector<ModelResponse> read_responses(const std::filesystem::path& path) {
  auto raw = read_jsonl(path);
  std::vector<ModelResponse> out;
  for (const auto& rec : raw.records) {
    if (rec.contains("_meta")) continue;
    out.push_back(response_from_json(rec));
  }
  return out;
}

namespace {

struct ParsedUrl {
  std::string base;  // scheme://host:port
  std::string path;  // defaults filled by adapter
};

ParsedUrl parse_url(const std::string& endpoint) {
  ParsedUrl out;
  auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos)
    throw ConfigError("endpoint must be a full URL: " + endpoint);
  auto path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    out.base = endpoint;
  } else {
    out.base = endpoint.substr(0, path_start);
    out.path = endpoint.substr(path_start);
  }
  return out;
}

std::string first_choice_text(const json& body, bool chat) {
  if (!body.contains("choices") || !body["choices"].is_array() ||
      body["choices"].empty())
    throw std::runtime_error("no choices in response");
  const json& choice = body["choices"][0];
  if (chat) return choice.at("message").at("content").get<std::string>();
  return choice.at("text").get<std::string>();
}

class HttpAdapter {
 public:
  HttpAdapter(const ModelSpec& spec, bool chat) : spec_(spec), chat_(chat) {
    const char* key = std::getenv(spec.api_key_env.c_str());
    if (!key || !*key)
      throw EnvironmentError("credential missing: set " + spec.api_key_env);
    api_key_ = key;
    url_ = parse_url(spec.endpoint);
    if (url_.path.empty())
      url_.path = chat ? "/v1/chat/completions" : "/v1/completions";
  }

  /// One attempt. Returns true on success; on failure fills retryable/fatal.
  bool attempt(const taskgen::TaskInstance& task, ModelResponse& out,
               bool& retryable, bool& rate_limited) {
    httplib::Client client(url_.base);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(120, 0);
    client.set_bearer_token_auth(api_key_);

    json body;
    body["model"] = spec_.model_name;
    body["max_tokens"] = spec_.max_tokens;
    if (chat_) {
      json messages = json::array();
      if (!spec_.system_prompt.empty())
        messages.push_back({{"role", "system"}, {"content", spec_.system_prompt}});
      messages.push_back({{"role", "user"}, {"content", task.rendered_input}});
      body["messages"] = messages;
    } else {
      body["prompt"] = task.rendered_input;
    }
    for (const auto& [k, v] : spec_.config.items()) body[k] = v;

    auto res = client.Post(url_.path, body.dump(), "application/json");
    if (!res) {
      retryable = true;
      out.raw_text = "transport error: " + httplib::to_string(res.error());
      return false;
    }
    if (res->status == 429) {
      retryable = true;
      rate_limited = true;
      out.raw_text = "rate limited";
      return false;
    }
    if (res->status >= 500) {
      retryable = true;
      out.raw_text = "server error " + std::to_string(res->status);
      return false;
    }
    if (res->status != 200) {
      retryable = false;
      out.raw_text = "http " + std::to_string(res->status) + ": " + res->body;
      return false;
    }
    try {
      json parsed = json::parse(res->body);
      out.raw_text = first_choice_text(parsed, chat_);
      return true;
    } catch (const std::exception& e) {
      retryable = false;
      out.raw_text = std::string("malformed response body: ") + e.what();
      return false;
    }
  }

 private:
  ModelSpec spec_;
  bool chat_;
  std::string api_key_;
  ParsedUrl url_;
};

std::string stub_identity_answer(const taskgen::TaskInstance& task) {
  if (task.payload.contains("code")) return task.payload["code"].get<std::string>();
  if (task.payload.contains("explanation"))
    return task.payload["explanation"].get<std::string>();
  if (task.payload.contains("pair"))
    return task.payload["pair"]["left"]["source"].get<std::string>();
  return task.rendered_input;
}

ModelResponse stub_execution_oracle_answer(const taskgen::TaskInstance& task,
                                           const DispatchOptions& opts) {
  ModelResponse out;
  out.task_id = task.id;
  out.status = ResponseStatus::ok;

  switch (task.kind) {
    case taskgen::TaskKind::MorphismIdentification: {
      if (!task.payload.contains("pair") || !opts.exec_passes) {
        out.status = ResponseStatus::api_error;
        out.raw_text = "oracle: no pair payload or no execution callback";
        return out;
      }
      pairgen::EvalPair pair = pairgen::pair_from_json(task.payload["pair"]);
      if (!pair.left.tests.present || !pair.right.tests.present) {
        out.status = ResponseStatus::api_error;
        out.raw_text = "oracle: pair lacks tests on both sides";
        return out;
      }
      auto left = opts.exec_passes(pair.left);
      auto right = opts.exec_passes(pair.right);
      if (!left || !right) {
        out.status = ResponseStatus::api_error;
        out.raw_text = "oracle: execution unavailable";
        return out;
      }
      // equal pass-vectors over the shared suite read as equivalent
      out.raw_text = (*left == *right) ? "True" : "False";
      return out;
    }
    case taskgen::TaskKind::Translation: {
      std::string source_id = task.payload.value("task_id", "");
      if (opts.oracle_corpus) {
        for (const auto& obj : *opts.oracle_corpus) {
          if (obj.task_id == source_id ||
              (!obj.problem_id.empty() && obj.problem_id == source_id)) {
            std::string tag = task.target_language.value_or(obj.language);
            out.raw_text = "```" + tag + "\n" + obj.source + "\n```";
            return out;
          }
        }
      }
      out.status = ResponseStatus::api_error;
      out.raw_text = "oracle: no canonical solution for " + source_id;
      return out;
    }
    case taskgen::TaskKind::Explanation:
      // code-as-explanation keeps the round trip lossless
      out.raw_text = task.payload.value("code", "");
      return out;
    case taskgen::TaskKind::Reproduction: {
      std::string tag = task.target_language.value_or("");
      out.raw_text = "```" + tag + "\n" + task.payload.value("explanation", "") + "\n```";
      return out;
    }
  }
  out.status = ResponseStatus::api_error;
  out.raw_text = "oracle: unsupported task kind";
  return out;
}

}  // namespace

std::vector<ModelResponse> dispatch(const std::vector<taskgen::TaskInstance>& tasks,
                                    const ModelSpec& spec, const DispatchOptions& opts) {
  if (spec.parallelism < 1) throw ConfigError("parallelism must be >= 1");
  bool http = spec.adapter == Adapter::chat_http || spec.adapter == Adapter::completion_http;
  if (http && (spec.endpoint.empty() || spec.model_name.empty()))
    throw ConfigError("http adapters require endpoint and model_name");
  if (!http && !spec.endpoint.empty())
    throw ConfigError("stub adapters take no endpoint");

  // Resume: completed ok-responses in the journal are not re-billed.
  std::unordered_map<std::string, ModelResponse> journaled;
  if (opts.journal && std::filesystem::exists(*opts.journal)) {
    for (const auto& r : read_responses(*opts.journal))
      if (r.status == ResponseStatus::ok) journaled[r.task_id] = r;
  }

  std::vector<ModelResponse> results(tasks.size());
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    auto hit = journaled.find(tasks[i].id);
    if (hit != journaled.end()) results[i] = hit->second;
    else todo.push_back(i);
  }

  std::unique_ptr<HttpAdapter> adapter;
  if (http) adapter = std::make_unique<HttpAdapter>(spec, spec.adapter == Adapter::chat_http);

  std::mutex journal_mutex;
  auto record = [&](const ModelResponse& r) {
    if (!opts.journal) return;
    std::lock_guard<std::mutex> lock(journal_mutex);
    append_jsonl(*opts.journal, to_json(r));
  };

  auto run_one = [&](std::size_t index) {
    const taskgen::TaskInstance& task = tasks[index];
    auto start = std::chrono::steady_clock::now();
    ModelResponse out;
    out.task_id = task.id;

    switch (spec.adapter) {
      case Adapter::stub_identity:
        out.raw_text = stub_identity_answer(task);
        break;
      case Adapter::stub_constant_true:
        out.raw_text = "True";
        break;
      case Adapter::stub_execution_oracle:
        out = stub_execution_oracle_answer(task, opts);
        break;
      case Adapter::chat_http:
      case Adapter::completion_http: {
        bool rate_limited_any = false;
        int attempt = 0;
        while (true) {
          ++attempt;
          bool retryable = false, rate_limited = false;
          ModelResponse probe;
          probe.task_id = task.id;
          if (adapter->attempt(task, probe, retryable, rate_limited)) {
            out = probe;
            out.status = ResponseStatus::ok;
            break;
          }
          rate_limited_any = rate_limited_any || rate_limited;
          if (!retryable || attempt >= spec.retry.max_attempts) {
            out = probe;
            out.status = rate_limited_any ? ResponseStatus::rate_limited_exhausted
                                          : ResponseStatus::api_error;
            break;
          }
          std::this_thread::sleep_for(
              std::chrono::milliseconds(spec.retry.backoff_ms * (1 << (attempt - 1))));
        }
        out.attempt_count = attempt;
        break;
      }
    }

    out.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    results[index] = out;
    record(out);
  };

  if (todo.empty()) return results;
  unsigned int workers = std::min<std::size_t>(
      static_cast<std::size_t>(spec.parallelism), todo.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        std::size_t k = next.fetch_add(1);
        if (k >= todo.size()) return;
        run_one(todo[k]);
      }
    });
  }
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace cateval::modelgw
