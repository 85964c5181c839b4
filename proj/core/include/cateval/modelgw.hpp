#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cateval/corpus.hpp"
#include "cateval/taskgen.hpp"

namespace cateval::modelgw {

enum class Adapter {
  chat_http,
  completion_http,
  stub_identity,
  stub_constant_true,
  stub_execution_oracle,
};

std::string to_string(Adapter a);
Adapter adapter_from_string(const std::string& s);  // throws ConfigError
bool is_stub(Adapter a);

struct RetryPolicy {
  int max_attempts = 3;
  int backoff_ms = 200;  // doubled per attempt
};

struct ModelSpec {
  std::string id = "stub";
  Adapter adapter = Adapter::stub_constant_true;
  std::string endpoint;     // http adapters
  std::string model_name;   // http adapters
  int max_tokens = 500;
  json config = json::object();  // passed through opaquely (temperature, ...)
  int parallelism = 4;
  RetryPolicy retry;
  std::string api_key_env = "CATEVAL_API_KEY";
  std::string system_prompt;  // omitted when empty
};

ModelSpec model_spec_from_json(const json& rec);
json to_json(const ModelSpec& spec);

enum class ResponseStatus { ok, api_error, timeout, rate_limited_exhausted };
std::string to_string(ResponseStatus s);

struct ModelResponse {
  std::string task_id;
  std::string raw_text;
  std::int64_t latency_ms = 0;
  ResponseStatus status = ResponseStatus::ok;
  int attempt_count = 1;
};

json to_json(const ModelResponse& r);
ModelResponse response_from_json(const json& rec);
void write_responses(const std::filesystem::path& path,
                     const std::vector<ModelResponse>& responses,
                     const json& meta = json::object());
std::vector<ModelResponse> read_responses(const std::filesystem::path& path);

/// Runs one object against its own suite (true = passed); nullopt when the
/// environment cannot execute it. Wired in by the caller so the gateway
/// stays independent of the execution harness.
using ExecPassFn = std::function<std::optional<bool>(const corpus::CodeObject&)>;

struct DispatchOptions {
  std::optional<std::filesystem::path> journal;  // append-only, enables resume
  ExecPassFn exec_passes;                        // stub_execution_oracle
  /// Canonical solutions in the translation target language, keyed by the
  /// source object's task_id (stub_execution_oracle translation answers).
  const std::vector<corpus::CodeObject>* oracle_corpus = nullptr;
};

/// Sends every task to the model with bounded parallelism. Exactly one
/// response per task, input order preserved; failures are recorded in the
/// status, never dropped. Throws ConfigError for invalid specs and
/// EnvironmentError for missing credentials on http adapters.
std::vector<ModelResponse> dispatch(const std::vector<taskgen::TaskInstance>& tasks,
                                    const ModelSpec& spec,
                                    const DispatchOptions& opts = {});

}  // namespace cateval::modelgw
