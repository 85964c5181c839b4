#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cateval/corpus.hpp"
#include "cateval/harness.hpp"
#include "cateval/metrics.hpp"
#include "cateval/modelgw.hpp"
#include "cateval/pairgen.hpp"
#include "cateval/taskgen.hpp"

namespace cateval::pipeline {

/// A pipeline stage failed; exit_code is the process exit the CLI maps to.
struct StageError : std::runtime_error {
  StageError(const std::string& stage_name, int code, const std::string& message)
      : std::runtime_error("[" + stage_name + "] " + message),
        stage(stage_name), exit_code(code) {}
  std::string stage;
  int exit_code;
};

inline constexpr int kExitConfig = 2;
inline constexpr int kExitIngest = 10;
inline constexpr int kExitMorph = 11;
inline constexpr int kExitPairs = 12;
inline constexpr int kExitTasks = 13;
inline constexpr int kExitRun = 14;
inline constexpr int kExitExec = 15;
inline constexpr int kExitScore = 16;
inline constexpr int kExitReport = 17;
inline constexpr int kExitDoctor = 18;

struct DatasetConfig {
  corpus::DatasetDescriptor descriptor;
  std::filesystem::path path;
  corpus::FilterRules filter;
  corpus::FieldMap fields;
};

struct RunConfig {
  std::string run_id = "run";
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "runs/out";

  taskgen::TaskKind task = taskgen::TaskKind::MorphismIdentification;
  std::string template_id;          // empty = default template for the kind
  std::string explain_template_id;  // explain+reproduce runs
  std::string src_language = "java";
  std::string dst_language = "java";

  std::vector<DatasetConfig> datasets;
  std::optional<DatasetConfig> contest;  // global pairs

  pairgen::LocalPairOptions local_pairs;
  pairgen::GlobalPairOptions global_pairs;
  bool flag_distinguishing = false;

  modelgw::ModelSpec model;
  harness::Limits limits;
  int exec_parallelism = 0;  // 0 = hardware concurrency

  std::optional<std::filesystem::path> prompt_file;
  /// Target-language canonical solutions + tests (translation scoring and
  /// the oracle stub's translation answers).
  std::optional<DatasetConfig> target_corpus;

  static RunConfig from_json(const json& rec);
  static RunConfig load(const std::filesystem::path& path);
  json to_json() const;
  std::string digest() const;
};

/// Executes the configured stages end to end, persisting each intermediate
/// artifact under out_dir and resuming from any artifact whose recorded
/// config digest matches. Throws StageError with the failing stage.
metrics::MetricsReport run_pipeline(const RunConfig& config);

/// Matching key used to align a source object with its target-language
/// counterpart: the trailing path segment of a task id ("Java/7" -> "7").
std::string problem_key(const std::string& task_id);

}  // namespace cateval::pipeline
